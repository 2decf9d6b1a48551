// Copyright 2026 The linclone Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// First- and second-moment description of one- and two-mode Gaussian states.
//
// Conventions: x = (a + a^dag)/sqrt(2), y = (a - a^dag)/(i sqrt(2)), so the
// vacuum covariance is 1/2 * identity and a coherent state |alpha> has mean
// sqrt(2) * (Re alpha, Im alpha). Two-mode vectors are ordered (x1, y1, x2, y2).

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "linclone/errors.hpp"

namespace linclone {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;
using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

/// Tolerance on Det >= 1/4 and on positive definiteness.
inline constexpr double kPhysicalityTol = 1e-9;

struct QuadVector {
    double x = 0.0;
    double y = 0.0;

    constexpr QuadVector() = default;
    constexpr QuadVector(double x_, double y_) : x(x_), y(y_) {}
    explicit QuadVector(const Vec2& v) : x(v(0)), y(v(1)) {}

    Vec2 vec() const { return {x, y}; }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }

    /// Complex amplitude alpha with mean = sqrt(2) (Re alpha, Im alpha).
    std::complex<double> amplitude() const { return {x / std::sqrt(2.0), y / std::sqrt(2.0)}; }
    static QuadVector from_amplitude(std::complex<double> alpha) {
        return {std::sqrt(2.0) * alpha.real(), std::sqrt(2.0) * alpha.imag()};
    }

    friend QuadVector operator+(QuadVector a, QuadVector b) { return {a.x + b.x, a.y + b.y}; }
    friend QuadVector operator-(QuadVector a, QuadVector b) { return {a.x - b.x, a.y - b.y}; }
    friend QuadVector operator*(double s, QuadVector a) { return {s * a.x, s * a.y}; }
    friend bool operator==(const QuadVector&, const QuadVector&) = default;
};

/// Symmetric 2x2 covariance matrix. Only three entries are stored, so
/// gamma_21 == gamma_12 holds by construction.
class CovMat {
  public:
    constexpr CovMat() = default;
    constexpr CovMat(double g11, double g12, double g22) : g11_(g11), g12_(g12), g22_(g22) {}

    /// Symmetrises `m`; throws if it is not symmetric to 1e-9 relative.
    static CovMat from_matrix(const Mat2& m) {
        const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
        if (std::abs(m(0, 1) - m(1, 0)) > 1e-9 * scale) {
            throw DomainError("CovMat: matrix is not symmetric");
        }
        return {m(0, 0), 0.5 * (m(0, 1) + m(1, 0)), m(1, 1)};
    }
    static constexpr CovMat scaled_identity(double v) { return {v, 0.0, v}; }

    double g11() const { return g11_; }
    double g12() const { return g12_; }
    double g22() const { return g22_; }

    Mat2 matrix() const {
        Mat2 m;
        m << g11_, g12_, g12_, g22_;
        return m;
    }
    double det() const { return g11_ * g22_ - g12_ * g12_; }
    double trace() const { return g11_ + g22_; }

    bool positive_definite(double tol = kPhysicalityTol) const {
        return g11_ > tol && g22_ > tol && det() > tol;
    }
    /// Uncertainty bound for a single mode: Det >= 1/4 together with positivity.
    /// The determinant test is widened by its own round-off, which matters for
    /// strongly squeezed states whose entries span many orders of magnitude.
    bool physical(double tol = kPhysicalityTol) const {
        if (!(std::isfinite(g11_) && std::isfinite(g12_) && std::isfinite(g22_))) return false;
        return g11_ > 0.0 && g22_ > 0.0 && det() >= 0.25 - tol - det_roundoff();
    }
    double det_roundoff() const {
        return 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(g11_ * g22_) + g12_ * g12_);
    }

    friend CovMat operator+(const CovMat& a, const CovMat& b) {
        return {a.g11_ + b.g11_, a.g12_ + b.g12_, a.g22_ + b.g22_};
    }
    friend CovMat operator*(double s, const CovMat& a) { return {s * a.g11_, s * a.g12_, s * a.g22_}; }
    friend bool operator==(const CovMat&, const CovMat&) = default;

  private:
    double g11_ = 0.5;
    double g12_ = 0.0;
    double g22_ = 0.5;
};

/// Unchecked mean/covariance pair. Used for outcome distributions and for
/// moments extracted from other representations.
struct Moments {
    QuadVector mean;
    CovMat cov;
};

class GaussianState {
  public:
    /// Vacuum.
    GaussianState() = default;

    /// Throws PhysicalityError unless `cov` satisfies the uncertainty bound.
    GaussianState(QuadVector mean, CovMat cov) : mean_(mean), cov_(cov) {
        if (!mean.finite()) throw PhysicalityError("GaussianState: non-finite mean");
        if (!cov.physical()) {
            std::ostringstream os;
            os << "GaussianState: unphysical covariance (" << cov.g11() << ", " << cov.g12() << ", "
               << cov.g22() << "), det = " << cov.det();
            throw PhysicalityError(os.str());
        }
    }
    explicit GaussianState(const Moments& m) : GaussianState(m.mean, m.cov) {}

    const QuadVector& mean() const { return mean_; }
    const CovMat& cov() const { return cov_; }
    Moments moments() const { return {mean_, cov_}; }

    bool is_pure(double tol = 1e-9) const { return std::abs(cov_.det() - 0.25) <= tol; }
    /// <a^dag a> = (Tr sigma - 1)/2 + |X|^2 / 2.
    double mean_photon_number() const {
        return 0.5 * (cov_.trace() - 1.0) + 0.5 * (mean_.x * mean_.x + mean_.y * mean_.y);
    }

  private:
    QuadVector mean_{};
    CovMat cov_{};
};

/// Real 4x4 symplectic matrix acting on (x1, y1, x2, y2).
class Symplectic4 {
  public:
    Symplectic4() : m_(Mat4::Identity()) {}
    explicit Symplectic4(const Mat4& m) : m_(m) {}
    const Mat4& matrix() const { return m_; }

    static Mat4 symplectic_form() {
        Mat4 omega = Mat4::Zero();
        omega(0, 1) = 1.0;
        omega(1, 0) = -1.0;
        omega(2, 3) = 1.0;
        omega(3, 2) = -1.0;
        return omega;
    }
    /// Max-norm of S^T Omega S - Omega.
    double symplectic_defect() const {
        const Mat4 omega = symplectic_form();
        return (m_.transpose() * omega * m_ - omega).cwiseAbs().maxCoeff();
    }
    double orthogonality_defect() const { return (m_.transpose() * m_ - Mat4::Identity()).cwiseAbs().maxCoeff(); }

  private:
    Mat4 m_;
};

/// Two-mode Gaussian state with covariance [[A, C], [C^T, B]].
class TwoModeGaussianState {
  public:
    TwoModeGaussianState(const Vec4& mean, const CovMat& a, const CovMat& b, const Mat2& c)
        : mean_(mean), a_(a), b_(b), c_(c) {
        validate();
    }
    static TwoModeGaussianState from_full(const Vec4& mean, const Mat4& cov) {
        return {mean, CovMat::from_matrix(cov.topLeftCorner<2, 2>()), CovMat::from_matrix(cov.bottomRightCorner<2, 2>()),
                cov.topRightCorner<2, 2>()};
    }

    const Vec4& mean() const { return mean_; }
    QuadVector mean1() const { return QuadVector(Vec2(mean_.head<2>())); }
    QuadVector mean2() const { return QuadVector(Vec2(mean_.tail<2>())); }
    const CovMat& a() const { return a_; }
    const CovMat& b() const { return b_; }
    const Mat2& c() const { return c_; }

    Mat4 covariance() const {
        Mat4 s;
        s.topLeftCorner<2, 2>() = a_.matrix();
        s.topRightCorner<2, 2>() = c_;
        s.bottomLeftCorner<2, 2>() = c_.transpose();
        s.bottomRightCorner<2, 2>() = b_.matrix();
        return s;
    }

    /// Smallest eigenvalue of sigma + (i/2) Omega; non-negative for physical states.
    double uncertainty_margin() const {
        Eigen::Matrix4cd h = covariance().cast<std::complex<double>>();
        h += std::complex<double>(0.0, 0.5) * Symplectic4::symplectic_form().cast<std::complex<double>>();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h, Eigen::EigenvaluesOnly);
        return es.eigenvalues()(0);
    }

  private:
    void validate() const {
        if (!mean_.allFinite() || !c_.allFinite()) throw PhysicalityError("TwoModeGaussianState: non-finite entries");
        const Mat4 cov = covariance();
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * cov.cwiseAbs().maxCoeff();
        Eigen::SelfAdjointEigenSolver<Mat4> es(cov, Eigen::EigenvaluesOnly);
        if (!(es.eigenvalues()(0) > -noise)) {
            throw PhysicalityError("TwoModeGaussianState: covariance not positive definite");
        }
        if (uncertainty_margin() < -kPhysicalityTol - noise) {
            throw PhysicalityError("TwoModeGaussianState: covariance violates the uncertainty relation");
        }
    }

    Vec4 mean_;
    CovMat a_;
    CovMat b_;
    Mat2 c_;
};

// ---------------------------------------------------------------------------
// Constructors

inline GaussianState vacuum() { return {}; }

inline GaussianState coherent(double alpha_re, double alpha_im) {
    return {QuadVector::from_amplitude({alpha_re, alpha_im}), CovMat::scaled_identity(0.5)};
}
inline GaussianState coherent(std::complex<double> alpha) { return coherent(alpha.real(), alpha.imag()); }

/// Covariance of S(xi)|0> with S(xi) = exp{(xi a^dag^2 - xi^* a^2)/2}, xi = xi_mod e^{i xi_phase}.
inline CovMat squeezed_covariance(double xi_mod, double xi_phase) {
    if (!(xi_mod >= 0.0)) throw DomainError("squeezed: |xi| must be non-negative");
    // Eigenvalues e^{+-2r}/2 along the axes rotated by phi/2; no cosh - sinh cancellation.
    const double big = 0.5 * std::exp(2.0 * xi_mod);
    const double small = 0.5 * std::exp(-2.0 * xi_mod);
    const double c = std::cos(0.5 * xi_phase);
    const double s = std::sin(0.5 * xi_phase);
    return {big * c * c + small * s * s, -0.5 * std::sinh(2.0 * xi_mod) * std::sin(xi_phase), big * s * s + small * c * c};
}

/// Displaced squeezed state D(alpha) S(xi) |0>.
inline GaussianState squeezed(std::complex<double> alpha, double xi_mod, double xi_phase) {
    return {QuadVector::from_amplitude(alpha), squeezed_covariance(xi_mod, xi_phase)};
}

/// Displaced thermal state with N mean thermal photons.
inline GaussianState thermal(std::complex<double> alpha, double n_thermal) {
    if (!(n_thermal >= 0.0)) throw DomainError("thermal: N must be non-negative");
    return {QuadVector::from_amplitude(alpha), CovMat::scaled_identity(n_thermal + 0.5)};
}

// ---------------------------------------------------------------------------
// Transformations

/// Beam splitter of transmissivity tau:
///   [[ sqrt(tau) I, sqrt(1-tau) I], [-sqrt(1-tau) I, sqrt(tau) I]].
inline Symplectic4 bs_symplectic(double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("bs_symplectic: tau must lie in [0, 1]");
    const double t = std::sqrt(tau);
    const double r = std::sqrt(1.0 - tau);
    Mat4 s = Mat4::Zero();
    s.topLeftCorner<2, 2>() = t * Mat2::Identity();
    s.topRightCorner<2, 2>() = r * Mat2::Identity();
    s.bottomLeftCorner<2, 2>() = -r * Mat2::Identity();
    s.bottomRightCorner<2, 2>() = t * Mat2::Identity();
    return Symplectic4(s);
}

/// sigma -> S^T sigma S, X -> S^T X.
inline TwoModeGaussianState apply_symplectic(const TwoModeGaussianState& state, const Symplectic4& s) {
    const Mat4& m = s.matrix();
    const Mat4 cov = m.transpose() * state.covariance() * m;
    return TwoModeGaussianState::from_full(m.transpose() * state.mean(), 0.5 * (cov + cov.transpose()));
}

inline TwoModeGaussianState tensor_with_vacuum(const GaussianState& s) {
    Vec4 mean = Vec4::Zero();
    mean.head<2>() = s.mean().vec();
    return {mean, s.cov(), CovMat::scaled_identity(0.5), Mat2::Zero()};
}

/// Reduced state of mode 1 or 2.
inline GaussianState marginal(const TwoModeGaussianState& state, int mode) {
    switch (mode) {
        case 1: return {state.mean1(), state.a()};
        case 2: return {state.mean2(), state.b()};
        default: throw DomainError("marginal: mode must be 1 or 2");
    }
}

inline GaussianState displace(const GaussianState& s, QuadVector d) { return {s.mean() + d, s.cov()}; }

}  // namespace linclone
