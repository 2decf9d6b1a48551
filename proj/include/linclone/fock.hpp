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

// Truncated number-basis simulator used as an independent check of the
// phase-space formulas. States are built from the operator definitions
// D(alpha) = exp(alpha a^dag - alpha^* a), S(xi) = exp((xi a^dag^2 - xi^* a^2)/2)
// and the thermal number distribution; the cloner is run with explicit
// beam-splitter unitaries, coherent-state heterodyne projectors on an outcome
// grid, feed-forward displacements and partial traces.
//
// Nothing in this file uses covariance-matrix algebra.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "linclone/cloner.hpp"
#include "linclone/errors.hpp"
#include "linclone/fidelity.hpp"
#include "linclone/phase_space.hpp"

namespace linclone {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

struct FockOperator {
    CMat m;
    int dim() const { return static_cast<int>(m.rows()); }
    /// Max-norm of U^dag U - I.
    double unitarity_defect() const {
        return (m.adjoint() * m - CMat::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
    }
};

/// Density matrix truncated to photon numbers 0 .. dim-1. `leakage` is the
/// probability mass that fell outside the truncation while it was built.
struct FockDensityMatrix {
    CMat rho;
    double leakage = 0.0;

    int dim() const { return static_cast<int>(rho.rows()); }
    double trace() const { return rho.trace().real(); }
    double hermiticity_defect() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }
    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<CMat> es(rho, Eigen::EigenvaluesOnly);
        return es.eigenvalues()(0);
    }
    /// Zero-padded (or truncated) copy of dimension `d`.
    FockDensityMatrix resized(int d) const {
        FockDensityMatrix out{CMat::Zero(d, d), leakage};
        const int k = std::min(d, dim());
        out.rho.topLeftCorner(k, k) = rho.topLeftCorner(k, k);
        return out;
    }
};

namespace fock {

inline CMat annihilation(int dim) {
    CMat a = CMat::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

/// |alpha> truncated to `dim` levels; the coefficients are exact.
inline CVec coherent_ket(cplx alpha, int dim) {
    CVec v(dim);
    cplx c = std::exp(-0.5 * std::norm(alpha));
    for (int n = 0; n < dim; ++n) {
        v(n) = c;
        c *= alpha / std::sqrt(static_cast<double>(n + 1));
    }
    return v;
}

/// <m|D(alpha)|n> for m < rows, n < cols. Built column by column from
/// D|n> = (a^dag - alpha^*) D|n-1> / sqrt(n); raising never feeds lower rows,
/// so every returned entry is exact.
inline CMat displacement(cplx alpha, int rows, int cols) {
    CMat d(rows, cols);
    d.col(0) = coherent_ket(alpha, rows);
    for (int n = 1; n < cols; ++n) {
        const double inv = 1.0 / std::sqrt(static_cast<double>(n));
        for (int m = 0; m < rows; ++m) {
            const cplx raised = m > 0 ? std::sqrt(static_cast<double>(m)) * d(m - 1, n - 1) : cplx{};
            d(m, n) = inv * (raised - std::conj(alpha) * d(m, n - 1));
        }
    }
    return d;
}

/// S(xi) = exp((xi a^dag^2 - xi^* a^2)/2) restricted to `dim` levels, exponentiated
/// in a larger space so the edge error does not reach the returned block.
inline CMat squeeze(cplx xi, int dim, int margin = 80) {
    const int big = dim + margin;
    const CMat a = annihilation(big);
    const CMat ad = a.adjoint();
    const CMat gen = 0.5 * (xi * ad * ad - std::conj(xi) * a * a);
    const CMat s = gen.exp();
    return s.topLeftCorner(dim, dim);
}

/// Thermal number distribution N^n / (N+1)^(n+1).
inline Eigen::VectorXd thermal_populations(double n_thermal, int dim) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
    if (n_thermal <= 0.0) {
        p(0) = 1.0;
        return p;
    }
    const double q = n_thermal / (n_thermal + 1.0);
    double v = 1.0 / (n_thermal + 1.0);
    for (int n = 0; n < dim; ++n) {
        p(n) = v;
        v *= q;
    }
    return p;
}

/// Eigen-decomposition of a density matrix into sqrt(p_k) |psi_k> columns,
/// dropping components with p_k below `cut`.
inline CMat weighted_eigenvectors(const CMat& rho, double cut = 1e-16) {
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (rho + rho.adjoint()));
    std::vector<int> keep;
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
        if (es.eigenvalues()(k) > cut) keep.push_back(k);
    }
    CMat out(rho.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        out.col(static_cast<Eigen::Index>(i)) = std::sqrt(es.eigenvalues()(keep[i])) * es.eigenvectors().col(keep[i]);
    }
    return out;
}

/// U|n>|0> for a beam splitter of transmissivity tau, as a (dim*dim) x dim
/// matrix with row index i*dim + j for |i>_1 |j>_2. Built from the exponential
/// of exp(theta (a b^dag - a^dag b)), cos(theta) = sqrt(tau), on each
/// fixed-total-photon-number block, which the truncation leaves intact.
/// Mode 1 then carries sqrt(tau) alpha and mode 2 sqrt(1-tau) alpha for |alpha>|0>.
inline CMat beam_splitter_with_vacuum(double tau, int dim) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("beam_splitter_with_vacuum: tau must lie in [0, 1]");
    const double theta = std::acos(std::sqrt(tau));
    CMat v = CMat::Zero(static_cast<Eigen::Index>(dim) * dim, dim);
    for (int total = 0; total < dim; ++total) {
        // Basis |k, total - k>, k = 0..total.
        const int size = total + 1;
        Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(size, size);
        for (int k = 0; k <= total; ++k) {
            const int l = total - k;
            // a b^dag |k, l> = sqrt(k (l+1)) |k-1, l+1>
            if (k > 0) gen(k - 1, k) += theta * std::sqrt(static_cast<double>(k) * (l + 1));
            // -a^dag b |k, l> = -sqrt((k+1) l) |k+1, l-1>
            if (l > 0) gen(k + 1, k) -= theta * std::sqrt(static_cast<double>(k + 1) * l);
        }
        const Eigen::MatrixXd u = gen.exp();
        for (int k = 0; k <= total; ++k) {
            v(static_cast<Eigen::Index>(k) * dim + (total - k), total) = u(k, total);
        }
    }
    return v;
}

/// sqrt of a Hermitian positive semidefinite matrix; eigenvalues below zero are
/// clamped and the largest clamped magnitude is reported through `clamped`.
inline CMat hermitian_sqrt(const CMat& m, double* clamped = nullptr) {
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (m + m.adjoint()));
    Eigen::VectorXd ev = es.eigenvalues();
    double worst = 0.0;
    for (int i = 0; i < ev.size(); ++i) {
        if (ev(i) < 0.0) {
            worst = std::max(worst, -ev(i));
            ev(i) = 0.0;
        }
    }
    if (clamped) *clamped = worst;
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace fock

/// Number-basis image of a Gaussian state, built as D(alpha) S(xi) nu_th(N) S(xi)^dag D(alpha)^dag
/// from the single-mode Williamson form of its covariance.
/// Throws NumericalError if more than `max_leakage` of the trace falls outside `dim` levels.
inline FockDensityMatrix to_fock(const GaussianState& s, int dim, double max_leakage = 1e-8) {
    if (dim < 1) throw DomainError("to_fock: dimension must be positive");
    const CovMat& c = s.cov();
    const double nu = std::sqrt(c.det());
    const double n_th = std::max(0.0, nu - 0.5);
    // Pure part sigma / (2 nu) is the covariance of S(r e^{i phi})|0>, whose off-diagonal
    // entry is +sinh(2r) sin(phi) / 2 under the operator definition above.
    const double cosh2r = std::max(1.0, c.trace() / (2.0 * nu));
    const double r = 0.5 * std::acosh(cosh2r);
    const double phi = std::atan2(2.0 * c.g12(), c.g11() - c.g22());

    const int work = dim + 40 + static_cast<int>(4.0 * s.mean_photon_number());
    const Eigen::VectorXd pops = fock::thermal_populations(n_th, work);
    CMat rho;
    if (r > 1e-14) {
        const CMat sq = fock::squeeze(std::polar(r, phi), work);
        rho = sq * pops.cast<cplx>().asDiagonal() * sq.adjoint();
    } else {
        rho = pops.cast<cplx>().asDiagonal();
    }
    const cplx alpha = s.mean().amplitude();
    if (std::abs(alpha) > 0.0) {
        const CMat d = fock::displacement(alpha, work, work);
        rho = d * rho * d.adjoint();
    }
    FockDensityMatrix out{rho.topLeftCorner(dim, dim), 0.0};
    out.rho = 0.5 * (out.rho + out.rho.adjoint());
    out.leakage = std::max(0.0, 1.0 - out.trace());
    if (out.leakage > max_leakage) {
        std::ostringstream os;
        os << "to_fock: truncation at " << dim << " levels loses " << out.leakage << " of the trace";
        throw NumericalError(os.str());
    }
    return out;
}

/// Quadrature means and symmetrised covariances, normalised by the trace.
inline Moments moments(const FockDensityMatrix& f) {
    const CMat& rho = f.rho;
    const int dim = f.dim();
    const double tr = f.trace();
    cplx a1{};  // <a>
    cplx a2{};  // <a^2>
    double n{};  // <a^dag a>
    for (int k = 0; k < dim; ++k) {
        n += k * rho(k, k).real();
        if (k >= 1) a1 += std::sqrt(static_cast<double>(k)) * rho(k, k - 1);
        if (k >= 2) a2 += std::sqrt(static_cast<double>(k) * (k - 1)) * rho(k, k - 2);
    }
    a1 /= tr;
    a2 /= tr;
    n /= tr;
    const double mx = std::sqrt(2.0) * a1.real();
    const double my = std::sqrt(2.0) * a1.imag();
    const double xx = a2.real() + n + 0.5;
    const double yy = -a2.real() + n + 0.5;
    const double xy = a2.imag();
    return {{mx, my}, CovMat(xx - mx * mx, xy - mx * my, yy - my * my)};
}

/// (Tr sqrt(sqrt(a) b sqrt(a)))^2 via Hermitian eigendecompositions.
inline FidelityValue uhlmann_fidelity_fock(const FockDensityMatrix& a, const FockDensityMatrix& b,
                                           double negative_tol = 1e-9) {
    if (a.dim() != b.dim()) throw DomainError("uhlmann_fidelity_fock: dimension mismatch");
    double clamp_a = 0.0;
    const CMat sa = fock::hermitian_sqrt(a.rho, &clamp_a);
    const CMat inner = sa * b.rho * sa;
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
    double sum = 0.0;
    double clamp_inner = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double ev = es.eigenvalues()(i);
        if (ev < 0.0) {
            clamp_inner = std::max(clamp_inner, -ev);
        } else {
            sum += std::sqrt(ev);
        }
    }
    if (clamp_a > negative_tol || clamp_inner > negative_tol) {
        std::ostringstream os;
        os << "uhlmann_fidelity_fock: negative eigenvalues beyond tolerance (" << std::max(clamp_a, clamp_inner)
           << ")";
        throw NumericalError(os.str());
    }
    return FidelityValue(sum * sum);
}

/// Uniform tensor grid over the heterodyne outcome plane, centred on the mean
/// outcome and `half_width_sigmas` standard deviations wide on each side.
struct OutcomeGrid {
    int points = 81;
    double half_width_sigmas = 8.0;
    int noise_points = 41;       // grid for the eta < 1 detector noise
    int extra_levels = 20;       // head-room for the displaced state
    double trace_tol = 1e-4;
    unsigned threads = 0;        // 0: hardware concurrency
};

struct FockCloneResult {
    FockDensityMatrix clone1;
    FockDensityMatrix clone2;
    FockDensityMatrix displaced;  // outcome-averaged state before the second beam splitter
};

namespace fock {

/// Weighted trapezoidal nodes on [centre - h, centre + h] for each axis.
struct Grid1D {
    std::vector<double> nodes;
    double weight = 0.0;
};
inline Grid1D uniform_grid(double centre, double half_width, int points) {
    Grid1D g;
    const double step = 2.0 * half_width / (points - 1);
    g.weight = step;
    for (int i = 0; i < points; ++i) g.nodes.push_back(centre - half_width + i * step);
    return g;
}

/// Partial trace of V rho V^dag, V = beam_splitter_with_vacuum(...), over the
/// other mode: keep = 1 returns mode 1, keep = 2 returns mode 2.
inline CMat split_and_trace(const CMat& iso, const CMat& rho, int dim, int keep) {
    CMat out = CMat::Zero(dim, dim);
    CMat block(dim, dim);
    for (int traced = 0; traced < dim; ++traced) {
        for (int kept = 0; kept < dim; ++kept) {
            const Eigen::Index row =
                keep == 1 ? static_cast<Eigen::Index>(kept) * dim + traced : static_cast<Eigen::Index>(traced) * dim + kept;
            block.row(kept) = iso.row(row);
        }
        out.noalias() += block * rho * block.adjoint();
    }
    return out;
}

}  // namespace fock

/// Runs the cloner on a number-basis input with explicit operators:
/// BS(tau1) with vacuum, projection of mode 2 on |xi><xi|/pi over an outcome
/// grid, displacement D(g xi) of mode 1, sum over the grid, detector noise for
/// eta < 1 (a Gaussian random displacement of variance g^2 (1-eta)/eta, which is
/// what smearing the outcome by the lossy POVM amounts to), then BS(tau2) with
/// vacuum and partial traces.
///
/// The outcome xi is a complex amplitude; in quadrature units the record is
/// sqrt(2) (Re xi, Im xi), so D(g xi) shifts the mean by g times the record.
///
/// Cost grows like points^2 * dim^3; dim <= 40 is the intended range.
inline FockCloneResult apply_cloner_fock(const FockDensityMatrix& input, const ClonerConfig& cfg,
                                         const OutcomeGrid& grid = {}) {
    cfg.validate();
    if (grid.points < 3 || grid.noise_points < 3) throw DomainError("apply_cloner_fock: grid needs >= 3 points per axis");
    const int dim = input.dim();
    const int wide = dim + grid.extra_levels;

    // Mode-1 input purification columns and the BS(tau1) image of each.
    const CMat psi = fock::weighted_eigenvectors(input.rho);
    const Eigen::Index k_count = psi.cols();
    const CMat bs1 = fock::beam_splitter_with_vacuum(cfg.tau1, dim);
    const CMat joint = bs1 * psi;  // (dim*dim) x K, row i*dim + j

    // Outcome statistics from the state itself: centre <b> and spread <b^dag b> - |<b>|^2 on mode 2.
    const Moments in_mom = moments(input);
    const cplx centre = std::sqrt(1.0 - cfg.tau1) * in_mom.mean.amplitude();
    const double spread_q = std::max(in_mom.cov.g11(), in_mom.cov.g22());
    // Husimi width per axis: ((1-tau1) var + tau1/2 + 1/2) / 2 in amplitude units.
    const double sigma = std::sqrt(0.5 * ((1.0 - cfg.tau1) * spread_q + 0.5 * cfg.tau1 + 0.5));
    const auto gx = fock::uniform_grid(centre.real(), grid.half_width_sigmas * sigma, grid.points);
    const auto gy = fock::uniform_grid(centre.imag(), grid.half_width_sigmas * sigma, grid.points);
    const double cell = gx.weight * gy.weight / std::numbers::pi;

    // One partial sum per grid row, reduced in row order so the result does not
    // depend on the thread count.
    std::vector<CMat> rows(gx.nodes.size());
    auto run_row = [&](std::size_t r) {
        CMat acc = CMat::Zero(wide, wide);
        CMat cond(dim, k_count);
        for (double xi_im : gy.nodes) {
            const cplx xi{gx.nodes[r], xi_im};
            const CVec bra = fock::coherent_ket(xi, dim).conjugate();  // <xi|j>
            for (Eigen::Index k = 0; k < k_count; ++k) {
                const Eigen::Map<const CMat> phi(joint.col(k).data(), dim, dim);  // column-major: phi(j, i)
                cond.col(k).noalias() = phi.transpose() * bra;
            }
            const CMat moved = fock::displacement(cfg.g * xi, wide, dim) * cond;
            acc.noalias() += cell * (moved * moved.adjoint());
        }
        rows[r] = std::move(acc);
    };
    unsigned threads = grid.threads != 0 ? grid.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(rows.size()));
    if (threads <= 1) {
        for (std::size_t r = 0; r < rows.size(); ++r) run_row(r);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t r = w; r < rows.size(); r += threads) run_row(r);
            });
        }
        for (auto& t : pool) t.join();
    }
    CMat displaced = CMat::Zero(wide, wide);
    for (const CMat& part : rows) displaced += part;

    if (cfg.eta < 1.0 && cfg.g > 0.0) {
        const double sigma_eta = (1.0 - cfg.eta) / cfg.eta;
        const double s_u = std::sqrt(0.5 * sigma_eta);
        const auto ux = fock::uniform_grid(0.0, grid.half_width_sigmas * s_u, grid.noise_points);
        const double norm = ux.weight * ux.weight / (std::numbers::pi * sigma_eta);
        CMat noisy = CMat::Zero(wide, wide);
        for (double ur : ux.nodes) {
            for (double ui : ux.nodes) {
                const cplx u{ur, ui};
                const double w = norm * std::exp(-std::norm(u) / sigma_eta);
                const CMat d = fock::displacement(cfg.g * u, wide, wide);
                noisy.noalias() += w * (d * displaced * d.adjoint());
            }
        }
        displaced = noisy;
    }
    displaced = 0.5 * (displaced + displaced.adjoint());

    const CMat bs2 = fock::beam_splitter_with_vacuum(cfg.tau2, wide);
    FockCloneResult out{
        {fock::split_and_trace(bs2, displaced, wide, 1), 0.0},
        {fock::split_and_trace(bs2, displaced, wide, 2), 0.0},
        {displaced, 0.0},
    };
    for (FockDensityMatrix* f : {&out.clone1, &out.clone2, &out.displaced}) {
        f->rho = 0.5 * (f->rho + f->rho.adjoint());
        f->leakage = 1.0 - f->trace();
        if (std::abs(f->leakage) > grid.trace_tol) {
            std::ostringstream os;
            os << "apply_cloner_fock: trace " << f->trace() << " off by more than " << grid.trace_tol
               << "; outcome grid too coarse or truncation too small";
            throw NumericalError(os.str());
        }
    }
    return out;
}

/// Symmetric machine (tau1 = tau2 = 1/2, g = 1) with detector efficiency eta.
inline FockCloneResult apply_cloner_fock(const FockDensityMatrix& input, double eta, const OutcomeGrid& grid = {}) {
    return apply_cloner_fock(input, ClonerConfig{0.5, 0.5, 1.0, eta, PropMode::Physical}, grid);
}

}  // namespace linclone
