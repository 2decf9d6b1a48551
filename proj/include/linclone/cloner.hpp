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

// Linear-optics cloner: BS(tau1) with vacuum -> double-homodyne detection of the
// reflected mode (efficiency eta) -> displacement of the transmitted mode by g
// times the record -> BS(tau2) with vacuum. Outcomes are averaged before the
// second beam splitter, which is equivalent by linearity.

#include <cmath>
#include <string_view>

#include "linclone/errors.hpp"
#include "linclone/phase_space.hpp"

namespace linclone {

/// How the feed-forward gain enters the averaged covariance.
///   Physical:     sigma_d = A + g^2 Sigma + g (C + C^T)
///   PaperLinearG: sigma_d = A + g (Sigma + 2 C^T)
/// The two agree exactly at g = 1.
enum class PropMode { Physical, PaperLinearG };

inline std::string_view to_string(PropMode m) { return m == PropMode::Physical ? "physical" : "paper"; }

struct ClonerConfig {
    double tau1 = 0.5;
    double tau2 = 0.5;
    double g = 1.0;
    double eta = 1.0;
    PropMode mode = PropMode::Physical;

    void validate() const {
        if (!(tau1 >= 0.0 && tau1 <= 1.0)) throw DomainError("ClonerConfig: tau1 must lie in [0, 1]");
        if (!(tau2 >= 0.0 && tau2 <= 1.0)) throw DomainError("ClonerConfig: tau2 must lie in [0, 1]");
        if (!(g >= 0.0) || !std::isfinite(g)) throw DomainError("ClonerConfig: g must be finite and >= 0");
        if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("ClonerConfig: eta must lie in (0, 1]");
    }

    /// tau2 = 1/2 and g = symmetric_gain(tau1).
    static ClonerConfig symmetric(double tau1, double eta, PropMode mode = PropMode::Physical);
};

struct CloneOutput {
    GaussianState clone1;
    GaussianState clone2;
    Mat2 cross;             // off-diagonal block of the output two-mode covariance
    GaussianState displaced;  // outcome-averaged state before the second beam splitter
};

inline void check_eta(double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("eta must lie in (0, 1]");
}

/// Delta^2 = 1/2 + (1 - eta)/eta = (2 - eta)/(2 eta).
inline double delta_squared(double eta) {
    check_eta(eta);
    return (2.0 - eta) / (2.0 * eta);
}

/// Covariance of the double-homodyne POVM, Delta^2 * identity.
inline CovMat measurement_covariance(double eta) { return CovMat::scaled_identity(delta_squared(eta)); }

/// Gain giving both clones the input mean when tau2 = 1/2.
inline double symmetric_gain(double tau1) {
    if (!(tau1 >= 0.0 && tau1 < 1.0)) throw DomainError("symmetric_gain: tau1 must lie in [0, 1)");
    return std::sqrt(2.0 / (1.0 - tau1)) - std::sqrt(tau1 / (1.0 - tau1));
}

inline ClonerConfig ClonerConfig::symmetric(double tau1, double eta, PropMode mode) {
    ClonerConfig cfg{tau1, 0.5, symmetric_gain(tau1), eta, mode};
    cfg.validate();
    return cfg;
}

/// Distribution of the measured record (quadrature units): mean X2, covariance B + Delta^2 I.
inline Moments outcome_statistics(const TwoModeGaussianState& after_bs1, double eta) {
    return {after_bs1.mean2(), after_bs1.b() + measurement_covariance(eta)};
}

inline GaussianState feedforward_averaged_state(const TwoModeGaussianState& two_mode, double g, double eta,
                                                PropMode mode) {
    const Mat2 sigma = outcome_statistics(two_mode, eta).cov.matrix();
    const Mat2 c_sym = two_mode.c() + two_mode.c().transpose();
    Mat2 cov = two_mode.a().matrix();
    if (mode == PropMode::Physical) {
        cov += g * g * sigma + g * c_sym;
    } else {
        // 2 C^T, symmetrised; identical for the symmetric cross blocks produced by BS(tau1).
        cov += g * (sigma + c_sym);
    }
    const QuadVector mean = two_mode.mean1() + g * two_mode.mean2();
    return {mean, CovMat::from_matrix(cov)};
}

/// Coefficient multiplying the input covariance in Gamma (the G map).
inline double gain_scale(double tau1, double g, PropMode mode) {
    const double cross = std::sqrt(tau1 * (1.0 - tau1));
    if (mode == PropMode::Physical) return tau1 + g * g * (1.0 - tau1) + 2.0 * g * cross;
    return tau1 + g * (1.0 - tau1 + 2.0 * cross);
}

/// Isotropic offset added on the diagonal of Gamma: F(gamma) = noise_offset + G(gamma).
inline double noise_offset(double tau1, double g, double eta, PropMode mode) {
    const double cross = std::sqrt(tau1 * (1.0 - tau1));
    const double d2 = delta_squared(eta);
    if (mode == PropMode::Physical) return 0.5 * (1.0 - tau1) + g * g * (0.5 * tau1 + d2) - g * cross;
    return 0.5 * (1.0 - tau1) + g * (0.5 * tau1 - cross + d2);
}

/// Gamma(sigma_in): covariance of the outcome-averaged state, in closed form.
inline Mat2 gamma_matrix(const CovMat& sigma_in, double tau1, double g, double eta, PropMode mode) {
    return gain_scale(tau1, g, mode) * sigma_in.matrix() + noise_offset(tau1, g, eta, mode) * Mat2::Identity();
}

/// Clone amplitude gains (X_k = gain_k * X_in).
inline double clone_mean_gain(const ClonerConfig& cfg, int clone) {
    const double path = std::sqrt(cfg.tau1) + cfg.g * std::sqrt(1.0 - cfg.tau1);
    return (clone == 1 ? std::sqrt(cfg.tau2) : std::sqrt(1.0 - cfg.tau2)) * path;
}

/// Compositional route: tensor_with_vacuum -> BS1 -> feed-forward -> tensor_with_vacuum -> BS2 -> marginals.
inline CloneOutput run_cloner(const GaussianState& input, const ClonerConfig& cfg) {
    cfg.validate();
    const TwoModeGaussianState after_bs1 = apply_symplectic(tensor_with_vacuum(input), bs_symplectic(cfg.tau1));
    const GaussianState displaced = feedforward_averaged_state(after_bs1, cfg.g, cfg.eta, cfg.mode);
    const TwoModeGaussianState out = apply_symplectic(tensor_with_vacuum(displaced), bs_symplectic(cfg.tau2));
    return {marginal(out, 1), marginal(out, 2), out.c(), displaced};
}

/// Closed-form route: A_1 = (1-tau2)/2 I + tau2 Gamma, A_2 = tau2/2 I + (1-tau2) Gamma,
/// X_k = sqrt(tau_k') (sqrt(tau1) + g sqrt(1-tau1)) X_in, cross = sqrt(tau2 (1-tau2)) (Gamma - I/2).
inline CloneOutput closed_form_clones(const GaussianState& input, const ClonerConfig& cfg) {
    cfg.validate();
    const Mat2 gamma = gamma_matrix(input.cov(), cfg.tau1, cfg.g, cfg.eta, cfg.mode);
    const Mat2 id = Mat2::Identity();
    const Mat2 a1 = 0.5 * (1.0 - cfg.tau2) * id + cfg.tau2 * gamma;
    const Mat2 a2 = 0.5 * cfg.tau2 * id + (1.0 - cfg.tau2) * gamma;
    const Mat2 cross = std::sqrt(cfg.tau2 * (1.0 - cfg.tau2)) * (gamma - 0.5 * id);
    const double path = std::sqrt(cfg.tau1) + cfg.g * std::sqrt(1.0 - cfg.tau1);
    return {GaussianState(clone_mean_gain(cfg, 1) * input.mean(), CovMat::from_matrix(a1)),
            GaussianState(clone_mean_gain(cfg, 2) * input.mean(), CovMat::from_matrix(a2)), cross,
            GaussianState(path * input.mean(), CovMat::from_matrix(gamma))};
}

/// sigma_GN^2 = 1/2 + Delta^2: variance of the random displacement that the
/// tau1 = 1/2, g = 1 machine adds to coherent inputs before the second beam
/// splitter (sigma_d = 1/2 I + sigma_GN^2 I). The identity does not extend to
/// other input covariances.
inline double equivalent_added_noise(double eta) { return 0.5 + delta_squared(eta); }

}  // namespace linclone
