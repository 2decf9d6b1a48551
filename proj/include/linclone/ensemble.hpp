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

// Cloning fidelity averaged over a-priori distributions of input states.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <type_traits>
#include <variant>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "linclone/cloner.hpp"
#include "linclone/errors.hpp"
#include "linclone/fidelity.hpp"
#include "linclone/phase_space.hpp"

namespace linclone {

namespace ensemble {

/// A single, fully known input state.
struct PointState {
    GaussianState state;
};
/// Coherent states with p(alpha) = exp(-|alpha|^2 / s2) / (pi s2).
struct GaussianAmplitude {
    double sigma_a2;
};
/// Squeezed states with p(xi) = exp(-|xi|^2 / s^2) / (pi s^2), random displacement.
struct GaussianSqueezing {
    double sigma_s;
};
/// Thermal states with N uniform on [0, bigN], random displacement.
struct TopHatThermal {
    double big_n;
};
/// Thermal states with p(N) = 2 exp(-N^2 / (2 mu^2)) / sqrt(2 pi mu^2), N >= 0.
struct HalfGaussianThermal {
    double mu_n;
};

}  // namespace ensemble

using Ensemble = std::variant<ensemble::PointState, ensemble::GaussianAmplitude, ensemble::GaussianSqueezing,
                              ensemble::TopHatThermal, ensemble::HalfGaussianThermal>;

/// Adaptive Gauss-Kronrod (7/15) with interval bisection. Semi-infinite domains
/// are cut where the prior drops below `tail_ratio` of its peak; the discarded
/// prior mass bounds the truncation error and is added to the estimate.
struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    unsigned max_subdivisions = 15;  // bisection depth
    double tail_ratio = 1e-16;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !(tail_ratio > 0.0 && tail_ratio < 1.0)) {
            throw DomainError("QuadratureSpec: tolerances must be positive");
        }
    }
};

/// Radial weight for the squeezing prior.
///   Prior:   (2 rho / s^2) exp(-rho^2 / s^2), the angular marginal of p(xi).
///   Printed: (rho / s^2) exp(-rho^2 / (2 s^2)), a Rayleigh weight with twice the
///            variance, normalised to 1.
enum class RadialWeight { Prior, Printed };

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // Kronrod estimate plus truncated tail mass
};

struct AveragedFidelity {
    FidelityValue value{0.0};
    double error = 0.0;
};

/// Integrates f over [a, b] and checks the requested tolerance.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureSpec& q, double extra_error = 0.0) {
    q.validate();
    QuadratureResult r;
    if (b <= a) return r;
    // Boost reports leaf errors on the reference interval [-1, 1]; panels of
    // width <= 2 keep their sum an upper bound on the absolute error.
    const int panels = static_cast<int>(std::ceil(0.5 * (b - a)));
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        const double hi = p + 1 == panels ? b : lo + width;
        double err = 0.0;
        double l1 = 0.0;
        r.value += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, q.max_subdivisions,
                                                                                 q.rel_tol, &err, &l1);
        r.error += err;
    }
    r.error += extra_error;
    const double allowed = std::max(q.abs_tol, q.rel_tol * std::abs(r.value)) + extra_error;
    if (!(r.error <= allowed)) {
        std::ostringstream os;
        os << "quadrature did not converge: achieved error " << r.error << ", requested " << allowed;
        throw NumericalError(os.str());
    }
    return r;
}

inline double squeezing_radial_weight(double rho, double sigma_s, RadialWeight convention = RadialWeight::Prior) {
    if (!(rho >= 0.0)) throw DomainError("squeezing_radial_weight: rho must be non-negative");
    if (!(sigma_s > 0.0)) throw DomainError("squeezing_radial_weight: sigma_s must be positive");
    const double s2 = sigma_s * sigma_s;
    if (convention == RadialWeight::Prior) return 2.0 * rho / s2 * std::exp(-rho * rho / s2);
    return rho / s2 * std::exp(-rho * rho / (2.0 * s2));
}

/// Prior mass of the squeezing weight beyond `rho`.
inline double squeezing_tail_mass(double rho, double sigma_s, RadialWeight convention) {
    const double u = rho * rho / (sigma_s * sigma_s);
    return convention == RadialWeight::Prior ? std::exp(-u) : std::exp(-0.5 * u);
}

inline double half_gaussian_weight(double n, double mu_n) {
    return 2.0 / std::sqrt(2.0 * std::numbers::pi * mu_n * mu_n) * std::exp(-n * n / (2.0 * mu_n * mu_n));
}

namespace detail {

/// Smallest x >= peak_at with weight(x) <= ratio * weight(peak_at), for weights
/// that decrease monotonically beyond their peak.
template <class W>
double tail_cutoff(W&& weight, double peak_at, double scale, double ratio) {
    const double peak = weight(peak_at);
    double lo = peak_at;
    double hi = peak_at + scale;
    while (weight(hi) > ratio * peak) {
        lo = hi;
        hi += 2.0 * (hi - peak_at);
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (weight(mid) > ratio * peak ? lo : hi) = mid;
    }
    return hi;
}

inline constexpr double kMaxSqueezing = 300.0;

inline bool at_unity_gain(const ClonerConfig& cfg) {
    return std::abs(cfg.tau2 - 0.5) < 1e-12 && cfg.tau1 < 1.0 && std::abs(cfg.g - symmetric_gain(cfg.tau1)) < 1e-9;
}

}  // namespace detail

/// Clone-1 fidelity for a fixed input through the full pipeline.
inline double pipeline_fidelity(const GaussianState& input, const ClonerConfig& cfg) {
    return gaussian_fidelity(input, run_cloner(input, cfg).clone1);
}

/// Clone-1 fidelity averaged over coherent inputs with a Gaussian amplitude
/// prior of variance sigma_a2. The Gaussian integral is done in closed form:
///   F = 1 / (s + (1 - k)^2 sigma_a2),  s = 1/2 + clone variance,  k = clone amplitude gain.
inline FidelityValue amplitude_averaged_fidelity(const ClonerConfig& cfg, double sigma_a2) {
    cfg.validate();
    if (!(sigma_a2 >= 0.0)) throw DomainError("amplitude_averaged_fidelity: sigma_a2 must be non-negative");
    const Mat2 gamma = gamma_matrix(CovMat::scaled_identity(0.5), cfg.tau1, cfg.g, cfg.eta, cfg.mode);
    const double clone_var = 0.5 * (1.0 - cfg.tau2) + cfg.tau2 * gamma(0, 0);
    const double s = 0.5 + clone_var;
    const double miss = 1.0 - clone_mean_gain(cfg, 1);
    if (std::isinf(sigma_a2)) return FidelityValue(miss == 0.0 ? 1.0 / s : 0.0);
    return FidelityValue(1.0 / (s + miss * miss * sigma_a2));
}

/// Convenience overload with tau2 = 1/2 and physical propagation.
inline FidelityValue amplitude_averaged_fidelity(double g, double sigma_a2, double eta, double tau1) {
    return amplitude_averaged_fidelity(ClonerConfig{tau1, 0.5, g, eta, PropMode::Physical}, sigma_a2);
}

/// Same average by radial quadrature of the general fidelity formula.
inline QuadratureResult amplitude_averaged_fidelity_quadrature(const ClonerConfig& cfg, double sigma_a2,
                                                               const QuadratureSpec& q = {}) {
    cfg.validate();
    if (!(sigma_a2 > 0.0)) throw DomainError("amplitude_averaged_fidelity_quadrature: sigma_a2 must be positive");
    const double sa = std::sqrt(sigma_a2);
    auto weight = [&](double r) { return 2.0 * r / sigma_a2 * std::exp(-r * r / sigma_a2); };
    const double cut = detail::tail_cutoff(weight, sa / std::sqrt(2.0), sa, q.tail_ratio);
    return integrate([&](double r) { return weight(r) * pipeline_fidelity(coherent(r, 0.0), cfg); }, 0.0, cut, q,
                     std::exp(-cut * cut / sigma_a2));
}

/// Average clone fidelity over an input ensemble. For the squeezing and thermal
/// ensembles the machine must run at unity gain (tau2 = 1/2, g = g_s(tau1)) so that
/// the average over the unknown displacement is trivial.
inline AveragedFidelity average_fidelity(const Ensemble& e, const ClonerConfig& cfg, const QuadratureSpec& q = {},
                                         RadialWeight radial = RadialWeight::Prior) {
    cfg.validate();
    q.validate();
    auto require_unity_gain = [&] {
        if (!detail::at_unity_gain(cfg)) {
            throw DomainError("average_fidelity: squeezing/thermal ensembles require tau2 = 1/2 and g = g_s(tau1)");
        }
    };

    return std::visit(
        [&](const auto& ens) -> AveragedFidelity {
            using T = std::decay_t<decltype(ens)>;
            if constexpr (std::is_same_v<T, ensemble::PointState>) {
                return {FidelityValue(pipeline_fidelity(ens.state, cfg)), 0.0};
            } else if constexpr (std::is_same_v<T, ensemble::GaussianAmplitude>) {
                return {amplitude_averaged_fidelity(cfg, ens.sigma_a2), 0.0};
            } else if constexpr (std::is_same_v<T, ensemble::GaussianSqueezing>) {
                require_unity_gain();
                if (!(ens.sigma_s > 0.0)) throw DomainError("GaussianSqueezing: sigma_s must be positive");
                const double s = ens.sigma_s;
                auto weight = [&](double rho) { return squeezing_radial_weight(rho, s, radial); };
                const double peak = radial == RadialWeight::Prior ? s / std::sqrt(2.0) : s;
                const double cut = detail::tail_cutoff(weight, peak, s, q.tail_ratio);
                const auto r = integrate(
                    [&](double rho) {
                        // F <= 1/sinh(rho); beyond this the covariance overflows and the term is nil.
                        if (rho > detail::kMaxSqueezing) return 0.0;
                        return weight(rho) * pipeline_fidelity(squeezed(0.0, rho, 0.0), cfg);
                    },
                    0.0,
                    cut, q, squeezing_tail_mass(cut, s, radial));
                return {FidelityValue(r.value), r.error};
            } else if constexpr (std::is_same_v<T, ensemble::TopHatThermal>) {
                require_unity_gain();
                if (!(ens.big_n >= 0.0)) throw DomainError("TopHatThermal: bigN must be non-negative");
                if (ens.big_n == 0.0) return {FidelityValue(pipeline_fidelity(thermal(0.0, 0.0), cfg)), 0.0};
                // N = u^2 removes the sqrt(N) behaviour of the integrand at N = 0.
                const auto r = integrate([&](double u) { return 2.0 * u * pipeline_fidelity(thermal(0.0, u * u), cfg); },
                                         0.0, std::sqrt(ens.big_n), q);
                return {FidelityValue(r.value / ens.big_n), r.error / ens.big_n};
            } else {
                require_unity_gain();
                if (!(ens.mu_n > 0.0)) throw DomainError("HalfGaussianThermal: mu_N must be positive");
                const double mu = ens.mu_n;
                auto weight = [&](double n) { return half_gaussian_weight(n, mu); };
                const double cut = detail::tail_cutoff(weight, 0.0, mu, q.tail_ratio);
                const auto r = integrate(
                    [&](double u) { return 2.0 * u * weight(u * u) * pipeline_fidelity(thermal(0.0, u * u), cfg); }, 0.0,
                    std::sqrt(cut), q, std::erfc(cut / (std::sqrt(2.0) * mu)));
                return {FidelityValue(r.value), r.error};
            }
        },
        e);
}

// ---------------------------------------------------------------------------
// Gain optimisation for coherent states with a Gaussian amplitude prior.

/// For tau2 = 1/2, picks tau1 so that the clone amplitude gain
/// sqrt(1/2)(sqrt(tau1) + g sqrt(1 - tau1)) is as close to 1 as possible.
/// For coherent inputs the clone variance does not depend on tau1, so this
/// is the best transmissivity for a given g. Below g = 1 the maximum gain
/// sqrt((1 + g^2)/2) is reached at tau1 = 1/(1 + g^2); from g = 1 on, unit gain
/// is reachable and the root with tau1 >= 1/2 is returned.
inline double matched_tau1(double g) {
    if (!(g >= 0.0)) throw DomainError("matched_tau1: g must be non-negative");
    if (g < 1.0) return 1.0 / (1.0 + g * g);
    const double theta = std::atan(g) - std::acos(std::sqrt(2.0 / (1.0 + g * g)));
    const double c = std::cos(theta);
    return c * c;
}

struct GainOptimum {
    double g = 0.0;
    double tau1 = 0.0;
    FidelityValue fidelity{0.0};
    bool unimodal = true;  // coarse pre-scan found a single interior maximum
};

/// Closed form of the optimum at eta = 1 for an ideal Gaussian cloner with a Gaussian amplitude prior.
inline double optimal_coherent_fidelity_reference(double sigma_a2) {
    const double branch = 1.0 + std::sqrt(2.0);
    if (sigma_a2 >= branch) return 2.0 * (1.0 + sigma_a2) / (1.0 + 3.0 * sigma_a2);
    return 2.0 / (2.0 + (3.0 - 2.0 * std::sqrt(2.0)) * sigma_a2);
}

/// Maximises the amplitude-averaged fidelity over the feed-forward gain g in
/// [0, g_max], with tau1 = matched_tau1(g) and tau2 = 1/2.
inline GainOptimum optimal_gain_coherent(double sigma_a2, double eta, PropMode mode = PropMode::Physical,
                                         double g_max = 3.0) {
    if (!(sigma_a2 > 0.0)) throw DomainError("optimal_gain_coherent: sigma_a2 must be positive");
    check_eta(eta);
    auto fidelity_at = [&](double g) {
        return amplitude_averaged_fidelity(ClonerConfig{matched_tau1(g), 0.5, g, eta, mode}, sigma_a2).value();
    };

    constexpr int kScan = 64;
    std::vector<double> grid(kScan + 1);
    std::vector<double> vals(kScan + 1);
    int best = 0;
    for (int i = 0; i <= kScan; ++i) {
        grid[i] = g_max * i / kScan;
        vals[i] = fidelity_at(grid[i]);
        if (vals[i] > vals[best]) best = i;
    }
    int direction_changes = 0;
    for (int i = 1; i < kScan; ++i) {
        const double d0 = vals[i] - vals[i - 1];
        const double d1 = vals[i + 1] - vals[i];
        if (d0 > 0.0 && d1 < 0.0) ++direction_changes;
        if (d0 < 0.0 && d1 > 0.0) ++direction_changes;
    }

    const double lo = grid[std::max(0, best - 1)];
    const double hi = grid[std::min(kScan, best + 1)];
    std::uintmax_t max_iter = 500;
    const auto [g_opt, neg_f] = boost::math::tools::brent_find_minima(
        [&](double g) { return -fidelity_at(g); }, lo, hi, std::numeric_limits<double>::digits / 2 + 4, max_iter);
    if (max_iter >= 500) throw NumericalError("optimal_gain_coherent: bracket search did not converge");

    // Brent never evaluates the bracket end points, which matter when the optimum sits on g = 0.
    GainOptimum out;
    double g_best = g_opt;
    double f_best = -neg_f;
    // Ties within round-off go to the bracket end, so a boundary optimum reports g = 0 exactly.
    for (double edge : {lo, hi}) {
        const double f = fidelity_at(edge);
        if (f >= f_best - 4.0 * std::numeric_limits<double>::epsilon() * std::abs(f_best)) {
            f_best = f;
            g_best = edge;
        }
    }
    out.g = g_best;
    out.tau1 = matched_tau1(g_best);
    out.fidelity = FidelityValue(f_best);
    out.unimodal = direction_changes <= 1;
    return out;
}

}  // namespace linclone
