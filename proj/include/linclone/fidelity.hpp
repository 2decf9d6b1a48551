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

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "linclone/cloner.hpp"
#include "linclone/errors.hpp"
#include "linclone/phase_space.hpp"

namespace linclone {

/// A fidelity in [0, 1].
class FidelityValue {
  public:
    /// Values within 1e-9 above 1 (or below 0) are clamped; anything further out throws.
    explicit FidelityValue(double v) {
        if (!std::isfinite(v) || v > 1.0 + kTol || v < -kTol) {
            std::ostringstream os;
            os << "fidelity out of range: " << v;
            throw NumericalError(os.str());
        }
        v_ = std::clamp(v, 0.0, 1.0);
    }
    double value() const { return v_; }
    operator double() const { return v_; }  // NOLINT(google-explicit-constructor)

    static constexpr double kTol = 1e-9;

  private:
    double v_ = 0.0;
};

/// Uhlmann fidelity between two single-mode Gaussian states,
///   F = exp{-d^T (sa + sb)^-1 d / 2} / (sqrt(Det[sa + sb] + delta) - sqrt(delta)),
///   delta = 4 (Det sa - 1/4)(Det sb - 1/4),  d = mean difference.
/// Symmetric in its arguments.
inline FidelityValue gaussian_fidelity(const GaussianState& a, const GaussianState& b) {
    const CovMat sum = a.cov() + b.cov();
    const double det_sum = sum.det();
    if (!(det_sum > 0.0)) throw NumericalError("gaussian_fidelity: singular covariance sum");

    // Det - 1/4, snapped to zero within the round-off of the determinant so that
    // pure states stay exactly pure (the square root below amplifies any residue).
    auto excess = [](const CovMat& c) {
        const double e = c.det() - 0.25;
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                             (std::abs(c.g11() * c.g22()) + c.g12() * c.g12() + 0.25);
        return std::abs(e) <= noise ? 0.0 : e;
    };
    double delta = 4.0 * excess(a.cov()) * excess(b.cov());
    if (delta < 0.0) delta = 0.0;

    const Vec2 d = (a.mean() - b.mean()).vec();
    const double quad = d.dot(sum.matrix().inverse() * d);
    // sqrt(x + delta) - sqrt(delta) = x / (sqrt(x + delta) + sqrt(delta)) avoids cancellation
    // for strongly mixed pairs.
    const double denom = det_sum / (std::sqrt(det_sum + delta) + std::sqrt(delta));
    return FidelityValue(std::exp(-0.5 * quad) / denom);
}

/// Symmetric-point (tau1 = tau2 = 1/2, g = 1) coherent-state fidelity 2 eta / (1 + 2 eta).
inline FidelityValue coherent_clone_fidelity(double eta) {
    check_eta(eta);
    return FidelityValue(2.0 * eta / (1.0 + 2.0 * eta));
}

/// Symmetric-point fidelity for a squeezed input of modulus |xi|:
///   4 / sqrt((5 + 2 Delta^2)^2 + 16 (1 + 2 Delta^2) sinh^2 |xi|).
/// Independent of the squeezing phase and the displacement.
inline FidelityValue squeezed_clone_fidelity(double xi_mod, double eta) {
    if (!(xi_mod >= 0.0)) throw DomainError("squeezed_clone_fidelity: |xi| must be non-negative");
    const double d2 = delta_squared(eta);
    const double sh = std::sinh(xi_mod);
    const double a = 5.0 + 2.0 * d2;
    return FidelityValue(4.0 / std::sqrt(a * a + 16.0 * (1.0 + 2.0 * d2) * sh * sh));
}

/// Symmetric-point fidelity for a thermal input with N photons at eta = 1:
///   1 / (3/2 + N (3 + 2N) - sqrt(N (2N + 1)(2N^2 + 5N + 3))).
inline FidelityValue thermal_clone_fidelity(double n_thermal) {
    if (!(n_thermal >= 0.0)) throw DomainError("thermal_clone_fidelity: N must be non-negative");
    const double n = n_thermal;
    const double root = std::sqrt(n * (2.0 * n + 1.0) * (2.0 * n * n + 5.0 * n + 3.0));
    // a - root with a^2 - root^2 = 9/4 + 6N + 4N^2 = (2N + 3/2)^2; keeps precision at large N.
    const double a = 1.5 + n * (3.0 + 2.0 * n);
    const double b = 2.0 * n + 1.5;
    return FidelityValue((a + root) / (b * b));
}

/// Fidelity of clone `k` (1 or 2) with its input, through the full pipeline.
inline FidelityValue clone_fidelity(const GaussianState& input, const ClonerConfig& cfg, int k = 1) {
    const CloneOutput out = run_cloner(input, cfg);
    return gaussian_fidelity(input, k == 1 ? out.clone1 : out.clone2);
}

}  // namespace linclone
