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

// Monte Carlo unravelling of the measure-and-feed-forward loop. Each trajectory
// draws a double-homodyne record, conditions the transmitted mode on it,
// displaces by g times the record and splits the result at the second beam
// splitter. Averaging the conditional Gaussian states reproduces the analytic
// outcome-averaged clones.
//
// Trajectory i always uses the random stream derived from (seed, i), so results
// do not depend on the number of worker threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "linclone/cloner.hpp"
#include "linclone/errors.hpp"
#include "linclone/phase_space.hpp"

namespace linclone {

/// Measured record in quadrature units (sqrt(2) (Re alpha, Im alpha)).
struct Outcome {
    QuadVector m;
};

using Rng = std::mt19937_64;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Independent generator for trajectory `index` of a run seeded with `seed`.
inline Rng trajectory_stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(detail::splitmix64(detail::splitmix64(seed) ^ detail::splitmix64(~index)));
}

/// Draw from the bivariate normal N(dist.mean, dist.cov).
template <class Generator>
Outcome sample_outcome(const Moments& dist, Generator& rng) {
    const CovMat& s = dist.cov;
    if (!s.positive_definite(0.0)) throw DomainError("sample_outcome: covariance must be positive definite");
    // Cholesky factor of [[s11, s12], [s12, s22]].
    const double l11 = std::sqrt(s.g11());
    const double l21 = s.g12() / l11;
    const double l22 = std::sqrt(s.g22() - l21 * l21);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double z1 = normal(rng);
    const double z2 = normal(rng);
    return {{dist.mean.x + l11 * z1, dist.mean.y + l21 * z1 + l22 * z2}};
}

/// State of mode 1 given record m on mode 2:
///   cov  = A - C Sigma^-1 C^T            (independent of m)
///   mean = X1 + C Sigma^-1 (m - X2)
inline GaussianState conditional_state(const TwoModeGaussianState& two_mode, const Outcome& outcome, double eta) {
    const Moments dist = outcome_statistics(two_mode, eta);
    const Mat2 gain = two_mode.c() * dist.cov.matrix().inverse();
    const Mat2 cov = two_mode.a().matrix() - gain * two_mode.c().transpose();
    const Vec2 mean = two_mode.mean1().vec() + gain * (outcome.m - dist.mean).vec();
    return {QuadVector(mean), CovMat::from_matrix(0.5 * (cov + cov.transpose()))};
}

/// Running moments of a Gaussian mixture with equal weights: mean of the
/// component means, and E[cov] + Cov[means] for the mixture covariance.
class MomentAccumulator {
  public:
    void add(const QuadVector& mean, const CovMat& cov) {
        ++count_;
        const Vec2 x = mean.vec();
        const Vec2 d = x - mean_;
        mean_ += d / static_cast<double>(count_);
        m2_ += d * (x - mean_).transpose();
        cov_sum_ += cov.matrix();
    }

    /// Chan et al. pairwise combination; associative and commutative up to rounding.
    void merge(const MomentAccumulator& other) {
        if (other.count_ == 0) return;
        if (count_ == 0) {
            *this = other;
            return;
        }
        const double na = static_cast<double>(count_);
        const double nb = static_cast<double>(other.count_);
        const double n = na + nb;
        const Vec2 d = other.mean_ - mean_;
        mean_ += d * (nb / n);
        m2_ += other.m2_ + d * d.transpose() * (na * nb / n);
        cov_sum_ += other.cov_sum_;
        count_ += other.count_;
    }

    std::uint64_t count() const { return count_; }
    QuadVector mean() const { return QuadVector(mean_); }
    /// Unbiased sample covariance of the component means.
    Mat2 mean_spread() const {
        if (count_ < 2) return Mat2::Zero();
        const Mat2 s = m2_ / static_cast<double>(count_ - 1);
        return 0.5 * (s + s.transpose());
    }
    Mat2 average_component_cov() const {
        return count_ == 0 ? Mat2::Zero() : Mat2(cov_sum_ / static_cast<double>(count_));
    }
    Moments mixture() const {
        return {mean(), CovMat::from_matrix(average_component_cov() + mean_spread())};
    }
    /// Standard error of each mean component.
    Vec2 standard_error() const {
        if (count_ < 2) return Vec2::Constant(std::numeric_limits<double>::infinity());
        return (mean_spread().diagonal() / static_cast<double>(count_)).cwiseSqrt();
    }

  private:
    std::uint64_t count_ = 0;
    Vec2 mean_ = Vec2::Zero();
    Mat2 m2_ = Mat2::Zero();
    Mat2 cov_sum_ = Mat2::Zero();
};

struct TrajectorySample {
    Outcome outcome;
    GaussianState post_feedforward;
};

struct TrajectoryBatch {
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::vector<TrajectorySample> samples;
};

struct TrajectoryResult {
    MomentAccumulator clone1;
    MomentAccumulator clone2;
    TrajectoryBatch batch;
};

struct TrajectoryOptions {
    unsigned threads = 0;            // 0: hardware concurrency
    std::uint64_t chunk = 4096;      // trajectories per work item
    bool keep_samples = true;
};

/// Simulates `n` feed-forward trajectories. Always follows the physical
/// (g^2) propagation; cfg.mode is ignored.
inline TrajectoryResult run_trajectories(const GaussianState& input, const ClonerConfig& cfg, std::uint64_t n,
                                         std::uint64_t seed, TrajectoryOptions opts = {}) {
    cfg.validate();
    if (n < 1) throw DomainError("run_trajectories: n must be >= 1");
    if (opts.chunk < 1) opts.chunk = 1;

    const TwoModeGaussianState after_bs1 = apply_symplectic(tensor_with_vacuum(input), bs_symplectic(cfg.tau1));
    const Moments dist = outcome_statistics(after_bs1, cfg.eta);
    const double t2 = std::sqrt(cfg.tau2);
    const double r2 = std::sqrt(1.0 - cfg.tau2);

    // The conditional covariance does not depend on the record, so neither do the
    // clone covariances; only the means are propagated per trajectory.
    const GaussianState reference = conditional_state(after_bs1, Outcome{dist.mean}, cfg.eta);
    const CovMat cov1 = cfg.tau2 * reference.cov() + CovMat::scaled_identity(0.5 * (1.0 - cfg.tau2));
    const CovMat cov2 = (1.0 - cfg.tau2) * reference.cov() + CovMat::scaled_identity(0.5 * cfg.tau2);

    TrajectoryResult result;
    result.batch.n = n;
    result.batch.seed = seed;
    if (opts.keep_samples) result.batch.samples.resize(n, TrajectorySample{Outcome{}, GaussianState{}});

    const std::uint64_t chunks = (n + opts.chunk - 1) / opts.chunk;
    std::vector<MomentAccumulator> acc1(chunks);
    std::vector<MomentAccumulator> acc2(chunks);

    auto run_chunk = [&](std::uint64_t c) {
        const std::uint64_t lo = c * opts.chunk;
        const std::uint64_t hi = std::min(n, lo + opts.chunk);
        for (std::uint64_t i = lo; i < hi; ++i) {
            Rng rng = trajectory_stream(seed, i);
            const Outcome outcome = sample_outcome(dist, rng);
            const GaussianState cond = conditional_state(after_bs1, outcome, cfg.eta);
            const GaussianState post = displace(cond, cfg.g * outcome.m);
            acc1[c].add(t2 * post.mean(), cov1);
            acc2[c].add(r2 * post.mean(), cov2);
            if (opts.keep_samples) result.batch.samples[i] = TrajectorySample{outcome, post};
        }
    };

    unsigned threads = opts.threads != 0 ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunks));
    if (threads <= 1) {
        for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                for (std::uint64_t c = w; c < chunks; c += threads) run_chunk(c);
            });
        }
        for (auto& t : pool) t.join();
    }

    // Fixed merge order keeps the reduction bitwise reproducible.
    for (std::uint64_t c = 0; c < chunks; ++c) {
        result.clone1.merge(acc1[c]);
        result.clone2.merge(acc2[c]);
    }
    return result;
}

/// Largest |z| over mean components and mixture-covariance entries of one clone,
/// comparing empirical moments against an analytic target.
inline double max_abs_z_score(const MomentAccumulator& acc, const GaussianState& analytic) {
    const double n = static_cast<double>(acc.count());
    double z = 0.0;
    const Vec2 se = acc.standard_error();
    const Vec2 dmean = (acc.mean() - analytic.mean()).vec();
    for (int k = 0; k < 2; ++k) {
        if (se(k) > 0.0) z = std::max(z, std::abs(dmean(k)) / se(k));
    }
    // Only the spread of the means is sampled; E[cov] is exact.
    const Mat2 spread = acc.mean_spread();
    const Mat2 target_spread = analytic.cov().matrix() - acc.average_component_cov();
    const double v11 = target_spread(0, 0);
    const double v22 = target_spread(1, 1);
    const double v12 = target_spread(0, 1);
    const double se11 = std::sqrt(2.0 / (n - 1.0)) * v11;
    const double se22 = std::sqrt(2.0 / (n - 1.0)) * v22;
    const double se12 = std::sqrt((v11 * v22 + v12 * v12) / (n - 1.0));
    if (se11 > 0.0) z = std::max(z, std::abs(spread(0, 0) - v11) / se11);
    if (se22 > 0.0) z = std::max(z, std::abs(spread(1, 1) - v22) / se22);
    if (se12 > 0.0) z = std::max(z, std::abs(spread(0, 1) - v12) / se12);
    return z;
}

}  // namespace linclone
