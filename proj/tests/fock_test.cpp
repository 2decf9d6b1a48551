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

#include "linclone/fock.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "linclone/fidelity.hpp"

namespace linclone {
namespace {

void ExpectMomentsNear(const Moments& m, const GaussianState& s, double tol) {
    EXPECT_NEAR(m.mean.x, s.mean().x, tol);
    EXPECT_NEAR(m.mean.y, s.mean().y, tol);
    EXPECT_NEAR(m.cov.g11(), s.cov().g11(), tol);
    EXPECT_NEAR(m.cov.g12(), s.cov().g12(), tol);
    EXPECT_NEAR(m.cov.g22(), s.cov().g22(), tol);
}

// Mixed state with mean photon number at most about 4.
GaussianState random_mixed(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double n_th = u(rng);
    const CovMat pure = squeezed_covariance(0.6 * u(rng), 6.283 * u(rng));
    const std::complex<double> alpha = std::polar(u(rng), 6.283 * u(rng));
    return {QuadVector::from_amplitude(alpha), (2.0 * n_th + 1.0) * pure};
}

TEST(CoherentKet, NormAndOverlap) {
    const CVec a = fock::coherent_ket({0.7, -0.4}, 60);
    const CVec b = fock::coherent_ket({-0.2, 0.5}, 60);
    EXPECT_NEAR(a.squaredNorm(), 1.0, 1e-14);
    EXPECT_NEAR(std::norm(a.dot(b)), std::exp(-std::norm(cplx(0.9, -0.9))), 1e-14);
}

TEST(Displacement, MatchesMatrixExponential) {
    const int dim = 30;
    const cplx alpha{0.6, 0.3};
    const CMat a = fock::annihilation(dim + 60);
    const CMat gen = alpha * a.adjoint() - std::conj(alpha) * a;
    const CMat ref = CMat(gen.exp()).topLeftCorner(dim, dim);
    EXPECT_LT((fock::displacement(alpha, dim, dim) - ref).cwiseAbs().maxCoeff(), 1e-12);
    const FockOperator op{fock::displacement(alpha, 80, 80)};
    // Unitary away from the truncation edge.
    const CMat inner = op.m.leftCols(40);
    EXPECT_LT((inner.adjoint() * inner - CMat::Identity(40, 40)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Squeeze, VacuumAmplitudes) {
    // <2n|S(r)|0> = tanh(r)^n sqrt((2n)!) / (2^n n! sqrt(cosh r))
    const double r = 0.5;
    const CMat s = fock::squeeze(r, 20);
    double coeff = 1.0 / std::sqrt(std::cosh(r));
    for (int n = 0; n < 10; ++n) {
        EXPECT_NEAR(s(2 * n, 0).real(), coeff, 1e-12) << n;
        EXPECT_NEAR(s(2 * n + 1, 0).real(), 0.0, 1e-12);
        coeff *= std::tanh(r) * std::sqrt((2.0 * n + 1.0) * (2.0 * n + 2.0)) / (2.0 * (n + 1));
    }
}

TEST(BeamSplitterIsometry, IsometricAndSplitsAmplitude) {
    const int dim = 25;
    for (double tau : {0.0, 0.3, 0.5, 0.9, 1.0}) {
        const CMat v = fock::beam_splitter_with_vacuum(tau, dim);
        EXPECT_LT((v.adjoint() * v - CMat::Identity(dim, dim)).cwiseAbs().maxCoeff(), 1e-12);
        const FockDensityMatrix in = to_fock(coherent(0.8, 0.3), dim, 1e-6);
        const CMat joint = v * in.rho * v.adjoint();
        const Moments m1 = moments({fock::split_and_trace(v, in.rho, dim, 1), 0.0});
        const Moments m2 = moments({fock::split_and_trace(v, in.rho, dim, 2), 0.0});
        EXPECT_NEAR(joint.trace().real(), in.trace(), 1e-12);
        EXPECT_NEAR(m1.mean.x, std::sqrt(tau) * std::sqrt(2.0) * 0.8, 1e-8);
        EXPECT_NEAR(m1.mean.y, std::sqrt(tau) * std::sqrt(2.0) * 0.3, 1e-8);
        EXPECT_NEAR(m2.mean.x, std::sqrt(1.0 - tau) * std::sqrt(2.0) * 0.8, 1e-8);
        EXPECT_NEAR(m2.mean.y, std::sqrt(1.0 - tau) * std::sqrt(2.0) * 0.3, 1e-8);
    }
    EXPECT_THROW(fock::beam_splitter_with_vacuum(1.5, 4), DomainError);
}

TEST(BeamSplitterIsometry, MatchesPhaseSpaceForSqueezedThermal) {
    const GaussianState in({0.4, -0.2}, 1.6 * squeezed_covariance(0.4, 0.9));
    const int dim = 40;
    const CMat v = fock::beam_splitter_with_vacuum(0.35, dim);
    const FockDensityMatrix f = to_fock(in, dim);
    const TwoModeGaussianState out = apply_symplectic(tensor_with_vacuum(in), bs_symplectic(0.35));
    ExpectMomentsNear(moments({fock::split_and_trace(v, f.rho, dim, 1), 0.0}), marginal(out, 1), 1e-8);
    ExpectMomentsNear(moments({fock::split_and_trace(v, f.rho, dim, 2), 0.0}), marginal(out, 2), 1e-8);
}

TEST(ToFock, Vacuum) {
    const FockDensityMatrix f = to_fock(vacuum(), 10);
    CMat expected = CMat::Zero(10, 10);
    expected(0, 0) = 1.0;
    EXPECT_LT((f.rho - expected).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT(f.leakage, 1e-14);
}

TEST(ToFock, ThermalIsGeometric) {
    const FockDensityMatrix f = to_fock(thermal({0, 0}, 1.0), 60);
    for (int m = 0; m < 60; ++m) {
        EXPECT_NEAR(f.rho(m, m).real(), 0.5 * std::pow(0.5, m), 1e-14);
        for (int k = 0; k < 60; ++k) {
            if (k != m) {
                EXPECT_EQ(std::abs(f.rho(m, k)), 0.0);
            }
        }
    }
}

TEST(ToFock, SqueezedMoments) {
    const Moments m = moments(to_fock(squeezed({0, 0}, 0.5, 0.0), 60));
    EXPECT_NEAR(m.cov.g11(), std::exp(1.0) / 2.0, 1e-6);
    EXPECT_NEAR(m.cov.g22(), std::exp(-1.0) / 2.0, 1e-6);
    EXPECT_NEAR(m.cov.g12(), 0.0, 1e-6);
}

TEST(ToFock, InsufficientTruncationThrows) {
    EXPECT_THROW(to_fock(coherent(3.0, 0.0), 10), NumericalError);
    EXPECT_THROW(to_fock(vacuum(), 0), DomainError);
}

TEST(ToFock, ValidDensityMatrix) {
    const FockDensityMatrix f = to_fock(GaussianState({0.5, 0.5}, 2.0 * squeezed_covariance(0.5, 1.0)), 60);
    EXPECT_NEAR(f.trace(), 1.0, 1e-8);
    EXPECT_LT(f.hermiticity_defect(), 1e-14);
    EXPECT_GT(f.min_eigenvalue(), -1e-9);
}

TEST(ToFock, MomentRoundTrip) {
    std::mt19937_64 rng(71);
    for (int i = 0; i < 30; ++i) {
        const GaussianState s = random_mixed(rng);
        ASSERT_LE(s.mean_photon_number(), 6.0);
        ExpectMomentsNear(moments(to_fock(s, 80)), s, 1e-6);
    }
}

TEST(Moments, KnownStates) {
    const Moments v = moments(to_fock(vacuum(), 5));
    ExpectMomentsNear(v, vacuum(), 1e-14);
    const Moments c = moments(to_fock(coherent(1.0, 0.0), 40));
    EXPECT_NEAR(c.mean.x, std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(c.mean.y, 0.0, 1e-12);
    const Moments t = moments(to_fock(thermal({0, 0}, 2.0), 80));
    EXPECT_NEAR(t.cov.g11(), 2.5, 1e-9);
    EXPECT_NEAR(t.cov.g22(), 2.5, 1e-9);
}

TEST(UhlmannFidelity, KnownPairs) {
    const FockDensityMatrix th = to_fock(thermal({0, 0}, 1.0), 60);
    EXPECT_NEAR(uhlmann_fidelity_fock(th, th), 1.0, 1e-10);
    EXPECT_NEAR(uhlmann_fidelity_fock(to_fock(vacuum(), 60), th), 0.5, 1e-8);
    EXPECT_NEAR(uhlmann_fidelity_fock(to_fock(coherent(0, 0), 60), to_fock(coherent(1, 0), 60)), std::exp(-1.0),
                1e-8);
    EXPECT_THROW(uhlmann_fidelity_fock(to_fock(vacuum(), 5), to_fock(vacuum(), 6)), DomainError);
}

TEST(UhlmannFidelity, RejectsNonPositiveInput) {
    FockDensityMatrix bad{CMat::Identity(3, 3) * 0.5, 0.0};
    bad.rho(2, 2) = -0.1;
    EXPECT_THROW(uhlmann_fidelity_fock(bad, to_fock(vacuum(), 3)), NumericalError);
}

TEST(UhlmannFidelity, AgreesWithGaussianFormulaOnRandomPairs) {
    std::mt19937_64 rng(73);
    for (int i = 0; i < 50; ++i) {
        const GaussianState a = random_mixed(rng);
        const GaussianState b = random_mixed(rng);
        const double fock = uhlmann_fidelity_fock(to_fock(a, 60, 1e-6), to_fock(b, 60, 1e-6));
        EXPECT_NEAR(fock, gaussian_fidelity(a, b), 1e-6) << i;
    }
}

struct ChannelCase {
    const char* name;
    GaussianState input;
    int dim;
};

class ClonerChannel : public ::testing::TestWithParam<ChannelCase> {};

TEST_P(ClonerChannel, MatchesPhaseSpacePipeline) {
    const ChannelCase& c = GetParam();
    const FockDensityMatrix in = to_fock(c.input, c.dim);
    const FockCloneResult out = apply_cloner_fock(in, 1.0);
    const CloneOutput ref = run_cloner(c.input, ClonerConfig{});
    EXPECT_NEAR(out.clone1.trace(), 1.0, 1e-4);
    EXPECT_NEAR(out.clone2.trace(), 1.0, 1e-4);
    ExpectMomentsNear(moments(out.clone1), ref.clone1, 1e-3);
    ExpectMomentsNear(moments(out.clone2), ref.clone2, 1e-3);
    ExpectMomentsNear(moments(out.displaced), ref.displaced, 1e-3);
    const FockDensityMatrix wide_in = to_fock(c.input, out.clone1.dim());
    EXPECT_NEAR(uhlmann_fidelity_fock(wide_in, out.clone1), gaussian_fidelity(c.input, ref.clone1), 1e-3);
}

INSTANTIATE_TEST_SUITE_P(Inputs, ClonerChannel,
                         ::testing::Values(ChannelCase{"vacuum", vacuum(), 20},
                                           ChannelCase{"coherent", coherent(0.5, 0.0), 25},
                                           ChannelCase{"thermal", thermal({0, 0}, 1.0), 30},
                                           ChannelCase{"squeezed", squeezed({0, 0}, 0.5, 0.0), 30}),
                         [](const auto& info) { return std::string(info.param.name); });

TEST(ClonerChannel, KnownFidelities) {
    const FockCloneResult vac = apply_cloner_fock(to_fock(vacuum(), 20), 1.0);
    const Moments m = moments(vac.clone1);
    EXPECT_NEAR(m.cov.g11(), 1.0, 1e-3);
    EXPECT_NEAR(m.cov.g22(), 1.0, 1e-3);

    const GaussianState coh = coherent(0.5, 0.0);
    const FockCloneResult c = apply_cloner_fock(to_fock(coh, 25), 1.0);
    EXPECT_NEAR(uhlmann_fidelity_fock(to_fock(coh, c.clone1.dim()), c.clone1), 2.0 / 3.0, 1e-3);

    const GaussianState th = thermal({0, 0}, 1.0);
    const FockCloneResult t = apply_cloner_fock(to_fock(th, 30), 1.0);
    EXPECT_NEAR(uhlmann_fidelity_fock(to_fock(th, t.clone1.dim()), t.clone1), 0.977732, 1e-3);
}

TEST(ClonerChannel, LossyDetection) {
    const GaussianState coh = coherent(0.3, 0.2);
    const FockCloneResult out = apply_cloner_fock(to_fock(coh, 20), 0.75);
    const CloneOutput ref = run_cloner(coh, ClonerConfig{0.5, 0.5, 1.0, 0.75});
    ExpectMomentsNear(moments(out.clone1), ref.clone1, 1e-3);
    EXPECT_NEAR(uhlmann_fidelity_fock(to_fock(coh, out.clone1.dim()), out.clone1), 0.6, 1e-3);
}

TEST(ClonerChannel, AsymmetricConfiguration) {
    const GaussianState in = squeezed({0.2, -0.1}, 0.3, 0.7);
    const ClonerConfig cfg{0.3, 0.65, 1.2, 1.0};
    const FockCloneResult out = apply_cloner_fock(to_fock(in, 25), cfg);
    const CloneOutput ref = run_cloner(in, cfg);
    ExpectMomentsNear(moments(out.clone1), ref.clone1, 1e-3);
    ExpectMomentsNear(moments(out.clone2), ref.clone2, 1e-3);
}

TEST(ClonerChannel, ThreadCountDoesNotChangeResult) {
    const FockDensityMatrix in = to_fock(coherent(0.4, 0.1), 15);
    OutcomeGrid one{};
    one.points = 41;
    one.threads = 1;
    OutcomeGrid three = one;
    three.threads = 3;
    const FockCloneResult a = apply_cloner_fock(in, 1.0, one);
    const FockCloneResult b = apply_cloner_fock(in, 1.0, three);
    EXPECT_EQ((a.clone1.rho - b.clone1.rho).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ClonerChannel, CoarseGridDetected) {
    OutcomeGrid coarse{};
    coarse.points = 5;
    coarse.half_width_sigmas = 1.0;
    EXPECT_THROW(apply_cloner_fock(to_fock(vacuum(), 10), 1.0, coarse), NumericalError);
}

}  // namespace
}  // namespace linclone
