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

#include "linclone/phase_space.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace linclone {
namespace {

constexpr double kTight = 1e-12;

void ExpectCovNear(const CovMat& c, double g11, double g12, double g22, double tol) {
    EXPECT_NEAR(c.g11(), g11, tol);
    EXPECT_NEAR(c.g12(), g12, tol);
    EXPECT_NEAR(c.g22(), g22, tol);
}

TEST(Vacuum, HasZeroMeanAndHalfIdentity) {
    const GaussianState v = vacuum();
    EXPECT_EQ(v.mean(), QuadVector(0.0, 0.0));
    ExpectCovNear(v.cov(), 0.5, 0.0, 0.5, 0.0);
    EXPECT_DOUBLE_EQ(v.cov().det(), 0.25);
    EXPECT_TRUE(v.is_pure());
}

TEST(Coherent, MeanFollowsQuadratureConvention) {
    const GaussianState c = coherent(1.0, 0.0);
    EXPECT_NEAR(c.mean().x, std::sqrt(2.0), kTight);
    EXPECT_NEAR(c.mean().y, 0.0, kTight);
    ExpectCovNear(c.cov(), 0.5, 0.0, 0.5, 0.0);
    EXPECT_EQ(coherent(0.0, 0.0).mean(), vacuum().mean());
    EXPECT_NEAR(std::abs(coherent({0.3, -1.2}).mean().amplitude() - std::complex<double>(0.3, -1.2)), 0.0, kTight);
}

TEST(Squeezed, ZeroSqueezingIsVacuumCovariance) {
    for (double phi : {0.0, 0.7, 2.0, -1.0}) ExpectCovNear(squeezed({0, 0}, 0.0, phi).cov(), 0.5, 0.0, 0.5, kTight);
}

TEST(Squeezed, UnitSqueezingAlongX) {
    const CovMat c = squeezed({0, 0}, 1.0, 0.0).cov();
    EXPECT_NEAR(c.g11(), 3.69452805, 1e-8);
    EXPECT_NEAR(c.g22(), 0.06766764, 1e-8);
    EXPECT_NEAR(c.g12(), 0.0, kTight);
}

TEST(Squeezed, OffDiagonalSign) {
    // -sinh(2 r) sin(phi) / 2
    const CovMat c = squeezed({0, 0}, 0.5, 0.5 * M_PI).cov();
    EXPECT_NEAR(c.g12(), -0.5 * std::sinh(1.0), kTight);
    EXPECT_NEAR(c.g11(), 0.5 * std::cosh(1.0), kTight);
}

TEST(Squeezed, PureForRandomParameters) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> r(0.0, 3.0);
    std::uniform_real_distribution<double> ph(-M_PI, M_PI);
    for (int i = 0; i < 200; ++i) {
        const GaussianState s = squeezed({r(rng), r(rng)}, r(rng), ph(rng));
        EXPECT_NEAR(s.cov().det(), 0.25, 1e-12 * std::max(1.0, s.cov().trace() * s.cov().trace()));
    }
}

TEST(Squeezed, RejectsNegativeModulus) { EXPECT_THROW(squeezed({0, 0}, -0.1, 0.0), DomainError); }

TEST(Thermal, CovarianceIsShiftedIdentity) {
    ExpectCovNear(thermal({0, 0}, 0.0).cov(), 0.5, 0.0, 0.5, 0.0);
    ExpectCovNear(thermal({0, 0}, 1.0).cov(), 1.5, 0.0, 1.5, 0.0);
    EXPECT_FALSE(thermal({0, 0}, 1.0).is_pure());
    EXPECT_THROW(thermal({0, 0}, -1.0), DomainError);
}

TEST(GaussianState, RejectsUnphysicalCovariance) {
    EXPECT_THROW(GaussianState({0, 0}, CovMat(0.4, 0.0, 0.4)), PhysicalityError);
    EXPECT_THROW(GaussianState({0, 0}, CovMat(1.0, 1.0, 1.0)), PhysicalityError);
    EXPECT_THROW(GaussianState({NAN, 0}, CovMat(1.0, 0.0, 1.0)), PhysicalityError);
    EXPECT_NO_THROW(GaussianState({0, 0}, CovMat(2.0, 0.0, 0.125)));
}

TEST(CovMat, FromMatrixRejectsAsymmetry) {
    Mat2 m;
    m << 1.0, 0.2, 0.3, 1.0;
    EXPECT_THROW(CovMat::from_matrix(m), DomainError);
}

TEST(MeanPhotonNumber, CoherentAndThermal) {
    EXPECT_NEAR(coherent(1.0, 1.0).mean_photon_number(), 2.0, kTight);
    EXPECT_NEAR(thermal({0, 0}, 1.7).mean_photon_number(), 1.7, kTight);
    EXPECT_NEAR(squeezed({0, 0}, 1.0, 0.3).mean_photon_number(), std::sinh(1.0) * std::sinh(1.0), kTight);
}

TEST(BeamSplitter, UnitTransmissivityIsIdentity) {
    EXPECT_LT((bs_symplectic(1.0).matrix() - Mat4::Identity()).cwiseAbs().maxCoeff(), kTight);
}

TEST(BeamSplitter, BalancedBlocks) {
    const Mat4 s = bs_symplectic(0.5).matrix();
    const double h = 1.0 / std::sqrt(2.0);
    Mat4 expected;
    expected << h, 0, h, 0,  //
        0, h, 0, h,          //
        -h, 0, h, 0,         //
        0, -h, 0, h;
    EXPECT_LT((s - expected).cwiseAbs().maxCoeff(), kTight);
}

TEST(BeamSplitter, OrthogonalAndSymplecticOnGrid) {
    for (int i = 0; i <= 100; ++i) {
        const Symplectic4 s = bs_symplectic(i / 100.0);
        EXPECT_LT(s.orthogonality_defect(), kTight) << "tau=" << i / 100.0;
        EXPECT_LT(s.symplectic_defect(), kTight);
    }
    EXPECT_LT(bs_symplectic(0.37).orthogonality_defect(), kTight);
}

TEST(BeamSplitter, RejectsOutOfRange) {
    EXPECT_THROW(bs_symplectic(-0.01), DomainError);
    EXPECT_THROW(bs_symplectic(1.01), DomainError);
}

TEST(ApplySymplectic, IdentityLeavesStateUnchanged) {
    const TwoModeGaussianState s = tensor_with_vacuum(squeezed({0.2, 0.1}, 0.4, 1.0));
    const TwoModeGaussianState t = apply_symplectic(s, Symplectic4());
    EXPECT_LT((t.covariance() - s.covariance()).cwiseAbs().maxCoeff(), kTight);
    EXPECT_LT((t.mean() - s.mean()).cwiseAbs().maxCoeff(), kTight);
}

TEST(ApplySymplectic, VacuumIsInvariant) {
    const TwoModeGaussianState t = apply_symplectic(tensor_with_vacuum(vacuum()), bs_symplectic(0.29));
    EXPECT_LT((t.covariance() - 0.5 * Mat4::Identity()).cwiseAbs().maxCoeff(), kTight);
    EXPECT_LT(t.mean().cwiseAbs().maxCoeff(), kTight);
}

TEST(ApplySymplectic, CoherentSplitsAmplitude) {
    for (double tau : {0.0, 0.2, 0.5, 0.9, 1.0}) {
        const TwoModeGaussianState t = apply_symplectic(tensor_with_vacuum(coherent(1.0, 0.0)), bs_symplectic(tau));
        EXPECT_NEAR(t.mean1().x, std::sqrt(tau) * std::sqrt(2.0), kTight);
        EXPECT_NEAR(t.mean2().x, std::sqrt(1.0 - tau) * std::sqrt(2.0), kTight);
        EXPECT_NEAR(t.mean1().y, 0.0, kTight);
        EXPECT_NEAR(t.mean2().y, 0.0, kTight);
    }
}

TEST(ApplySymplectic, TraceAndMeanNormInvariant) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const GaussianState in = squeezed({2 * u(rng) - 1, 2 * u(rng) - 1}, 1.5 * u(rng), 6.28 * u(rng));
        const TwoModeGaussianState s = tensor_with_vacuum(in);
        const TwoModeGaussianState t = apply_symplectic(s, bs_symplectic(u(rng)));
        const double before = s.covariance().trace() + s.mean().squaredNorm();
        const double after = t.covariance().trace() + t.mean().squaredNorm();
        EXPECT_NEAR(before, after, 1e-12 * before);
        EXPECT_GE(t.uncertainty_margin(), -1e-12);
        EXPECT_GE(t.a().det(), 0.25 - 1e-12);
        EXPECT_GE(t.b().det(), 0.25 - 1e-12);
    }
}

TEST(TensorWithVacuum, BlockStructure) {
    const TwoModeGaussianState t = tensor_with_vacuum(thermal({0, 0}, 2.0));
    ExpectCovNear(t.a(), 2.5, 0.0, 2.5, 0.0);
    ExpectCovNear(t.b(), 0.5, 0.0, 0.5, 0.0);
    EXPECT_EQ(t.c(), Mat2::Zero());
    EXPECT_EQ(t.mean2(), QuadVector(0.0, 0.0));
    EXPECT_EQ(tensor_with_vacuum(coherent(3.0, -2.0)).mean2(), QuadVector(0.0, 0.0));
}

TEST(Marginal, InvertsTensorWithVacuum) {
    const GaussianState s = squeezed({0.5, -0.25}, 0.8, 0.4);
    const GaussianState m1 = marginal(tensor_with_vacuum(s), 1);
    const GaussianState m2 = marginal(tensor_with_vacuum(s), 2);
    EXPECT_EQ(m1.mean(), s.mean());
    EXPECT_EQ(m1.cov(), s.cov());
    EXPECT_EQ(m2.cov(), vacuum().cov());
    EXPECT_EQ(m2.mean(), vacuum().mean());
    EXPECT_THROW(marginal(tensor_with_vacuum(s), 3), DomainError);
}

TEST(Marginal, BalancedSplitOfThermal) {
    const TwoModeGaussianState t = apply_symplectic(tensor_with_vacuum(thermal({0, 0}, 1.0)), bs_symplectic(0.5));
    ExpectCovNear(marginal(t, 1).cov(), 1.0, 0.0, 1.0, kTight);
    ExpectCovNear(marginal(t, 2).cov(), 1.0, 0.0, 1.0, kTight);
}

TEST(Displace, ShiftsMeanOnly) {
    const GaussianState d = displace(vacuum(), {std::sqrt(2.0), 0.0});
    EXPECT_NEAR(d.mean().x, coherent(1.0, 0.0).mean().x, kTight);
    EXPECT_EQ(d.cov(), coherent(1.0, 0.0).cov());
    const GaussianState s = squeezed({0.1, 0.2}, 0.7, 0.3);
    EXPECT_EQ(displace(s, {0, 0}).mean(), s.mean());
    EXPECT_EQ(displace(s, {4.0, -1.0}).cov(), s.cov());
}

TEST(TwoModeGaussianState, RejectsUncertaintyViolation) {
    // Perfectly correlated x and y quadratures with vacuum marginals.
    Mat2 c;
    c << 0.5, 0.0, 0.0, 0.5;
    EXPECT_THROW(TwoModeGaussianState(Vec4::Zero(), CovMat(0.5, 0, 0.5), CovMat(0.5, 0, 0.5), c), PhysicalityError);
    // EPR-like correlations are fine.
    Mat2 epr;
    epr << 1.0, 0.0, 0.0, -1.0;
    EXPECT_NO_THROW(TwoModeGaussianState(Vec4::Zero(), CovMat(1.25, 0, 1.25), CovMat(1.25, 0, 1.25), epr));
}

}  // namespace
}  // namespace linclone
