// Copyright 2026 The gbsmps Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gbsmps/gaussian.hpp"

#include <cmath>
#include <cstring>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace gbsmps {
namespace {

using testing::max_abs_diff;
using testing::random_covariance;
using testing::random_symplectic;

TEST(Omega, SingleModeMatchesCanonicalForm) {
  MatrixR expected(2, 2);
  expected << 0, 1, -1, 0;
  EXPECT_EQ(omega(1), expected);
}

TEST(Omega, TwoModeBlockStructure) {
  const MatrixR om = omega(2);
  EXPECT_EQ(om.topRightCorner(2, 2), MatrixR::Identity(2, 2));
  EXPECT_EQ(om.bottomLeftCorner(2, 2), -MatrixR::Identity(2, 2));
  EXPECT_TRUE(om.topLeftCorner(2, 2).isZero());
  EXPECT_TRUE(om.bottomRightCorner(2, 2).isZero());
}

TEST(Omega, SquaresToMinusIdentity) {
  const MatrixR om = omega(3);
  EXPECT_EQ(om * om, -MatrixR::Identity(6, 6));
  EXPECT_EQ(om.transpose(), -om);
}

TEST(ValidateCovariance, VacuumAndPureSqueezedAreValid) {
  EXPECT_TRUE(validate_covariance(MatrixR::Identity(4, 4)).ok);
  MatrixR sq(2, 2);
  sq << std::exp(2.0), 0, 0, std::exp(-2.0);
  EXPECT_TRUE(validate_covariance(sq).ok);
}

TEST(ValidateCovariance, ReportsUncertaintyViolation) {
  const CovarianceReport report = validate_covariance(0.5 * MatrixR::Identity(2, 2));
  EXPECT_FALSE(report.ok);
  // eigenvalues of 0.5 + i omega are 0.5 +- 1
  EXPECT_NEAR(report.min_eigenvalue, -0.5, 1e-12);
  EXPECT_NE(report.message.find("uncertainty"), std::string::npos);
}

TEST(ValidateCovariance, RejectsOddDimensionAndAsymmetry) {
  EXPECT_FALSE(validate_covariance(MatrixR::Identity(3, 3)).ok);
  MatrixR V = MatrixR::Identity(2, 2) * 2.0;
  V(0, 1) = 0.1;
  EXPECT_FALSE(validate_covariance(V).ok);
  EXPECT_THROW(CovMatrix(MatrixR::Identity(3, 3)), ValidationError);
}

TEST(SqueezedInput, DiagonalEntries) {
  EXPECT_EQ(squeezed_input(VectorR::Zero(1)).matrix(), MatrixR::Identity(2, 2));
  const CovMatrix V = squeezed_input(VectorR::Constant(1, 1.0));
  EXPECT_NEAR(V(0, 0), 7.389056, 1e-6);
  EXPECT_NEAR(V(1, 1), 0.135335, 1e-6);
  EXPECT_NEAR(mean_photon(V), 1.381098, 1e-6);
  EXPECT_NEAR(mean_photon(V), std::pow(std::sinh(1.0), 2), 1e-12);
}

TEST(ApplyLoss, LimitsAndHalfTransmission) {
  const CovMatrix V = squeezed_input(VectorR::Constant(1, 1.0));
  EXPECT_LT(max_abs_diff(apply_loss(V, 1.0).matrix(), V.matrix()), 1e-15);
  EXPECT_LT(max_abs_diff(apply_loss(V, 0.0).matrix(), MatrixR::Identity(2, 2)), 1e-15);
  const CovMatrix lossy = apply_loss(V, 0.5);
  EXPECT_NEAR(lossy(0, 0), 4.194528, 1e-6);
  EXPECT_NEAR(lossy(1, 1), 0.567668, 1e-6);
}

TEST(ApplyLoss, PerModeMatchesUniformWhenEqual) {
  RandomStream rng(11);
  const CovMatrix V = random_covariance(3, rng);
  const CovMatrix a = apply_loss(V, 0.3);
  const CovMatrix b = apply_loss(V, VectorR::Constant(3, 0.3));
  EXPECT_LT(max_abs_diff(a.matrix(), b.matrix()), 1e-14);
  EXPECT_LT(max_abs_diff(a.matrix(), 0.3 * V.matrix() + 0.7 * MatrixR::Identity(6, 6)), 1e-12);
}

TEST(ApplyLoss, RejectsOutOfRange) {
  EXPECT_THROW(apply_loss(CovMatrix::vacuum(1), 1.2), ValidationError);
  EXPECT_THROW(apply_loss(CovMatrix::vacuum(2), VectorR::Constant(2, -0.1)), ValidationError);
}

TEST(ApplyPassive, IdentityAndEnergyConservation) {
  RandomStream rng(5);
  const CovMatrix V = random_covariance(3, rng);
  EXPECT_LT(max_abs_diff(apply_passive(V, MatrixC::Identity(3, 3)).matrix(), V.matrix()), 1e-15);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const CovMatrix W = apply_passive(V, haar_unitary(3, seed));
    EXPECT_NEAR(mean_photon(W), mean_photon(V), 1e-10 * std::abs(mean_photon(V)));
  }
}

TEST(ApplyPassive, BalancedBeamSplitterSymmetrizesDiagonal) {
  const Real r = 0.7;
  VectorR rin(2);
  rin << r, 0.0;
  MatrixC bs(2, 2);
  bs << 1, 1, -1, 1;
  bs /= std::sqrt(2.0);
  const CovMatrix out = apply_passive(squeezed_input(rin), bs);
  EXPECT_NEAR(out(0, 0), out(1, 1), 1e-14);
  EXPECT_NEAR(out(2, 2), out(3, 3), 1e-14);
}

TEST(ApplyPassive, RejectsNonUnitary) {
  MatrixC U = MatrixC::Identity(2, 2);
  U(0, 1) = 0.1;
  EXPECT_THROW(apply_passive(CovMatrix::vacuum(2), U), ValidationError);
}

TEST(MeanPhoton, ThermalAndTmsv) {
  EXPECT_EQ(mean_photon(CovMatrix::vacuum(3)), 0.0);
  EXPECT_NEAR(mean_photon(CovMatrix(3.0 * MatrixR::Identity(2, 2))), 1.0, 1e-15);
  EXPECT_NEAR(mean_photon(tmsv_covariance(0.5)), 0.543081, 1e-6);
}

TEST(Williamson, ThermalState) {
  const WilliamsonResult w = williamson(CovMatrix(3.0 * MatrixR::Identity(2, 2)));
  EXPECT_NEAR(w.nu(0), 3.0, 1e-12);
  const MatrixR& S = w.S.matrix();
  EXPECT_LT(max_abs_diff(S * S.transpose(), MatrixR::Identity(2, 2)), 1e-12);
  EXPECT_NEAR(w.thermal_means()(0), 1.0, 1e-12);
}

TEST(Williamson, PureSqueezedState) {
  const WilliamsonResult w = williamson(squeezed_input(VectorR::Constant(1, 1.0)));
  EXPECT_NEAR(w.nu(0), 1.0, 1e-12);
  MatrixR expected = MatrixR::Zero(2, 2);
  expected(0, 0) = std::exp(1.0);
  expected(1, 1) = std::exp(-1.0);
  EXPECT_LT(max_abs_diff(w.S.matrix().cwiseAbs(), expected), 1e-10);
}

TEST(Williamson, RandomReconstructionProperty) {
  RandomStream rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 1 + trial % 8;
    const CovMatrix V = random_covariance(m, rng);
    const WilliamsonResult w = williamson(V);
    const MatrixR& S = w.S.matrix();
    VectorR d(2 * m);
    d << w.nu, w.nu;
    const MatrixR rebuilt = S * d.asDiagonal() * S.transpose();
    const Real scale = V.matrix().cwiseAbs().maxCoeff();
    EXPECT_LT(max_abs_diff(rebuilt, V.matrix()) / scale, 1e-8) << "M=" << m;
    EXPECT_LT(max_abs_diff(S * omega(m) * S.transpose(), omega(m)), 1e-8);
    for (int i = 0; i < m; ++i) EXPECT_GE(w.nu(i), 1.0 - 1e-9);
    for (int i = 1; i < m; ++i) EXPECT_GE(w.nu(i - 1), w.nu(i));
  }
}

TEST(Williamson, DegenerateSpectrum) {
  RandomStream rng(9);
  const MatrixR S = random_symplectic(3, rng);
  const CovMatrix V(2.5 * S * S.transpose());
  const WilliamsonResult w = williamson(V);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(w.nu(i), 2.5, 1e-9);
  VectorR d = VectorR::Constant(6, 2.5);
  EXPECT_LT(max_abs_diff(w.S.matrix() * d.asDiagonal() * w.S.matrix().transpose(), V.matrix()),
            1e-8 * V.matrix().norm());
}

TEST(Williamson, RejectsIndefinite) {
  MatrixR V = MatrixR::Identity(2, 2);
  V(1, 1) = -1.0;
  EXPECT_THROW(williamson(CovMatrix(V)), ValidationError);
}

TEST(Williamson, PurityDetector) {
  RandomStream rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixR S = random_symplectic(3, rng);
    EXPECT_TRUE(is_pure(CovMatrix(S * S.transpose())));
    EXPECT_FALSE(is_pure(CovMatrix(1.01 * S * S.transpose())));
  }
}

TEST(BlochMessiah, Identity) {
  const GaussianUnitaryFactors f = bloch_messiah(SymplecticMatrix::identity(2));
  EXPECT_LT(f.r.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((f.U2 * f.U1 - MatrixC::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BlochMessiah, SingleModeSqueezer) {
  MatrixR S = MatrixR::Zero(2, 2);
  S(0, 0) = std::exp(1.0);
  S(1, 1) = std::exp(-1.0);
  const GaussianUnitaryFactors f = bloch_messiah(SymplecticMatrix(S));
  EXPECT_NEAR(f.r(0), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(f.U1(0, 0)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(f.U2(0, 0)), 1.0, 1e-12);
}

TEST(BlochMessiah, RandomReconstructionProperty) {
  RandomStream rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 1 + trial % 6;
    const MatrixR S = random_symplectic(m, rng, 0.5);
    const GaussianUnitaryFactors f = bloch_messiah(SymplecticMatrix(S));
    EXPECT_TRUE(is_unitary(f.U1, 1e-10));
    EXPECT_TRUE(is_unitary(f.U2, 1e-10));
    for (int i = 0; i < m; ++i) EXPECT_GE(f.r(i), 0.0);
    for (int i = 1; i < m; ++i) EXPECT_GE(f.r(i - 1), f.r(i));
    EXPECT_LT(max_abs_diff(factors_symplectic(f).matrix(), S), 1e-8 * std::max(1.0, S.norm()));
  }
}

TEST(BlochMessiah, DegenerateSqueezing) {
  // Equal squeezers on every mode sandwiched between passive layers.
  GaussianUnitaryFactors f{haar_unitary(3, 1), VectorR::Constant(3, 0.4), haar_unitary(3, 2)};
  const MatrixR S = factors_symplectic(f).matrix();
  const GaussianUnitaryFactors g = bloch_messiah(SymplecticMatrix(S));
  EXPECT_LT((g.r - f.r).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(max_abs_diff(factors_symplectic(g).matrix(), S), 1e-9);
}

TEST(BlochMessiah, RejectsNonSymplectic) {
  EXPECT_THROW(bloch_messiah(SymplecticMatrix(2.0 * MatrixR::Identity(2, 2))), ValidationError);
}

TEST(Bogoliubov, RoundTripAndPassiveForm) {
  RandomStream rng(3);
  const MatrixR S = random_symplectic(3, rng);
  EXPECT_LT(max_abs_diff(from_bogoliubov(to_bogoliubov(S)), S), 1e-13);
  const MatrixC U = haar_unitary(3, 8);
  const Bogoliubov b = to_bogoliubov(passive_symplectic(U));
  EXPECT_LT((b.alpha - U).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(b.beta.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Takagi, ReconstructsRandomAndRankDeficient) {
  RandomStream rng(12);
  MatrixC A = testing::random_complex_symmetric(4, rng);
  TakagiResult t = takagi(A);
  EXPECT_TRUE(is_unitary(t.W, 1e-10));
  EXPECT_LT((t.W * t.sigma.cast<Complex>().asDiagonal() * t.W.transpose() - A).cwiseAbs().maxCoeff(),
            1e-10);
  const VectorC v = VectorC::Random(4);
  A = v * v.transpose();
  t = takagi(A);
  EXPECT_TRUE(is_unitary(t.W, 1e-10));
  EXPECT_NEAR(t.sigma(1), 0.0, 1e-12);
  EXPECT_LT((t.W * t.sigma.cast<Complex>().asDiagonal() * t.W.transpose() - A).cwiseAbs().maxCoeff(),
            1e-10);
}

TEST(ReducedCovariance, VacuumAndTmsvMarginal) {
  const std::vector<int> first{0};
  EXPECT_EQ(reduced_covariance(CovMatrix::vacuum(2), first).matrix(), MatrixR::Identity(2, 2));
  const Real s = 0.6;
  const CovMatrix marginal = reduced_covariance(tmsv_covariance(s), first);
  EXPECT_LT(max_abs_diff(marginal.matrix(), std::cosh(2 * s) * MatrixR::Identity(2, 2)), 1e-14);
}

TEST(ReducedCovariance, NestedReductionConsistent) {
  RandomStream rng(6);
  const CovMatrix V = random_covariance(4, rng);
  const std::vector<int> outer{0, 2, 3};
  const std::vector<int> inner{1, 2};  // positions inside `outer` -> modes 2, 3
  const std::vector<int> direct{2, 3};
  EXPECT_EQ(reduced_covariance(reduced_covariance(V, outer), inner).matrix(),
            reduced_covariance(V, direct).matrix());
  EXPECT_THROW(reduced_covariance(V, std::vector<int>{}), ValidationError);
  EXPECT_THROW(reduced_covariance(V, std::vector<int>{4}), ValidationError);
}

TEST(BuildCircuit, VacuumInputStaysVacuum) {
  CircuitSpec spec;
  spec.modes = 4;
  spec.r_in = VectorR::Zero(4);
  spec.eta = VectorR::Constant(4, 0.3);
  spec.ensemble = Ensemble::kGlobalHaar;
  EXPECT_LT(max_abs_diff(build_circuit(spec, 1).matrix(), MatrixR::Identity(8, 8)), 1e-14);
}

TEST(BuildCircuit, WorstCaseIsProductOfTmsvPairs) {
  const Real s = 0.5;
  CircuitSpec spec;
  spec.modes = 4;
  spec.r_in = VectorR::Constant(4, s);
  spec.eta = VectorR::Ones(4);
  spec.ensemble = Ensemble::kTmsvWorstCase;
  const CovMatrix V = build_circuit(spec, 0);
  const CovMatrix tmsv = tmsv_covariance(s);
  // pairs (0, 3) and (1, 2)
  for (const auto& pair : {std::vector<int>{0, 3}, std::vector<int>{1, 2}}) {
    EXPECT_LT(max_abs_diff(reduced_covariance(V, pair).matrix(), tmsv.matrix()), 1e-12);
  }
  // no correlations between pairs
  for (int a : {0, 3}) {
    for (int b : {1, 2}) {
      for (int qa = 0; qa < 2; ++qa) {
        for (int qb = 0; qb < 2; ++qb) EXPECT_NEAR(V(a + 4 * qa, b + 4 * qb), 0.0, 1e-14);
      }
    }
  }
}

TEST(BuildCircuit, HaarIsDeterministicInSeed) {
  CircuitSpec spec;
  spec.modes = 4;
  spec.r_in = VectorR::Constant(4, 0.6);
  spec.eta = VectorR::Constant(4, 0.5);
  spec.ensemble = Ensemble::kGlobalHaar;
  const CovMatrix a = build_circuit(spec, 42);
  const CovMatrix b = build_circuit(spec, 42);
  const CovMatrix c = build_circuit(spec, 43);
  EXPECT_EQ(std::memcmp(a.matrix().data(), b.matrix().data(), sizeof(Real) * 64), 0);
  EXPECT_GT(max_abs_diff(a.matrix(), c.matrix()), 1e-3);
  EXPECT_TRUE(validate_covariance(a.matrix()).ok);
  EXPECT_TRUE(is_unitary(haar_unitary(6, 3)));
}

TEST(BuildCircuit, BrickworkDepthZeroIsIdentity) {
  EXPECT_EQ(brickwork_unitary(5, 0, 1), MatrixC::Identity(5, 5));
  EXPECT_TRUE(is_unitary(brickwork_unitary(5, 4, 1)));
}

}  // namespace
}  // namespace gbsmps
