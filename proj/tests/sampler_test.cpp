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

#include "gbsmps/sampler.hpp"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "gbsmps/decompose.hpp"
#include "test_util.hpp"

namespace gbsmps {
namespace {

Real factorial(int n) { return std::tgamma(n + 1.0); }

MpsState vacuum_mps(int modes, int d = 4) {
  return build_mps(CovMatrix::vacuum(modes), {.chi = 1, .d = d}).state;
}

// Lossy Haar circuit on M modes and its SDP split.
struct LossyCircuit {
  CovMatrix V;
  Decomposition split;
};

LossyCircuit lossy_circuit(int modes, Real r, Real eta, std::uint64_t seed) {
  VectorR rv = VectorR::Constant(modes, r);
  const CovMatrix V = apply_loss(apply_passive(squeezed_input(rv), haar_unitary(modes, seed)), eta);
  return {V, decompose_sdp(V)};
}

TEST(Displacement, ZeroCovarianceGivesZero) {
  RandomStream rng(1, stage::kSampleShot, 0);
  const DisplacementDraw d = draw_displacement(MatrixR::Zero(4, 4), rng);
  EXPECT_EQ(d.beta.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(d.delta.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Displacement, MeanEnergyMatchesTrace) {
  const Real c = 0.7;
  const DisplacementSampler s(2.0 * c * MatrixR::Identity(2, 2));
  const int draws = 100000;
  Real sum = 0.0, sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    RandomStream rng(5, stage::kSampleShot, i);
    const Real v = std::norm(s.draw(rng).beta(0));
    sum += v;
    sq += v * v;
  }
  const Real mean = sum / draws;
  const Real se = std::sqrt((sq / draws - mean * mean) / draws);
  EXPECT_NEAR(mean, c, 3.0 * se);
}

TEST(Displacement, CovarianceMatchesW) {
  RandomStream gen(8, stage::kOracle, 0);
  const MatrixR G = testing::random_symmetric(4, gen);
  const MatrixR W = G * G.transpose();
  const DisplacementSampler s(W);
  const int draws = 100000;
  MatrixR acc = MatrixR::Zero(4, 4);
  for (int i = 0; i < draws; ++i) {
    RandomStream rng(9, stage::kSampleShot, i);
    const VectorR d = s.draw(rng).delta;
    acc += d * d.transpose();
  }
  acc /= draws;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const Real se = std::sqrt((W(i, i) * W(j, j) + W(i, j) * W(i, j)) / draws);
      EXPECT_NEAR(acc(i, j), W(i, j), 5.0 * se) << i << "," << j;
    }
  }
}

TEST(Displacement, RejectsIndefinite) {
  MatrixR W = MatrixR::Identity(2, 2);
  W(1, 1) = -1e-6;
  EXPECT_THROW(DisplacementSampler{W}, ValidationError);
  W(1, 1) = -1e-10;
  EXPECT_NO_THROW(DisplacementSampler{W});
}

TEST(DisplaceTensors, ZeroShiftOnlyPads) {
  const MpsState mps = build_mps(tmsv_covariance(0.4), {.chi = 3, .d = 3}).state;
  const MpsState out = displace_tensors(mps, VectorC::Zero(2), 5);
  for (int k = 0; k < 2; ++k) {
    ASSERT_EQ(out.gamma[k].d, 5);
    for (int n = 0; n < 5; ++n) {
      for (int a = 0; a < out.gamma[k].left; ++a) {
        for (int b = 0; b < out.gamma[k].right; ++b) {
          const Complex expect = n < 3 ? mps.gamma[k](n, a, b) : Complex(0.0, 0.0);
          EXPECT_EQ(out.gamma[k](n, a, b), expect);
        }
      }
    }
  }
}

TEST(DisplaceTensors, CoherentMarginalIsPoisson) {
  VectorC beta = VectorC::Zero(3);
  beta(0) = 1.0;
  const MpsState out = displace_tensors(vacuum_mps(3), beta, 10);
  for (int n = 0; n < 10; ++n) {
    const Pattern m = {n, 0, 0};
    EXPECT_NEAR(std::norm(contract_amplitude(out, m)), std::exp(-1.0) / factorial(n), 1e-14);
  }
}

TEST(DisplaceTensors, NormPreserved) {
  const MpsState mps = build_mps(tmsv_covariance(0.15), {.chi = 6, .d = 4}).state;
  VectorC beta(2);
  beta << Complex(0.6, -0.8), Complex(-0.5, 0.3);
  auto norm = [](const MpsState& s, int cut) {
    Real total = 0.0;
    testing::for_each_pattern(2, cut, [&](const std::vector<int>& m) {
      total += std::norm(contract_amplitude(s, m));
    });
    return total;
  };
  EXPECT_NEAR(norm(displace_tensors(mps, beta, 10), 10), norm(mps, 4), 1e-6);
}

TEST(SampleChain, VacuumAlwaysZero) {
  const MpsState mps = vacuum_mps(4);
  for (int i = 0; i < 100; ++i) {
    RandomStream rng(2, stage::kSampleShot, i);
    EXPECT_EQ(sample_chain(mps, rng), Pattern(4, 0));
  }
}

TEST(SampleChain, SqueezedParityAndRatio) {
  const Real s = 0.6;
  VectorR r(1);
  r << s;
  const MpsState mps = build_mps(squeezed_input(r), {.chi = 1, .d = 10}).state;
  const int shots = 100000;
  int zeros = 0, twos = 0, odd = 0;
  for (int i = 0; i < shots; ++i) {
    RandomStream rng(3, stage::kSampleShot, i);
    const int n = sample_chain(mps, rng)[0];
    zeros += n == 0;
    twos += n == 2;
    odd += n % 2;
  }
  EXPECT_EQ(odd, 0);
  const Real ratio = static_cast<Real>(twos) / zeros;
  // Delta-method error of a ratio of multinomial counts.
  const Real se = ratio * std::sqrt(1.0 / twos + 1.0 / zeros);
  EXPECT_NEAR(ratio, std::pow(std::tanh(s), 2) / 2.0, 3.0 * se);
}

TEST(SampleChain, TmsvPerfectlyCorrelated) {
  const MpsState mps = build_mps(tmsv_covariance(0.5), {.chi = 8, .d = 8}).state;
  for (int i = 0; i < 5000; ++i) {
    RandomStream rng(4, stage::kSampleShot, i);
    const Pattern m = sample_chain(mps, rng);
    ASSERT_EQ(m[0], m[1]);
  }
}

TEST(SampleBatch, VacuumWithoutNoise) {
  const SampleBatch b = sample_batch(vacuum_mps(3), MatrixR::Zero(6, 6), 200, 1);
  for (const Pattern& p : b.patterns) EXPECT_EQ(p, Pattern(3, 0));
}

TEST(SampleBatch, ThermalLawFromDisplacedVacuum) {
  const Real nbar = 0.8;
  const int shots = 100000;
  const SampleBatch b = sample_batch(vacuum_mps(1, 2), 2.0 * nbar * MatrixR::Identity(2, 2), shots,
                                     17, {.d_sample = 25});
  std::vector<int> hist(25, 0);
  for (const Pattern& p : b.patterns) ++hist[p[0]];
  for (int n = 0; n < 8; ++n) {
    const Real p = std::pow(nbar, n) / std::pow(nbar + 1.0, n + 1);
    const Real se = std::sqrt(p * (1.0 - p) / shots);
    EXPECT_NEAR(static_cast<Real>(hist[n]) / shots, p, 3.0 * se) << "n=" << n;
  }
}

TEST(SampleBatch, EnergyConsistency) {
  const LossyCircuit c = lossy_circuit(3, 0.8, 0.5, 77);
  const MpsState mps = build_mps(c.split.Vp, {.chi = 20, .d = 6}).state;
  const int shots = 20000;
  const SampleBatch b = sample_batch(mps, c.split.W, shots, 5);
  Real sum = 0.0, sq = 0.0;
  for (const Pattern& p : b.patterns) {
    const Real t = pattern_total(p);
    sum += t;
    sq += t * t;
  }
  const Real mean = sum / shots;
  const Real se = std::sqrt((sq / shots - mean * mean) / shots);
  const Real expect = (c.V.matrix().trace() - 6.0) / 4.0;
  EXPECT_NEAR(mean, expect, 3.0 * se);
  EXPECT_NEAR(mean_photon(c.split.Vp) + c.split.W.trace() / 4.0, expect, 1e-9);
}

TEST(SampleBatch, DeterministicAcrossWorkerCounts) {
  const LossyCircuit c = lossy_circuit(3, 0.6, 0.5, 78);
  const MpsState mps = build_mps(c.split.Vp, {.chi = 6, .d = 4}).state;
  const SampleBatch a = sample_batch(mps, c.split.W, 300, 11, {.workers = 1});
  const SampleBatch b = sample_batch(mps, c.split.W, 300, 11, {.workers = 4});
  const SampleBatch other = sample_batch(mps, c.split.W, 300, 12, {.workers = 1});
  EXPECT_EQ(a.patterns, b.patterns);
  EXPECT_NE(a.patterns, other.patterns);
}

TEST(SampleBatch, ThresholdMode) {
  const LossyCircuit c = lossy_circuit(3, 0.8, 0.5, 79);
  const MpsState mps = build_mps(c.split.Vp, {.chi = 6, .d = 4}).state;
  const SampleBatch pnr = sample_batch(mps, c.split.W, 300, 11);
  const SampleBatch clicks =
      sample_batch(mps, c.split.W, 300, 11, {.detector = Detector::kThreshold});
  for (int i = 0; i < 300; ++i) {
    EXPECT_EQ(clicks.patterns[i], to_clicks(pnr.patterns[i]));
    EXPECT_EQ(to_clicks(clicks.patterns[i]), clicks.patterns[i]);
  }
}

TEST(Clicks, IdempotentAndMonotone) {
  const Pattern m = {0, 3, 1, 0, 7};
  const Pattern c = to_clicks(m);
  EXPECT_EQ(c, Pattern({0, 1, 1, 0, 1}));
  EXPECT_EQ(to_clicks(c), c);
  const Pattern more = {1, 3, 1, 0, 7};
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_LE(c[i], to_clicks(more)[i]);
}

TEST(SampleFile, RoundTrip) {
  SampleBatch b;
  b.modes = 3;
  b.seed = 42;
  b.detector = Detector::kThreshold;
  b.patterns = {{0, 1, 0}, {1, 1, 1}};
  std::stringstream io;
  write_samples(io, b);
  EXPECT_EQ(io.str(), "# modes=3 shots=2 seed=42 detector=threshold\n0 1 0\n1 1 1\n");
  const SampleBatch back = read_samples(io);
  EXPECT_EQ(back.modes, 3);
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.detector, Detector::kThreshold);
  EXPECT_EQ(back.patterns, b.patterns);
}

TEST(SampleFile, RejectsMalformed) {
  std::stringstream no_header("0 1\n");
  EXPECT_THROW(read_samples(no_header), ValidationError);
  std::stringstream wrong_width("# modes=2 shots=1 seed=1 detector=pnr\n0 1 2\n");
  EXPECT_THROW(read_samples(wrong_width), ValidationError);
  std::stringstream wrong_count("# modes=2 shots=3 seed=1 detector=pnr\n0 1\n");
  EXPECT_THROW(read_samples(wrong_count), ValidationError);
  std::stringstream junk("# modes=2 shots=1 seed=1 detector=pnr\n0 x\n");
  EXPECT_THROW(read_samples(junk), ValidationError);
}

TEST(Oracle, NoiselessMatchesMps) {
  const LossyCircuit c = lossy_circuit(3, 0.6, 0.5, 80);
  const MpsState mps = build_mps(c.split.Vp, {.chi = 10, .d = 4}).state;
  const GaussianOracle oracle(c.split.Vp, MatrixR::Zero(6, 6), 4);
  const PatternTable t = oracle.distribution(0, 1);
  testing::for_each_pattern(3, 4, [&](const std::vector<int>& m) {
    EXPECT_NEAR(t.probability(m), std::norm(contract_amplitude(mps, m)), 1e-8);
    EXPECT_NEAR(oracle.probability(m, 0, 1).value, t.probability(m), 1e-15);
  });
}

TEST(Oracle, ThermalLaw) {
  const Real nbar = 0.5;
  const GaussianOracle oracle(CovMatrix::vacuum(1), 2.0 * nbar * MatrixR::Identity(2, 2), 8, 8);
  const PatternTable t = oracle.distribution(40000, 3);
  for (int n = 0; n < 5; ++n) {
    const Pattern m = {n};
    const Real expect = std::pow(nbar, n) / std::pow(nbar + 1.0, n + 1);
    EXPECT_NEAR(t.probability(m), expect, 3.0 * t.err[n] + 1e-12) << n;
    const Estimate e = oracle.probability(m, 40000, 3);
    EXPECT_NEAR(e.value, t.probability(m), 1e-12);
  }
}

TEST(Oracle, NormalizedTwoModes) {
  const LossyCircuit c = lossy_circuit(2, 0.5, 0.6, 81);
  const GaussianOracle oracle(c.split.Vp, c.split.W, 8);
  const PatternTable t = oracle.distribution(4000, 9);
  Real total = 0.0;
  for (Real p : t.p) total += p;
  EXPECT_LE(total, 1.0 + 1e-9);
  EXPECT_GE(total, 1.0 - 1e-3);
}

TEST(Oracle, ScaleCaps) {
  EXPECT_THROW(GaussianOracle(CovMatrix::vacuum(7), MatrixR::Zero(14, 14), 2), ResourceCapError);
  EXPECT_THROW(GaussianOracle(CovMatrix::vacuum(2), MatrixR::Zero(4, 4), 9), ResourceCapError);
}

TEST(Chain, DistributionMatchesOracleSmall) {
  const LossyCircuit c = lossy_circuit(2, 0.6, 0.5, 82);
  const MpsState mps = build_mps(c.split.Vp, {.chi = 20, .d = 6}).state;
  const int shots = 40000;
  const SampleBatch b = sample_batch(mps, c.split.W, shots, 21);
  const GaussianOracle oracle(c.split.Vp, c.split.W, 8);
  const PatternTable t = oracle.distribution(20000, 22);
  std::vector<Real> emp(t.p.size(), 0.0);
  for (const Pattern& p : b.patterns) {
    if (p[0] < 8 && p[1] < 8) emp[t.index(p)] += 1.0 / shots;
  }
  Real tvd = 0.0;
  for (std::size_t i = 0; i < emp.size(); ++i) tvd += 0.5 * std::abs(emp[i] - t.p[i]);
  EXPECT_LT(tvd, 0.03);
}

}  // namespace
}  // namespace gbsmps
