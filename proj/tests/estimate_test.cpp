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

#include "gbsmps/estimate.hpp"

#include <cmath>

#include <boost/math/special_functions/beta.hpp>
#include <gtest/gtest.h>

#include "gbsmps/decompose.hpp"
#include "test_util.hpp"

namespace gbsmps {
namespace {

// Patterns of K nonnegative integers with total <= l.
std::uint64_t brute_count(int K, int l) {
  std::uint64_t count = 0;
  testing::for_each_pattern(K, l + 1, [&](const std::vector<int>& n) {
    int total = 0;
    for (int v : n) total += v;
    if (total <= l) ++count;
  });
  return count;
}

// Direct von Neumann / Renyi entropy of the geometric spectrum tanh^{2n}/cosh^2.
Real spectrum_entropy(Real s, Real alpha) {
  const Real x = std::tanh(s) * std::tanh(s);
  Real sum = 0.0;
  for (int n = 0; n < 4000; ++n) {
    const Real p = (1.0 - x) * std::pow(x, n);
    if (p == 0.0) break;
    sum += alpha == 1.0 ? -p * std::log(p) : std::pow(p, alpha);
  }
  return alpha == 1.0 ? sum : std::log(sum) / (1.0 - alpha);
}

TEST(Tail, VacuumLevel) {
  for (int K : {1, 3, 17}) {
    for (Real R : {0.1, 0.5, 0.83}) EXPECT_NEAR(epsilon_l(K, R, 0), 1.0 - std::pow(1.0 - R, K), 1e-15);
  }
  EXPECT_EQ(epsilon_l(4, 0.0, 0), 0.0);
  EXPECT_EQ(epsilon_l(4, 0.0, 7), 0.0);
}

TEST(Tail, GeometricSingleMode) { EXPECT_NEAR(epsilon_l(1, 0.25, 2), 0.015625, 1e-15); }

TEST(Tail, MatchesIncompleteBeta) {
  Real worst = 0.0;
  for (int K : {1, 2, 5, 10, 30, 100}) {
    for (Real R : {0.01, 0.1, 0.3, 0.5, 0.7, 0.9}) {
      for (int l = 0; l <= 60; l += 3) {
        const Real beta = 1.0 - boost::math::ibeta(static_cast<Real>(K), l + 1.0, 1.0 - R);
        worst = std::max(worst, std::abs(epsilon_l(K, R, l) - beta));
      }
    }
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Tail, NonincreasingInLevel) {
  for (int K : {1, 4, 12}) {
    Real prev = 1.0;
    for (int l = 0; l < 40; ++l) {
      const Real e = epsilon_l(K, 0.6, l);
      EXPECT_LE(e, prev);
      EXPECT_GE(e, 0.0);
      prev = e;
    }
  }
}

TEST(Tail, RejectsBadArguments) {
  EXPECT_THROW(epsilon_l(1, 1.0, 0), ValidationError);
  EXPECT_THROW(epsilon_l(0, 0.5, 0), ValidationError);
  EXPECT_THROW(epsilon_l(1, 0.5, -1), ValidationError);
}

TEST(Chi, KnownValues) {
  EXPECT_EQ(chi_l(5, 0), 1u);
  EXPECT_EQ(chi_l(1, 7), 8u);
  EXPECT_EQ(chi_l(3, 2), 10u);
}

TEST(Chi, MatchesBruteForceCount) {
  for (int K = 1; K <= 6; ++K) {
    for (int l = 0; l <= 8; ++l) EXPECT_EQ(chi_l(K, l), brute_count(K, l)) << K << " " << l;
  }
}

TEST(Chi, OverflowIsACap) {
  EXPECT_EQ(chi_l(33, 33), 7219428434016265740u);
  EXPECT_THROW(chi_l(200, 200), ResourceCapError);
}

TEST(Level, ScanAndMonotonicity) {
  const Real R = std::pow(std::tanh(0.5), 2);
  int expected = 0;
  // Brute scan over the explicit sum of the head.
  Real head = 0.0;
  for (int l = 0;; ++l) {
    head += std::exp(std::lgamma(2.0 + l) - std::lgamma(l + 1.0)) * std::pow(1.0 - R, 2) * std::pow(R, l);
    if (1.0 - head <= 0.01) {
      expected = l;
      break;
    }
  }
  EXPECT_EQ(required_level(2, R, 0.01), expected);
  EXPECT_EQ(required_level(3, 0.4, 0.99), 0);
  for (Real eps : {0.3, 0.1, 0.01, 1e-4}) EXPECT_GE(required_level(3, 0.4, eps / 10), required_level(3, 0.4, eps));
}

TEST(WorstCase, ClosedFormChain) {
  const WorstCaseBond b = worst_case_bond(2, 1.5, 0.4, 0.01);
  const Real s = -0.5 * std::log(0.4 * std::exp(-3.0) + 0.6);
  EXPECT_NEAR(b.s, s, 1e-9);
  EXPECT_NEAR(b.s, 0.239087, 1e-6);
  EXPECT_NEAR(b.nbar, std::pow(std::sinh(s), 2), 1e-12);
  EXPECT_EQ(b.chi, chi_l(2, b.level));
  EXPECT_EQ(worst_case_bond(3, 0.0, 1.0, 0.01).chi, 1u);
  std::uint64_t prev = 0;
  for (int K = 1; K <= 8; ++K) {
    const std::uint64_t chi = worst_case_bond(K, 1.0, 0.5, 1e-3).chi;
    EXPECT_GE(chi, prev);
    prev = chi;
  }
}

TEST(CircuitBond, ProductStateNeedsOne) {
  VectorR r(3);
  r << 0.5, 0.2, 0.7;
  EXPECT_EQ(circuit_bond(squeezed_input(r), 1, 0.01), 1u);
  EXPECT_EQ(circuit_bond(CovMatrix::vacuum(3), 2, 0.01), 1u);
}

TEST(CircuitBond, TwoModeSqueezedPartialSums) {
  const Real s = 0.5;
  const Real t2 = std::pow(std::tanh(s), 2);
  const CovMatrix V = tmsv_covariance(s);
  // Keeping one pattern discards tanh^2 s, two discard tanh^4 s.
  EXPECT_EQ(circuit_bond(V, 1, t2 + 1e-3), 1u);
  EXPECT_EQ(circuit_bond(V, 1, t2 - 1e-3), 2u);
  EXPECT_EQ(circuit_bond(V, 1, t2 * t2 + 1e-3), 2u);
  EXPECT_EQ(circuit_bond(V, 1, t2 * t2 - 1e-3), 3u);
}

TEST(CircuitBond, WorstCaseMatchesAnalyticCount) {
  // K pairs (i, M - 1 - i) all straddle the center bond.
  const int K = 3;
  const Real r = 1.2, eta = 0.5, eps = 1e-3;
  const WorstCaseBond w = worst_case_bond(K, r, eta, eps);
  MatrixR V = MatrixR::Identity(4 * K, 4 * K);
  const int m = 2 * K;
  const MatrixR T = tmsv_covariance(w.s).matrix();
  for (int i = 0; i < K; ++i) {
    const int idx[2] = {i, m - 1 - i};
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        const int ra = (a < 2 ? 0 : m) + idx[a % 2], rb = (b < 2 ? 0 : m) + idx[b % 2];
        V(ra, rb) = T(a, b);
      }
    }
  }
  EXPECT_EQ(circuit_bond(CovMatrix(V), K, eps), w.chi);
}

TEST(Renyi, KnownValues) {
  EXPECT_EQ(renyi_entropy(0.0, 0.5), 0.0);
  EXPECT_NEAR(renyi_entropy(0.5, 2.0), std::log(std::cosh(1.0)), 1e-14);
  EXPECT_NEAR(renyi_entropy(0.5, 2.0), 0.433781, 1e-6);
  for (Real s : {0.1, 0.5, 1.3}) {
    EXPECT_NEAR(std::pow(std::cosh(s), 4) - std::pow(std::sinh(s), 4), std::cosh(2 * s), 1e-12);
  }
}

TEST(Renyi, MatchesSpectrum) {
  for (Real s : {0.2, 0.7, 1.1}) {
    for (Real alpha : {0.5, 0.9, 1.0, 2.0, 3.0}) {
      EXPECT_NEAR(renyi_entropy(s, alpha), spectrum_entropy(s, alpha), 1e-10) << s << " " << alpha;
    }
    EXPECT_NEAR(renyi_entropy(s, 1.0 + 1e-7), renyi_entropy(s, 1.0), 1e-6);
  }
}

TEST(Renyi, NonincreasingInAlpha) {
  for (Real s : {0.05, 0.4, 1.5}) {
    Real prev = std::numeric_limits<Real>::infinity();
    for (int i = 1; i < 50; ++i) {
      const Real v = renyi_entropy(s, 0.1 * i + 1e-9 * (i % 3));
      EXPECT_LE(v, prev + 1e-12);
      prev = v;
    }
  }
}

TEST(Renyi, LowLossScalingSlope) {
  const Real alpha = 0.9, r = 0.5;
  const int K = 4, points = 21;
  std::vector<Real> lx, ly;
  for (int i = 0; i < points; ++i) {
    const Real eta = std::pow(10.0, -3.0 + 2.0 * i / (points - 1));
    lx.push_back(std::log(eta));
    ly.push_back(std::log(K * renyi_entropy(eta * std::exp(-r) * std::sinh(r), alpha)));
  }
  Real mx = 0, my = 0;
  for (int i = 0; i < points; ++i) mx += lx[i] / points, my += ly[i] / points;
  Real sxy = 0, sxx = 0;
  for (int i = 0; i < points; ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
  EXPECT_NEAR(sxy / sxx, 2 * alpha, 0.05 * 2 * alpha);
}

TEST(Cost, ClosedForms) {
  EXPECT_EQ(memory_estimate(1e4, 288, 4), 9.216e11);
  EXPECT_EQ(time_estimate(1e4, 4), 2400.0);
  EXPECT_EQ(max_hafnian_size(5), 10);
}

}  // namespace
}  // namespace gbsmps
