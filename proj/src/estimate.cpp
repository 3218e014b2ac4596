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

#include <algorithm>
#include <cmath>
#include <limits>

#include "gbsmps/decompose.hpp"
#include "gbsmps/mps.hpp"

namespace gbsmps {

namespace {

constexpr int kMaxLevel = 1000000;

}  // namespace

Real epsilon_l(int K, Real R, int l) {
  if (K < 1) throw ValidationError("K must be positive");
  if (!(R >= 0.0 && R < 1.0)) throw ValidationError("R must lie in [0, 1)");
  if (l < 0) throw ValidationError("level must be nonnegative");
  if (R == 0.0) return 0.0;
  if (l == 0) return -std::expm1(K * std::log1p(-R));
  // Negative binomial tail summed upward from k = l + 1.
  const Real mode = (K - 1) * R / (1.0 - R);
  Real k = l + 1;
  Real term = std::exp(std::lgamma(K + k) - std::lgamma(k + 1.0) - std::lgamma(static_cast<Real>(K)) +
                       K * std::log1p(-R) + k * std::log(R));
  Real total = 0.0;
  while (true) {
    total += term;
    term *= R * (K + k) / (k + 1.0);
    k += 1.0;
    if (term < 1e-16 * std::max(total, 1e-300) && k > mode) break;
    if (term == 0.0) break;
  }
  return std::min(1.0, total);
}

std::uint64_t chi_l(int K, int l) {
  if (K < 1 || l < 0) throw ValidationError("chi_l needs K >= 1 and l >= 0");
  // C(K + l, l) via the exact running product C(K + i, i).
  unsigned __int128 c = 1;
  for (int i = 1; i <= l; ++i) {
    const unsigned __int128 next = c * static_cast<unsigned __int128>(K + i);
    if (next / static_cast<unsigned __int128>(K + i) != c) throw ResourceCapError("chi_l overflows");
    c = next / static_cast<unsigned __int128>(i);
    if (c > std::numeric_limits<std::uint64_t>::max()) throw ResourceCapError("chi_l exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(c);
}

int required_level(int K, Real R, Real target) {
  if (!(target > 0.0 && target < 1.0)) throw ValidationError("target error must lie in (0, 1)");
  for (int l = 0; l <= kMaxLevel; ++l) {
    if (epsilon_l(K, R, l) <= target) return l;
  }
  throw ResourceCapError("required level exceeds 1e6");
}

WorstCaseBond worst_case_bond(int K, Real r, Real eta, Real target) {
  WorstCaseBond out;
  out.s = std::max(0.0, decompose_single_mode(r, eta).s);  // no -0 in reports
  out.nbar = std::sinh(out.s) * std::sinh(out.s);
  out.R = out.nbar / (out.nbar + 1.0);
  out.level = required_level(K, out.R, target);
  out.chi = chi_l(K, out.level);
  return out;
}

std::uint64_t circuit_bond(const CovMatrix& Vp, int bond, Real target, int limit) {
  if (!(target > 0.0 && target < 1.0)) throw ValidationError("target error must lie in (0, 1)");
  for (int chi = 16;; chi = std::min(2 * chi, limit)) {
    const BondSpectrum spec = bond_spectrum(Vp, bond, chi);
    Real acc = 0.0;
    for (std::size_t i = 0; i < spec.weights.size(); ++i) {
      acc += spec.weights[i];
      if (acc >= 1.0 - target) return i + 1;
    }
    // Fewer patterns than requested means the spectrum is exhausted.
    if (static_cast<int>(spec.weights.size()) < chi) return spec.weights.size();
    if (chi >= limit) throw ResourceCapError("bond dimension exceeds the search limit");
  }
}

Real renyi_entropy(Real s, Real alpha) {
  if (s < 0.0 || !(alpha > 0.0)) throw ValidationError("renyi_entropy needs s >= 0 and alpha > 0");
  if (s == 0.0) return 0.0;
  if (std::abs(alpha - 1.0) < 1e-5) {
    // Von Neumann entropy plus the first-order term -(a - 1) Var(log p) / 2,
    // since the closed form cancels catastrophically near a = 1.
    const Real n = std::sinh(s) * std::sinh(s);
    const Real log_x = 2.0 * std::log(std::tanh(s));
    const Real vn = (n + 1.0) * std::log1p(n) - n * std::log(n);
    return vn - 0.5 * (alpha - 1.0) * log_x * log_x * n * (n + 1.0);
  }
  // cosh^{2a} - 1 and sinh^{2a} are both small for small s; keep them apart.
  const Real c1 = std::expm1(2.0 * alpha * std::log(std::cosh(s)));
  const Real h = std::pow(std::sinh(s), 2.0 * alpha);
  return std::log1p(c1 - h) / (alpha - 1.0);
}

Real memory_estimate(Real chi, int modes, int d) { return 8.0 * chi * chi * modes * d; }

Real time_estimate(Real chi, int d) {
  const Real x = chi / 1e4;
  return 600.0 * x * x * d;
}

int max_hafnian_size(int l) { return 2 * l; }

}  // namespace gbsmps
