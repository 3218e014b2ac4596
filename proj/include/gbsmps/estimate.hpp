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

// Cost models for the MPS simulation: singular-value tails of K thermal
// modes, the bond dimension they require, and Renyi entropies.

#ifndef GBSMPS_ESTIMATE_HPP
#define GBSMPS_ESTIMATE_HPP

#include <cstdint>

#include "gbsmps/gaussian.hpp"
#include "gbsmps/types.hpp"

namespace gbsmps {

/// Discarded weight when keeping all patterns of total photon number <= l
/// over K identical geometric modes with ratio R = nbar / (nbar + 1):
/// sum_{k > l} C(K + k - 1, k) (1 - R)^K R^k. Throws ValidationError for R
/// outside [0, 1), K < 1 or l < 0.
Real epsilon_l(int K, Real R, int l);

/// Number of such patterns, C(K + l, l). Throws ResourceCapError when the
/// count does not fit in 64 bits.
std::uint64_t chi_l(int K, int l);

/// Smallest l with epsilon_l <= target.
int required_level(int K, Real R, Real target);

struct WorstCaseBond {
  Real s = 0.0;     // pure-part squeezing per pair
  Real nbar = 0.0;  // sinh^2 s
  Real R = 0.0;
  int level = 0;
  std::uint64_t chi = 1;
};

/// K two-mode squeezed pairs of the pure part of r-squeezed light after
/// transmission eta, all crossing one bond.
WorstCaseBond worst_case_bond(int K, Real r, Real eta, Real target);

/// Fewest Schmidt patterns of bond k (see bond_spectrum) whose weight sums to
/// at least 1 - target. Throws ResourceCapError past `limit`.
std::uint64_t circuit_bond(const CovMatrix& Vp, int bond, Real target, int limit = 1 << 20);

/// log(cosh^{2a} s - sinh^{2a} s) / (a - 1); a = 1 gives the von Neumann
/// entropy of the thermal marginal.
Real renyi_entropy(Real s, Real alpha);

/// 8 chi^2 M d bytes of single-precision complex site tensors.
Real memory_estimate(Real chi, int modes, int d);
/// 600 (chi / 1e4)^2 d seconds.
Real time_estimate(Real chi, int d);
/// Largest hafnian needed at truncation level l.
int max_hafnian_size(int l);

}  // namespace gbsmps

#endif  // GBSMPS_ESTIMATE_HPP
