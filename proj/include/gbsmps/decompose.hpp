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

// Splitting a mixed Gaussian covariance V into a pure part V_p and a
// classical displacement covariance W = V - V_p >= 0.

#ifndef GBSMPS_DECOMPOSE_HPP
#define GBSMPS_DECOMPOSE_HPP

#include <string>

#include "gbsmps/gaussian.hpp"
#include "gbsmps/types.hpp"

namespace gbsmps {

struct SolverStats {
  int outer_iterations = 0;
  int newton_iterations = 0;
  Real barrier_parameter = 0.0;
  Real duality_gap_bound = 0.0;
  Real reconstruction_residual = 0.0;  // max |V - V_p - W|
  Real min_eig_w = 0.0;
  Real min_eig_vp = 0.0;       // of V_p + i Omega
  Real purity_deviation = 0.0;  // max |nu_i - 1| of V_p before the final purification
  bool converged = false;
};

struct Decomposition {
  CovMatrix Vp;
  MatrixR W;
  Real objective = 0.0;  // Tr[V_p]
  SolverStats stats;
};

struct SingleModeSplit {
  Real r = 0.0;
  Real eta = 0.0;
  Real s = 0.0;     // squeezing of the pure part
  Real w_xx = 0.0;  // x-variance handed to the displacement channel
};

/// Closed form: e^{-2s} = eta e^{-2r} + 1 - eta, w_xx = eta e^{2r} + 1 - eta - e^{2s}.
SingleModeSplit decompose_single_mode(Real r, Real eta);

/// -log(1 - eta) / 2, the pure-part squeezing as r -> infinity.
Real infinite_squeezing_limit(Real eta);

struct DecomposeOptions {
  Real feasibility_tol = 1e-8;
  Real objective_tol = 1e-6;  // relative
  Real purity_tol = 1e-5;
  Real barrier_growth = 10.0;
  Real final_gap = 1e-10;  // relative duality-gap bound at which the barrier stops
  Real max_barrier = 1e15;
  int max_newton_per_stage = 200;
};

/// min Tr[V_p] subject to V - V_p >= 0 and V_p + i Omega >= 0, by a
/// log-barrier interior-point method in the Williamson frame of V.
Decomposition decompose_sdp(const CovMatrix& V, const DecomposeOptions& options = {});

/// V_p = S S^T, W = S (D - 1) S^T from the Williamson decomposition of V.
Decomposition williamson_split(const CovMatrix& V);

struct SingleModeWilliamsonSplit {
  Real t = 0.0;     // squeezing of the pure part
  Real n_th = 0.0;  // thermal occupation
};

SingleModeWilliamsonSplit williamson_split_single_mode(Real r, Real eta);

/// Tr[V_p - 1] / 4.
Real actual_squeezed_photons(const CovMatrix& Vp);

/// One-line JSON summary of a decomposition.
std::string stats_json(const Decomposition& d);

}  // namespace gbsmps

#endif  // GBSMPS_DECOMPOSE_HPP
