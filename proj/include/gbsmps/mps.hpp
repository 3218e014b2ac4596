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

// Matrix product state of a pure Gaussian state, built directly from the
// thermal Schmidt spectra of its bipartitions.
//
// For bond k (between modes k and k+1, 1-based) the reduced state on modes
// k+1..M is U_k rho_T U_k^dagger, so its Schmidt vectors are U_k|n_alpha> with
// weights p_T(n_alpha). Site tensors are matrix elements
//
//   A[k]_{a, n, b} = <n, n_b| (1 (+) U_k)^dagger U_{k-1} |n_a>
//
// and Gamma[k] = A[k] / lambda[k] (the last site keeps A), so that
// psi(n_1..n_M) = Gamma[1] lambda[1] Gamma[2] ... lambda[M-1] Gamma[M].

#ifndef GBSMPS_MPS_HPP
#define GBSMPS_MPS_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gbsmps/gaussian.hpp"
#include "gbsmps/hafnian.hpp"
#include "gbsmps/types.hpp"

namespace gbsmps {

/// Patterns whose thermal weight falls below this carry no amplitude and
/// are not enumerated (lambda < 1e-12).
inline constexpr Real kMinPatternWeight = 1e-24;
inline constexpr Real kMinLambda = 1e-12;

/// Dense rank-3 tensor T(n, a, b), stored n-major then row-major.
struct SiteTensor {
  int d = 0;
  int left = 0;
  int right = 0;
  std::vector<Complex> data;

  SiteTensor() = default;
  SiteTensor(int d, int left, int right)
      : d(d), left(left), right(right), data(static_cast<std::size_t>(d) * left * right) {}

  Complex& operator()(int n, int a, int b) {
    return data[(static_cast<std::size_t>(n) * left + a) * right + b];
  }
  Complex operator()(int n, int a, int b) const {
    return data[(static_cast<std::size_t>(n) * left + a) * right + b];
  }
  /// The (left x right) slice for local index n.
  MatrixC slice(int n) const;
};

struct BondSpectrum {
  VectorR nbar;                  // thermal means of the right block
  std::vector<Pattern> patterns;  // kept patterns, weight nonincreasing
  std::vector<Real> weights;     // p_T of each kept pattern
  SymplecticMatrix S;            // Williamson symplectic of the right block

  VectorR lambda() const;
};

/// Thermal weight prod nbar^n / (nbar + 1)^(n + 1).
Real thermal_weight(const VectorR& nbar, std::span<const int> n);

/// The `limit` heaviest patterns of a product of geometric laws, best first,
/// ties broken by the lexicographically smallest pattern. Weights below
/// `min_weight` are dropped.
std::vector<Pattern> top_patterns(const VectorR& nbar, int limit, Real min_weight = kMinPatternWeight);

/// Spectrum of bond k in [0, M): modes k..M-1 (0-based) form the right block.
/// Bond 0 is the whole state and has the single vacuum pattern.
BondSpectrum bond_spectrum(const CovMatrix& Vp, int k, int chi);

struct MpsState {
  int modes = 0;
  int d = 0;
  int chi = 0;
  std::vector<SiteTensor> gamma;              // one per mode
  std::vector<VectorR> lambda;                // one per bond 1..M-1
  std::vector<std::vector<Pattern>> patterns;  // one per bond 1..M-1

  /// Right-canonical site tensor Gamma[k] lambda[k] (0-based k).
  SiteTensor right_canonical(int k) const;
  int bond_dim(int bond) const { return static_cast<int>(lambda[bond - 1].size()); }
};

struct TruncationReport {
  std::vector<Real> epsilon;  // lost weight at bonds 1..M-1
  Real center_error = 0.0;    // epsilon at bond floor(M/2)
  int l_max = 0;              // largest kept pattern total
  int max_hafnian_size = 0;   // largest hafnian evaluated
};

struct MpsOptions {
  int chi = 16;
  int d = 4;
  int max_hafnian_size = kDefaultMaxHafnianSize;
  int workers = 0;  // 0 selects worker_count()
};

struct MpsBuild {
  MpsState state;
  TruncationReport report;
};

MpsBuild build_mps(const CovMatrix& Vp, const MpsOptions& options);

Real truncation_error(const TruncationReport& report);

/// <m|psi>; zero when some m_k is outside the local cutoff.
Complex contract_amplitude(const MpsState& mps, std::span<const int> m);

/// Binary persistence: mode_XXXX.bin per site, bond_XXXX.lambda per bond and
/// manifest.json.
void save_mps(const MpsBuild& build, const std::filesystem::path& dir,
              const std::string& config_hash);
MpsBuild load_mps(const std::filesystem::path& dir);

void write_site_tensor(const std::filesystem::path& file, int k, const SiteTensor& t);
SiteTensor read_site_tensor(const std::filesystem::path& file, int* k = nullptr);

}  // namespace gbsmps

#endif  // GBSMPS_MPS_HPP
