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

// Sampling photon patterns of V = V_p + W: a Gaussian random displacement
// drawn from W is applied to the MPS of V_p, then the pattern is drawn site
// by site from chain-rule conditionals.

#ifndef GBSMPS_SAMPLER_HPP
#define GBSMPS_SAMPLER_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "gbsmps/gaussian.hpp"
#include "gbsmps/mps.hpp"
#include "gbsmps/rng.hpp"
#include "gbsmps/types.hpp"

namespace gbsmps {

inline constexpr int kDefaultSampleCutoff = 10;

struct DisplacementDraw {
  VectorR delta;  // quadrature shifts, xxpp
  VectorC beta;   // (delta_x + i delta_p) / 2
};

/// delta = L z with W = L L^T from a clamped eigendecomposition.
class DisplacementSampler {
 public:
  /// Throws ValidationError if W has an eigenvalue below -1e-8.
  explicit DisplacementSampler(const MatrixR& W);

  DisplacementDraw draw(RandomStream& rng) const;
  int modes() const { return static_cast<int>(L_.rows() / 2); }
  bool trivial() const { return trivial_; }

 private:
  MatrixR L_;
  bool trivial_ = false;
};

DisplacementDraw draw_displacement(const MatrixR& W, RandomStream& rng);

/// Applies D(beta_k) to each site's local index at cutoff d_sample. The input
/// local dimension is zero-padded when d_sample exceeds it.
MpsState displace_tensors(const MpsState& mps, const VectorC& beta, int d_sample);

struct ChainStats {
  Real max_leakage = 0.0;  // largest per-site conditional mass deficit
  int leaky_sites = 0;     // sites with deficit above 1e-4
};

/// One pattern from the chain rule over a (displaced) MPS. Throws
/// ResourceCapError when a conditional has total mass below 1e-9.
Pattern sample_chain(const MpsState& mps, RandomStream& rng, ChainStats* stats = nullptr);

enum class Detector { kPnr, kThreshold };

const char* detector_name(Detector d);
Detector parse_detector(const std::string& name);

/// Elementwise m_k > 0.
Pattern to_clicks(std::span<const int> m);

struct SampleBatch {
  int modes = 0;
  std::uint64_t seed = 0;
  Detector detector = Detector::kPnr;
  std::vector<Pattern> patterns;
  ChainStats stats;

  int shots() const { return static_cast<int>(patterns.size()); }
};

struct SampleOptions {
  int d_sample = kDefaultSampleCutoff;
  Detector detector = Detector::kPnr;
  int workers = 0;
};

/// Shot i uses stream (seed, sample-shot stage, i) for both its displacement
/// and its chain draws.
SampleBatch sample_batch(const MpsState& mps, const MatrixR& W, int shots, std::uint64_t seed,
                         const SampleOptions& options = {});

void write_samples(std::ostream& out, const SampleBatch& batch);
void write_samples(const std::filesystem::path& file, const SampleBatch& batch);
SampleBatch read_samples(std::istream& in);
SampleBatch read_samples(const std::filesystem::path& file);

struct Estimate {
  Real value = 0.0;
  Real stderr_ = 0.0;
};

/// Mixed-radix table of probabilities over [0, cutoff)^M.
struct PatternTable {
  int modes = 0;
  int cutoff = 0;
  std::vector<Real> p;
  std::vector<Real> err;

  std::size_t index(std::span<const int> m) const;
  Pattern pattern(std::size_t index) const;
  /// Zero for patterns outside the table.
  Real probability(std::span<const int> m) const;
};

/// Dense Monte-Carlo reference: averages |<m|D(beta)|psi_p>|^2 over draws of
/// beta, with psi_p assembled entrywise from Fock amplitudes.
class GaussianOracle {
 public:
  /// psi_p is held on [0, psi_cutoff)^M (defaults to cutoff + 4, at most 12).
  GaussianOracle(const CovMatrix& Vp, const MatrixR& W, int cutoff, int psi_cutoff = 0);

  Estimate probability(std::span<const int> m, int draws, std::uint64_t seed) const;
  PatternTable distribution(int draws, std::uint64_t seed) const;

  int modes() const { return modes_; }
  int cutoff() const { return cutoff_; }
  const std::vector<Complex>& statevector() const { return psi_; }

 private:
  std::vector<Complex> displaced(const VectorC& beta, std::span<const int> rows) const;

  int modes_;
  int cutoff_;
  int psi_cutoff_;
  std::vector<Complex> psi_;
  DisplacementSampler noise_;
};

inline constexpr int kOracleMaxModes = 6;
inline constexpr int kOracleMaxCutoff = 8;

}  // namespace gbsmps

#endif  // GBSMPS_SAMPLER_HPP
