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

// Statistics for judging a sampler against a reference distribution.

#ifndef GBSMPS_BENCHMARK_HPP
#define GBSMPS_BENCHMARK_HPP

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "gbsmps/gaussian.hpp"
#include "gbsmps/sampler.hpp"
#include "gbsmps/types.hpp"

namespace gbsmps {

inline constexpr int kMaxCumulantOrder = 6;
inline constexpr int kDefaultBootstrap = 1000;
inline constexpr int kDefaultSubsetBudget = 20000;

/// Binomial coefficient as a real (exact for the sizes used here).
Real binomial(int n, int k);

/// Reference probabilities p(m) with photon-sector totals Pr(N).
class ReferenceModel {
 public:
  explicit ReferenceModel(PatternTable table);

  Real probability(std::span<const int> m) const { return table_.probability(m); }
  /// Pr(N); sectors at or above the table cutoff are incomplete.
  Real sector(int N) const;
  const PatternTable& table() const { return table_; }
  int modes() const { return table_.modes; }

 private:
  PatternTable table_;
  std::vector<Real> sectors_;
};

/// Click-pattern distribution induced by a photon-number table.
PatternTable click_table(const PatternTable& pnr);

struct SectorXeb {
  int N = 0;
  Real xe = 0.0;
  Real stderr_ = 0.0;
  int count = 0;          // in-sector samples used
  int excluded = 0;       // in-sector samples with zero reference probability
  Real normalization = 0.0;
};

/// XE_N = mean over in-sector samples of log(p(S) / norm), with
/// norm = Pr(N) / C(N + M - 1, N) for photon counting and Pr(N) / C(M, N)
/// for threshold detection. Throws ValidationError on an empty sector.
SectorXeb xeb(const SampleBatch& samples, const ReferenceModel& model, int N, Detector detector);

/// Every sector with at least one sample below the model cutoff.
std::vector<SectorXeb> xeb_all(const SampleBatch& samples, const ReferenceModel& model,
                               Detector detector);

using Counts = std::map<Pattern, Real>;

Counts count_patterns(const SampleBatch& samples);

/// Half the L1 distance between the normalized count vectors.
Real tvd_empirical(const Counts& a, const Counts& b);

/// TVD between an empirical batch and a reference table (mass outside the
/// table counts as disagreement).
Real tvd_to_reference(const SampleBatch& samples, const PatternTable& table);

/// Weighted observations: rows of per-mode values with nonnegative weights
/// summing to one. Built from samples (uniform weights) or a table.
struct WeightedData {
  std::vector<Pattern> rows;
  std::vector<Real> weights;

  static WeightedData from_samples(const SampleBatch& samples, bool clicks = false);
  static WeightedData from_table(const PatternTable& table, bool clicks = false);
};

/// Joint cumulant of the listed modes via the recursion over set partitions.
/// Throws ValidationError when the subset is empty or larger than 6.
Real cumulant(const WeightedData& data, std::span<const int> modes);

/// Same quantity from the closed moment expansion
/// sum_pi (-1)^{|pi|-1} (|pi|-1)! prod_b E[prod_{i in b} n_i].
Real cumulant_moment_expansion(const WeightedData& data, std::span<const int> modes);

struct CumulantTable {
  int order = 0;
  std::vector<Pattern> subsets;
  std::vector<Real> kappa;
  std::vector<Real> stderr_;  // bootstrap, empty when not requested
};

CumulantTable cumulant_table(const WeightedData& data, int order,
                             const std::vector<Pattern>& subsets);

struct TwoPointStats {
  Real slope = 0.0;         // ordinary least squares with intercept
  Real intercept = 0.0;
  Real slope_origin = 0.0;  // least squares through the origin
  Real pearson = 0.0;
  Real distance = 0.0;      // Euclidean norm of the difference
};

/// Regresses `sample` on `truth`. Throws ValidationError when truth is constant.
TwoPointStats two_point_stats(std::span<const Real> sample, std::span<const Real> truth);

/// All pairs i < j in lexicographic order.
std::vector<Pattern> all_pairs(int modes);

/// Cov(n_i, n_j) (or click covariances) of a zero-mean Gaussian state; the
/// diagonal holds variances.
MatrixR ground_truth_two_point(const CovMatrix& V, Detector detector);

/// Upper-triangle entries of a two-point matrix in all_pairs order.
std::vector<Real> pair_values(const MatrixR& kappa2);

/// Sample two-point cumulants in all_pairs order.
std::vector<Real> sample_two_point(const SampleBatch& samples, Detector detector);

struct BayesScore {
  Real score = 0.0;
  Real stderr_ = 0.0;
  int used = 0;
  int excluded = 0;
};

/// Mean of log[P_G(m) P_s(N) / (P_s(m) P_G(N))] over the samples.
BayesScore bayesian_score(const SampleBatch& samples, const ReferenceModel& ground_truth,
                          const ReferenceModel& mockup);

struct OrderCorrelation {
  int order = 0;
  int subsets = 0;
  Real spearman = 0.0;
  Real stderr_ = 0.0;  // bootstrap standard deviation
  Real ci_low = 0.0;   // 2.5% bootstrap quantile
  Real ci_high = 0.0;  // 97.5% bootstrap quantile
};

struct SpearmanOptions {
  int max_order = 6;
  int budget = kDefaultSubsetBudget;
  int resamples = kDefaultBootstrap;
  std::uint64_t seed = 0;
  bool clicks = false;
  int workers = 0;
};

/// Spearman rank correlation between sample and reference cumulants, per
/// order, over all subsets (orders 1, 2) or up to `budget` random subsets.
std::vector<OrderCorrelation> spearman_by_order(const SampleBatch& samples,
                                                const PatternTable& truth,
                                                const SpearmanOptions& options);

/// Subsets of size k: all of them when there are at most `budget`, otherwise
/// `budget` distinct ones drawn from the subset stream of `seed`.
std::vector<Pattern> choose_subsets(int modes, int k, int budget, std::uint64_t seed);

Real spearman(std::span<const Real> a, std::span<const Real> b);
Real pearson(std::span<const Real> a, std::span<const Real> b);

}  // namespace gbsmps

#endif  // GBSMPS_BENCHMARK_HPP
