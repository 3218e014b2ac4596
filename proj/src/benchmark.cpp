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

#include "gbsmps/benchmark.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include <Eigen/LU>

#include "gbsmps/parallel.hpp"
#include "gbsmps/rng.hpp"

namespace gbsmps {

namespace {

using BlockList = std::vector<unsigned>;

// All set partitions of the bits of `mask`, each as a list of block masks.
const std::vector<BlockList>& partitions(unsigned mask) {
  static std::vector<std::vector<BlockList>> cache(1u << kMaxCumulantOrder);
  static std::vector<bool> ready(1u << kMaxCumulantOrder, false);
  // Filled once per mask; callers hold the static initialization below.
  if (ready[mask]) return cache[mask];
  std::vector<BlockList> out;
  if (mask == 0) {
    out.push_back({});
  } else {
    const unsigned first = mask & (~mask + 1);
    const unsigned rest = mask ^ first;
    // Enumerate submasks of `rest` joined with `first` as the first block.
    for (unsigned sub = rest;; sub = (sub - 1) & rest) {
      const unsigned block = sub | first;
      for (const BlockList& tail : partitions(mask ^ block)) {
        BlockList p;
        p.reserve(tail.size() + 1);
        p.push_back(block);
        p.insert(p.end(), tail.begin(), tail.end());
        out.push_back(std::move(p));
      }
      if (sub == 0) break;
    }
  }
  cache[mask] = std::move(out);
  ready[mask] = true;
  return cache[mask];
}

// Builds the partition cache for all masks before any concurrent use.
const bool kPartitionsReady = [] {
  for (unsigned mask = 0; mask < (1u << kMaxCumulantOrder); ++mask) partitions(mask);
  return true;
}();

void check_subset(std::span<const int> modes) {
  if (modes.empty()) throw ValidationError("cumulant needs at least one mode");
  if (modes.size() > static_cast<std::size_t>(kMaxCumulantOrder)) {
    throw ValidationError("cumulant order above 6 is not supported");
  }
}

// E[prod_{i in mask} n_{modes[i]}] for every submask.
std::vector<Real> submask_moments(const std::vector<Pattern>& rows, const std::vector<Real>& w,
                                  std::span<const int> modes) {
  const int k = static_cast<int>(modes.size());
  const unsigned full = (1u << k) - 1;
  std::vector<Real> m(full + 1, 0.0);
  std::vector<Real> prod(full + 1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (w[r] == 0.0) continue;
    prod[0] = 1.0;
    for (unsigned mask = 1; mask <= full; ++mask) {
      const int bit = std::countr_zero(mask);
      prod[mask] = prod[mask & (mask - 1)] * rows[r][modes[bit]];
    }
    for (unsigned mask = 0; mask <= full; ++mask) m[mask] += w[r] * prod[mask];
  }
  return m;
}

Real recursive_from_moments(const std::vector<Real>& m, int k) {
  const unsigned full = (1u << k) - 1;
  std::vector<Real> kappa(full + 1, 0.0);
  // Submasks are processed in increasing order, so every proper block is
  // already resolved when a mask is reached.
  for (unsigned mask = 1; mask <= full; ++mask) {
    Real acc = m[mask];
    for (const BlockList& p : partitions(mask)) {
      if (p.size() < 2) continue;
      Real term = 1.0;
      for (unsigned b : p) term *= kappa[b];
      acc -= term;
    }
    kappa[mask] = acc;
  }
  return kappa[full];
}

Real expansion_from_moments(const std::vector<Real>& m, int k) {
  const unsigned full = (1u << k) - 1;
  Real total = 0.0;
  for (const BlockList& p : partitions(full)) {
    const int blocks = static_cast<int>(p.size());
    Real term = std::tgamma(static_cast<Real>(blocks));  // (|pi| - 1)!
    if (blocks % 2 == 0) term = -term;
    for (unsigned b : p) term *= m[b];
    total += term;
  }
  return total;
}

Real mean(std::span<const Real> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<Real>(v.size());
}

std::vector<Real> ranks(std::span<const Real> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<Real> out(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const Real avg = 0.5 * static_cast<Real>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) out[order[t]] = avg;
    i = j + 1;
  }
  return out;
}

Real quantile_sorted(const std::vector<Real>& sorted, Real q) {
  if (sorted.empty()) return std::numeric_limits<Real>::quiet_NaN();
  const Real pos = q * static_cast<Real>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<Real>(lo)) * (sorted[hi] - sorted[lo]);
}

// Unique rows with their multiplicities, for fast bootstrap reweighting.
struct Compressed {
  std::vector<Pattern> rows;
  std::vector<int> shot_to_row;
};

Compressed compress(const std::vector<Pattern>& shots) {
  Compressed c;
  std::map<Pattern, int> ids;
  c.shot_to_row.reserve(shots.size());
  for (const Pattern& p : shots) {
    auto [it, inserted] = ids.emplace(p, static_cast<int>(c.rows.size()));
    if (inserted) c.rows.push_back(p);
    c.shot_to_row.push_back(it->second);
  }
  return c;
}

}  // namespace

Real binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  Real out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return std::round(out);
}

ReferenceModel::ReferenceModel(PatternTable table) : table_(std::move(table)) {
  sectors_.assign(table_.modes * std::max(0, table_.cutoff - 1) + 1, 0.0);
  for (std::size_t i = 0; i < table_.p.size(); ++i) {
    sectors_[pattern_total(table_.pattern(i))] += table_.p[i];
  }
}

Real ReferenceModel::sector(int N) const {
  if (N < 0 || N >= static_cast<int>(sectors_.size())) return 0.0;
  return sectors_[N];
}

PatternTable click_table(const PatternTable& pnr) {
  PatternTable out;
  out.modes = pnr.modes;
  out.cutoff = 2;
  std::size_t size = 1;
  for (int i = 0; i < pnr.modes; ++i) size *= 2;
  out.p.assign(size, 0.0);
  out.err.assign(size, 0.0);
  for (std::size_t i = 0; i < pnr.p.size(); ++i) {
    out.p[out.index(to_clicks(pnr.pattern(i)))] += pnr.p[i];
  }
  return out;
}

SectorXeb xeb(const SampleBatch& samples, const ReferenceModel& model, int N, Detector detector) {
  const int m = model.modes();
  if (samples.modes != m) throw ValidationError("sample and model mode counts differ");
  SectorXeb out;
  out.N = N;
  const Real pr = model.sector(N);
  if (!(pr > 0.0)) throw ValidationError("reference assigns no probability to the sector");
  const Real combos = detector == Detector::kPnr ? binomial(N + m - 1, N) : binomial(m, N);
  out.normalization = pr / combos;
  Real sum = 0.0, sq = 0.0;
  for (const Pattern& p : samples.patterns) {
    const Pattern view = detector == Detector::kThreshold ? to_clicks(p) : p;
    if (pattern_total(view) != N) continue;
    const Real prob = model.probability(view);
    if (!(prob > 0.0)) {
      ++out.excluded;
      continue;
    }
    const Real v = std::log(prob / out.normalization);
    sum += v;
    sq += v * v;
    ++out.count;
  }
  if (out.count == 0) {
    std::ostringstream msg;
    msg << "no usable samples in photon sector " << N;
    throw ValidationError(msg.str());
  }
  out.xe = sum / out.count;
  const Real var = out.count > 1 ? std::max(0.0, (sq - out.count * out.xe * out.xe) / (out.count - 1)) : 0.0;
  out.stderr_ = std::sqrt(var / out.count);
  return out;
}

std::vector<SectorXeb> xeb_all(const SampleBatch& samples, const ReferenceModel& model,
                               Detector detector) {
  std::set<int> sectors;
  for (const Pattern& p : samples.patterns) {
    const Pattern view = detector == Detector::kThreshold ? to_clicks(p) : p;
    if (model.sector(pattern_total(view)) > 0.0) sectors.insert(pattern_total(view));
  }
  std::vector<SectorXeb> out;
  for (int N : sectors) {
    try {
      out.push_back(xeb(samples, model, N, detector));
    } catch (const ValidationError&) {
      // Sector populated only by zero-probability samples.
    }
  }
  return out;
}

Counts count_patterns(const SampleBatch& samples) {
  Counts c;
  for (const Pattern& p : samples.patterns) c[p] += 1.0;
  return c;
}

Real tvd_empirical(const Counts& a, const Counts& b) {
  Real na = 0.0, nb = 0.0;
  for (const auto& [p, v] : a) na += v;
  for (const auto& [p, v] : b) nb += v;
  if (na <= 0.0 || nb <= 0.0) throw ValidationError("TVD needs nonempty count tables");
  Real total = 0.0;
  for (const auto& [p, v] : a) {
    const auto it = b.find(p);
    total += std::abs(v / na - (it == b.end() ? 0.0 : it->second / nb));
  }
  for (const auto& [p, v] : b) {
    if (!a.contains(p)) total += v / nb;
  }
  return 0.5 * total;
}

Real tvd_to_reference(const SampleBatch& samples, const PatternTable& table) {
  if (samples.shots() == 0) throw ValidationError("TVD needs samples");
  std::vector<Real> freq(table.p.size(), 0.0);
  Real outside = 0.0;
  const Real w = 1.0 / samples.shots();
  for (const Pattern& p : samples.patterns) {
    bool inside = static_cast<int>(p.size()) == table.modes;
    for (int v : p) inside = inside && v < table.cutoff;
    if (inside) {
      freq[table.index(p)] += w;
    } else {
      outside += w;
    }
  }
  Real total = outside;
  for (std::size_t i = 0; i < freq.size(); ++i) total += std::abs(freq[i] - table.p[i]);
  return 0.5 * total;
}

WeightedData WeightedData::from_samples(const SampleBatch& samples, bool clicks) {
  WeightedData d;
  const Real w = samples.shots() > 0 ? 1.0 / samples.shots() : 0.0;
  d.rows.reserve(samples.patterns.size());
  for (const Pattern& p : samples.patterns) d.rows.push_back(clicks ? to_clicks(p) : p);
  d.weights.assign(d.rows.size(), w);
  return d;
}

WeightedData WeightedData::from_table(const PatternTable& table, bool clicks) {
  WeightedData d;
  for (std::size_t i = 0; i < table.p.size(); ++i) {
    if (table.p[i] == 0.0) continue;
    const Pattern p = table.pattern(i);
    d.rows.push_back(clicks ? to_clicks(p) : p);
    d.weights.push_back(table.p[i]);
  }
  return d;
}

Real cumulant(const WeightedData& data, std::span<const int> modes) {
  check_subset(modes);
  return recursive_from_moments(submask_moments(data.rows, data.weights, modes),
                                static_cast<int>(modes.size()));
}

Real cumulant_moment_expansion(const WeightedData& data, std::span<const int> modes) {
  check_subset(modes);
  return expansion_from_moments(submask_moments(data.rows, data.weights, modes),
                                static_cast<int>(modes.size()));
}

CumulantTable cumulant_table(const WeightedData& data, int order,
                             const std::vector<Pattern>& subsets) {
  CumulantTable t;
  t.order = order;
  t.subsets = subsets;
  t.kappa.resize(subsets.size());
  parallel_for(subsets.size(), [&](std::size_t i) { t.kappa[i] = cumulant(data, subsets[i]); });
  return t;
}

Real pearson(std::span<const Real> a, std::span<const Real> b) {
  if (a.size() != b.size() || a.size() < 2) throw ValidationError("pearson needs paired vectors");
  const Real ma = mean(a), mb = mean(b);
  Real sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<Real>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

Real spearman(std::span<const Real> a, std::span<const Real> b) {
  const std::vector<Real> ra = ranks(a), rb = ranks(b);
  return pearson(ra, rb);
}

TwoPointStats two_point_stats(std::span<const Real> sample, std::span<const Real> truth) {
  if (sample.size() != truth.size() || truth.size() < 2) {
    throw ValidationError("two-point statistics need paired vectors of length >= 2");
  }
  const Real mx = mean(truth), my = mean(sample);
  Real sxx = 0.0, sxy = 0.0, xx = 0.0, xy = 0.0, dist = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    sxx += (truth[i] - mx) * (truth[i] - mx);
    sxy += (truth[i] - mx) * (sample[i] - my);
    xx += truth[i] * truth[i];
    xy += truth[i] * sample[i];
    dist += (sample[i] - truth[i]) * (sample[i] - truth[i]);
  }
  if (sxx == 0.0) throw ValidationError("ground-truth two-point vector is constant");
  TwoPointStats out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.slope_origin = xy / xx;
  out.pearson = pearson(sample, truth);
  out.distance = std::sqrt(dist);
  return out;
}

std::vector<Pattern> all_pairs(int modes) {
  std::vector<Pattern> out;
  for (int i = 0; i < modes; ++i) {
    for (int j = i + 1; j < modes; ++j) out.push_back({i, j});
  }
  return out;
}

MatrixR ground_truth_two_point(const CovMatrix& V, Detector detector) {
  const int m = V.modes();
  const MatrixR& C = V.matrix();
  MatrixR K(m, m);
  if (detector == Detector::kPnr) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (i == j) {
          const Real xx = C(i, i), pp = C(m + i, m + i), xp = C(i, m + i);
          K(i, i) = (xx * xx + pp * pp + 2.0 * xp * xp) / 8.0 - 0.25;
        } else {
          const Real a = C(i, j), b = C(i, m + j), c = C(m + i, j), d = C(m + i, m + j);
          K(i, j) = (a * a + b * b + c * c + d * d) / 8.0;
        }
      }
    }
    return K;
  }
  // No-click probability of a zero-mean Gaussian marginal: det((V + 1)/2)^{-1/2}.
  auto vacuum_overlap = [&](std::span<const int> idx) {
    const CovMatrix R = reduced_covariance(V, idx);
    const auto n = R.matrix().rows();
    const MatrixR half = 0.5 * (R.matrix() + MatrixR::Identity(n, n));
    return 1.0 / std::sqrt(half.determinant());
  };
  VectorR p0(m);
  for (int i = 0; i < m; ++i) {
    const int idx[] = {i};
    p0(i) = vacuum_overlap(idx);
  }
  for (int i = 0; i < m; ++i) {
    K(i, i) = p0(i) * (1.0 - p0(i));
    for (int j = i + 1; j < m; ++j) {
      const int idx[] = {i, j};
      K(i, j) = K(j, i) = vacuum_overlap(idx) - p0(i) * p0(j);
    }
  }
  return K;
}

std::vector<Real> pair_values(const MatrixR& kappa2) {
  std::vector<Real> out;
  for (const Pattern& p : all_pairs(static_cast<int>(kappa2.rows()))) out.push_back(kappa2(p[0], p[1]));
  return out;
}

std::vector<Real> sample_two_point(const SampleBatch& samples, Detector detector) {
  const WeightedData data = WeightedData::from_samples(samples, detector == Detector::kThreshold);
  std::vector<Real> out;
  for (const Pattern& p : all_pairs(samples.modes)) out.push_back(cumulant(data, p));
  return out;
}

BayesScore bayesian_score(const SampleBatch& samples, const ReferenceModel& ground_truth,
                          const ReferenceModel& mockup) {
  BayesScore out;
  Real sum = 0.0, sq = 0.0;
  for (const Pattern& p : samples.patterns) {
    const int N = pattern_total(p);
    const Real pg = ground_truth.probability(p), ps = mockup.probability(p);
    const Real ng = ground_truth.sector(N), ns = mockup.sector(N);
    if (!(pg > 0.0 && ps > 0.0 && ng > 0.0 && ns > 0.0)) {
      ++out.excluded;
      continue;
    }
    const Real v = std::log(pg) + std::log(ns) - std::log(ps) - std::log(ng);
    sum += v;
    sq += v * v;
    ++out.used;
  }
  if (out.used == 0) throw ValidationError("no samples have support under both models");
  out.score = sum / out.used;
  const Real var = out.used > 1 ? std::max(0.0, (sq - out.used * out.score * out.score) / (out.used - 1)) : 0.0;
  out.stderr_ = std::sqrt(var / out.used);
  return out;
}

std::vector<Pattern> choose_subsets(int modes, int k, int budget, std::uint64_t seed) {
  if (k < 1 || k > modes) return {};
  if (budget < 1) throw ValidationError("subset budget must be positive");
  std::vector<Pattern> out;
  if (binomial(modes, k) <= budget) {
    Pattern s(k);
    std::iota(s.begin(), s.end(), 0);
    while (true) {
      out.push_back(s);
      int i = k - 1;
      while (i >= 0 && s[i] == modes - k + i) --i;
      if (i < 0) break;
      ++s[i];
      for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
    }
    return out;
  }
  RandomStream rng(seed, stage::kSubsets, static_cast<std::uint64_t>(k));
  std::set<Pattern> seen;
  std::vector<int> pool(modes);
  while (static_cast<int>(out.size()) < budget) {
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
      const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(modes - i)));
      std::swap(pool[i], pool[j]);
    }
    Pattern s(pool.begin(), pool.begin() + k);
    std::sort(s.begin(), s.end());
    if (seen.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

std::vector<OrderCorrelation> spearman_by_order(const SampleBatch& samples,
                                                const PatternTable& truth,
                                                const SpearmanOptions& options) {
  if (samples.shots() == 0) throw ValidationError("spearman_by_order needs samples");
  const int m = samples.modes;
  const WeightedData reference = WeightedData::from_table(truth, options.clicks);
  const WeightedData empirical = WeightedData::from_samples(samples, options.clicks);
  const Compressed packed = compress(empirical.rows);
  const int workers = options.workers > 0 ? options.workers : worker_count();
  const int shots = samples.shots();

  std::vector<OrderCorrelation> out;
  for (int k = 1; k <= std::min({options.max_order, m, kMaxCumulantOrder}); ++k) {
    const std::vector<Pattern> subsets = choose_subsets(m, k, options.budget, options.seed);
    if (subsets.size() < 2) continue;
    std::vector<Real> truth_kappa(subsets.size()), sample_kappa(subsets.size());
    std::vector<Real> base_w(packed.rows.size(), 0.0);
    for (int id : packed.shot_to_row) base_w[id] += 1.0 / shots;
    parallel_for(
        subsets.size(),
        [&](std::size_t i) {
          truth_kappa[i] = cumulant(reference, subsets[i]);
          sample_kappa[i] = recursive_from_moments(submask_moments(packed.rows, base_w, subsets[i]), k);
        },
        workers);
    OrderCorrelation oc;
    oc.order = k;
    oc.subsets = static_cast<int>(subsets.size());
    oc.spearman = spearman(sample_kappa, truth_kappa);

    std::vector<Real> boot(options.resamples);
    parallel_for(
        static_cast<std::size_t>(options.resamples),
        [&](std::size_t r) {
          RandomStream rng(options.seed, stage::kBootstrap, r * 8 + static_cast<std::size_t>(k));
          std::vector<Real> w(packed.rows.size(), 0.0);
          for (int s = 0; s < shots; ++s) {
            w[packed.shot_to_row[rng.below(static_cast<std::uint64_t>(shots))]] += 1.0 / shots;
          }
          std::vector<Real> kap(subsets.size());
          for (std::size_t i = 0; i < subsets.size(); ++i) {
            kap[i] = recursive_from_moments(submask_moments(packed.rows, w, subsets[i]), k);
          }
          boot[r] = spearman(kap, truth_kappa);
        },
        workers);
    std::vector<Real> finite;
    for (Real b : boot) {
      if (std::isfinite(b)) finite.push_back(b);
    }
    std::sort(finite.begin(), finite.end());
    if (finite.size() > 1) {
      const Real mu = mean(finite);
      Real var = 0.0;
      for (Real b : finite) var += (b - mu) * (b - mu);
      oc.stderr_ = std::sqrt(var / static_cast<Real>(finite.size() - 1));
    }
    oc.ci_low = quantile_sorted(finite, 0.025);
    oc.ci_high = quantile_sorted(finite, 0.975);
    out.push_back(oc);
  }
  return out;
}

}  // namespace gbsmps
