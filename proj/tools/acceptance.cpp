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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Tolerances are fixed here on purpose.
//
//   gbsmps_acceptance            all criteria
//   gbsmps_acceptance 3 5 12     a subset

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "gbsmps/benchmark.hpp"
#include "gbsmps/decompose.hpp"
#include "gbsmps/estimate.hpp"
#include "gbsmps/gaussian.hpp"
#include "gbsmps/hafnian.hpp"
#include "gbsmps/io.hpp"
#include "gbsmps/mps.hpp"
#include "gbsmps/pipeline.hpp"
#include "gbsmps/sampler.hpp"

namespace gbsmps {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

// The M = 3 reference circuit: r = 0.8 on every mode, a fixed Haar
// interferometer, uniform transmission 0.5.
constexpr std::uint64_t kReferenceSeed = 1;

CovMatrix reference_circuit() {
  return apply_loss(apply_passive(squeezed_input(VectorR::Constant(3, 0.8)), haar_unitary(3, kReferenceSeed)),
                    0.5);
}

CovMatrix single_mode(Real r, Real eta) {
  VectorR rv(1);
  rv << r;
  return apply_loss(squeezed_input(rv), eta);
}

// Pure single-mode squeezing from Tr V_p = 2 cosh 2s.
Real pure_squeezing(const CovMatrix& Vp) { return 0.5 * std::acosh(0.5 * Vp.matrix().trace()); }

std::vector<std::pair<Real, Real>> grid() {
  std::vector<std::pair<Real, Real>> g;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) g.emplace_back(2.0 * i / 19.0, 0.05 + 0.9 * j / 19.0);
  }
  return g;
}

Outcome criterion1() {
  Real worst = 0.0;
  for (auto [r, eta] : grid()) {
    const Decomposition d = decompose_sdp(single_mode(r, eta));
    worst = std::max(worst, std::abs(pure_squeezing(d.Vp) - decompose_single_mode(r, eta).s));
  }
  Real worst_limit = 0.0;
  for (int j = 0; j < 20; ++j) {
    const Real eta = 0.05 + 0.9 * j / 19.0;
    worst_limit = std::max(worst_limit, std::abs(decompose_single_mode(20.0, eta).s - infinite_squeezing_limit(eta)));
  }
  return {worst <= 1e-6 && worst_limit <= 1e-6,
          fmt("max |s_sdp - s_closed| = %.2e, max |s(r=20) - s_max| = %.2e (tol 1e-6)", worst, worst_limit)};
}

Outcome criterion2() {
  int checked = 0, violations = 0;
  Real tightest = 1e300;
  for (auto [r, eta] : grid()) {
    if (r == 0.0) continue;
    const CovMatrix V = single_mode(r, eta);
    const Real sdp = decompose_sdp(V).Vp.matrix().trace();
    const Real wil = williamson_split(V).Vp.matrix().trace();
    ++checked;
    if (!(sdp < wil)) ++violations;
    tightest = std::min(tightest, wil - sdp);
  }
  return {violations == 0,
          fmt("%d/%d grid points with Tr V_p(sdp) < Tr V_p(williamson); smallest gap %.3e", checked - violations,
              checked, tightest)};
}

Outcome criterion3() {
  Real worst = 0.0;
  int count = 0;
  for (int i = 0; i < 200; ++i) {
    const int n = 2 * (1 + i % 6);
    RandomStream rng(2026, stage::kOracle, static_cast<std::uint64_t>(i));
    MatrixC X(n, n);
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) X(a, b) = X(b, a) = Complex(rng.normal(), rng.normal());
    }
    const Complex fast = hafnian(X), brute = hafnian_brute(X);
    worst = std::max(worst, std::abs(fast - brute) / std::max(std::abs(brute), 1e-300));
    ++count;
  }
  return {worst <= 1e-9, fmt("%d matrices of size 2..12, max relative error %.2e (tol 1e-9)", count, worst)};
}

Outcome criterion4() {
  Real worst = 0.0;
  int patterns = 0;
  for (std::uint64_t seed : {101u, 102u, 103u}) {
    RandomStream rng(seed, stage::kCircuit, 0);
    VectorR r(4);
    for (int i = 0; i < 4; ++i) r(i) = 0.8 * (0.25 + 0.75 * rng.uniform());
    const CovMatrix V = apply_loss(apply_passive(squeezed_input(r), haar_unitary(4, seed)), 0.5);
    const CovMatrix Vp = decompose_sdp(V).Vp;
    const GaussianUnitaryFactors f = bloch_messiah(williamson(Vp).S);
    const MpsBuild b = build_mps(Vp, {.chi = 27, .d = 3});
    const Pattern zero(4, 0);
    Pattern m(4, 0);
    while (true) {
      if (pattern_total(m) <= 4) {
        worst = std::max(worst, std::abs(contract_amplitude(b.state, m) - fock_amplitude(f, m, zero)));
        ++patterns;
      }
      int k = 3;
      while (k >= 0 && ++m[k] == 3) m[k--] = 0;
      if (k < 0) break;
    }
  }
  return {worst <= 1e-8,
          fmt("3 lossy M=4 circuits (r <= 0.8), chi=27, d=3, %d amplitudes, max error %.2e (tol 1e-8)", patterns,
              worst)};
}

Outcome criterion5() {
  const Real s = 0.5;
  const MpsBuild full = build_mps(tmsv_covariance(s), {.chi = 12, .d = 12});
  Real worst = 0.0;
  const VectorR lambda = full.state.lambda[0];
  for (int n = 0; n < lambda.size(); ++n) {
    worst = std::max(worst, std::abs(lambda(n) - std::pow(std::tanh(s), n) / std::cosh(s)));
  }
  const MpsBuild one = build_mps(tmsv_covariance(s), {.chi = 1, .d = 4});
  const Real expect = 1.0 - 1.0 / std::pow(std::cosh(s), 2);
  const Real err = std::abs(truncation_error(one.report) - expect);
  return {worst <= 1e-8 && err <= 1e-10,
          fmt("max Schmidt error %.2e (tol 1e-8); chi=1 error %.6f vs 1 - 1/cosh^2 s = %.6f, diff %.1e (tol 1e-10)",
              worst, truncation_error(one.report), expect, err)};
}

Outcome criterion6() {
  const CovMatrix V = reference_circuit();
  const Decomposition d = decompose_sdp(V);
  const MpsState mps = build_mps(d.Vp, {.chi = 27, .d = 6}).state;
  const int shots = 200000;
  // A sampling cutoff of 10 drops enough displaced mass to bias the mean
  // low by about 0.003 here; 14 removes it.
  const SampleBatch b = sample_batch(mps, d.W, shots, 6, {.d_sample = 14});
  const GaussianOracle oracle(d.Vp, d.W, 6);
  const PatternTable table = oracle.distribution(20000, 6);
  const Real tvd = tvd_to_reference(b, table);
  Real sum = 0.0, sq = 0.0;
  for (const Pattern& p : b.patterns) {
    const Real t = pattern_total(p);
    sum += t;
    sq += t * t;
  }
  const Real mean = sum / shots;
  const Real se = std::sqrt((sq / shots - mean * mean) / shots);
  const Real expect = (V.matrix().trace() - 6.0) / 4.0;
  const Real z = std::abs(mean - expect) / se;
  return {tvd <= 0.03 && z <= 3.0,
          fmt("TVD %.4f (tol 0.03); mean photons %.4f +- %.4f vs %.4f (%.2f sigma, tol 3)", tvd, mean, se, expect, z)};
}

Outcome criterion7() {
  const Real nbar = 0.5;
  const int shots = 100000;
  const MpsState vac = build_mps(CovMatrix::vacuum(2), {.chi = 1, .d = 2}).state;
  const SampleBatch b = sample_batch(vac, 2.0 * nbar * MatrixR::Identity(4, 4), shots, 7);
  std::map<int, int> counts;
  for (const Pattern& p : b.patterns) ++counts[p[0]];
  Real worst_z = 0.0;
  int bins = 0;
  for (int n = 0; n <= 8; ++n) {
    const Real p = std::pow(nbar, n) / std::pow(1.0 + nbar, n + 1);
    const Real se = std::sqrt(p * (1.0 - p) / shots);
    worst_z = std::max(worst_z, std::abs(counts[n] / static_cast<Real>(shots) - p) / se);
    ++bins;
  }
  return {worst_z <= 3.0, fmt("geometric law nbar=%.1f over %d bins, worst deviation %.2f sigma (tol 3)", nbar, bins,
                              worst_z)};
}

// Bootstrap standard error of the TVD against a fixed table.
Real tvd_stderr(const SampleBatch& b, const PatternTable& table, int resamples, std::uint64_t seed) {
  std::vector<Real> values;
  for (int r = 0; r < resamples; ++r) {
    RandomStream rng(seed, stage::kBootstrap, static_cast<std::uint64_t>(r));
    SampleBatch re;
    re.modes = b.modes;
    for (int i = 0; i < b.shots(); ++i) re.patterns.push_back(b.patterns[rng.below(b.shots())]);
    values.push_back(tvd_to_reference(re, table));
  }
  Real mean = 0.0, var = 0.0;
  for (Real v : values) mean += v / resamples;
  for (Real v : values) var += (v - mean) * (v - mean) / (resamples - 1);
  return std::sqrt(var);
}

// Pooled XE over every nonvacuum sector: mean of log(p / norm_N).
Estimate pooled_xe(const SampleBatch& b, const ReferenceModel& model) {
  Real sum = 0.0, sq = 0.0;
  int n = 0;
  for (const SectorXeb& x : xeb_all(b, model, Detector::kPnr)) {
    if (x.N == 0) continue;
    sum += x.xe * x.count;
    // Second moment rebuilt from the sector mean and its standard error.
    sq += x.count * x.xe * x.xe + (x.count - 1.0) * x.count * x.stderr_ * x.stderr_;
    n += x.count;
  }
  const Real mean = sum / n;
  return {mean, std::sqrt(std::max(0.0, sq / n - mean * mean) / n)};
}

Outcome criterion8() {
  const Decomposition d = decompose_sdp(reference_circuit());
  const GaussianOracle oracle(d.Vp, d.W, 6);
  const PatternTable table = oracle.distribution(20000, 8);
  const ReferenceModel model(table);
  const int shots = 50000;
  struct Row {
    int chi;
    Estimate xe, tvd;
  };
  std::vector<Row> rows;
  for (int chi : {1, 2, 27}) {
    const MpsState mps = build_mps(d.Vp, {.chi = chi, .d = 6}).state;
    const SampleBatch b = sample_batch(mps, d.W, shots, 8);
    rows.push_back({chi, pooled_xe(b, model), {tvd_to_reference(b, table), tvd_stderr(b, table, 100, 8)}});
  }
  // Ordered best to worst, XE must rise exactly where TVD falls, each step
  // separated by 3 combined standard errors on both statistics.
  bool pass = true;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const Row& lo = rows[i];       // smaller chi
    const Row& hi = rows[i + 1];   // larger chi
    const Real xe_gap = hi.xe.value - lo.xe.value;
    const Real tvd_gap = lo.tvd.value - hi.tvd.value;
    pass = pass && xe_gap > 3.0 * std::hypot(hi.xe.stderr_, lo.xe.stderr_) &&
           tvd_gap > 3.0 * std::hypot(hi.tvd.stderr_, lo.tvd.stderr_);
  }
  std::string detail;
  for (const Row& r : rows) {
    detail += fmt("chi=%d XE %.4f+-%.4f TVD %.4f+-%.4f; ", r.chi, r.xe.value, r.xe.stderr_, r.tvd.value,
                  r.tvd.stderr_);
  }
  return {pass, detail + "need XE up and TVD down at each chi step (3 sigma)"};
}

Outcome criterion9() {
  // Moment expansion versus recursion on empirical reference-circuit data.
  const Decomposition d = decompose_sdp(reference_circuit());
  const SampleBatch b = sample_batch(build_mps(d.Vp, {.chi = 8, .d = 4}).state, d.W, 20000, 9);
  const WeightedData data = WeightedData::from_samples(b);
  Real worst = 0.0;
  for (int k = 1; k <= 4; ++k) {
    // Subsets with repetition cover the diagonal cumulants too.
    std::vector<int> s(k, 0);
    while (true) {
      const Real a = cumulant(data, s), e = cumulant_moment_expansion(data, s);
      worst = std::max(worst, std::abs(a - e) / std::max(1.0, std::abs(e)));
      int i = k - 1;
      while (i >= 0 && ++s[i] == 3) s[i--] = 0;
      if (i < 0) break;
    }
  }
  // Two-mode squeezed vacuum second cumulant from 1e6 samples.
  const Real s = 0.5;
  const int shots = 1000000;
  const MpsState tmsv = build_mps(tmsv_covariance(s), {.chi = 12, .d = 12}).state;
  const SampleBatch t = sample_batch(tmsv, MatrixR::Zero(4, 4), shots, 9);
  const WeightedData td = WeightedData::from_samples(t);
  const Pattern pair = {0, 1};
  const Real k2 = cumulant(td, pair);
  Real m0 = 0.0, m1 = 0.0;
  for (const Pattern& p : t.patterns) m0 += p[0], m1 += p[1];
  m0 /= shots;
  m1 /= shots;
  Real var = 0.0;
  for (const Pattern& p : t.patterns) var += std::pow((p[0] - m0) * (p[1] - m1) - k2, 2);
  const Real se = std::sqrt(var / shots / shots);
  const Real expect = std::pow(std::sinh(s) * std::cosh(s), 2);
  const Real z = std::abs(k2 - expect) / se;
  return {worst <= 1e-12 && z <= 3.0,
          fmt("recursion vs expansion max relative diff %.1e (tol 1e-12); TMSV kappa2 %.5f +- %.5f vs "
              "sinh^2 cosh^2 = %.6f (%.2f sigma, tol 3)",
              worst, k2, se, expect, z)};
}

Outcome criterion10() {
  const Decomposition truth = decompose_sdp(reference_circuit());
  const CovMatrix perturbed_V =
      apply_loss(apply_passive(squeezed_input(VectorR::Constant(3, 0.8)), haar_unitary(3, kReferenceSeed + 1)), 0.5);
  const Decomposition mock = decompose_sdp(perturbed_V);
  const ReferenceModel G(GaussianOracle(truth.Vp, truth.W, 6).distribution(4000, 10));
  const ReferenceModel S(GaussianOracle(mock.Vp, mock.W, 6).distribution(4000, 11));
  const int shots = 20000;
  const MpsOptions small{.chi = 8, .d = 4};
  const SampleBatch from_truth = sample_batch(build_mps(truth.Vp, small).state, truth.W, shots, 10);
  const SampleBatch from_mock = sample_batch(build_mps(mock.Vp, small).state, mock.W, shots, 11);
  const BayesScore a = bayesian_score(from_truth, G, S);
  const BayesScore b = bayesian_score(from_mock, G, S);
  return {a.score > 3.0 * a.stderr_ && b.score < -3.0 * b.stderr_,
          fmt("truth samples %.4f +- %.4f (> 3 sigma), mockup samples %.4f +- %.4f (< -3 sigma)", a.score, a.stderr_,
              b.score, b.stderr_)};
}

Outcome criterion11() {
  Real eps0 = 0.0;
  bool chi0 = true;
  for (int K = 1; K <= 100; ++K) {
    for (Real R = 0.0; R <= 0.9; R += 0.05) {
      eps0 = std::max(eps0, std::abs(epsilon_l(K, R, 0) - (1.0 - std::pow(1.0 - R, K))));
    }
    chi0 = chi0 && chi_l(K, 0) == 1;
  }
  Real beta = 0.0;
  for (int K = 1; K <= 100; ++K) {
    for (int ri = 1; ri <= 18; ++ri) {
      const Real R = 0.05 * ri;
      for (int l = 0; l <= 60; ++l) {
        const Real ref = 1.0 - boost::math::ibeta(static_cast<Real>(K), l + 1.0, 1.0 - R);
        beta = std::max(beta, std::abs(epsilon_l(K, R, l) - ref));
      }
    }
  }
  int mismatches = 0;
  for (int K = 1; K <= 6; ++K) {
    for (int l = 0; l <= 8; ++l) {
      // Brute force: patterns of K nonnegative integers with total <= l.
      std::uint64_t count = 0;
      std::vector<int> n(K, 0);
      while (true) {
        int total = 0;
        for (int v : n) total += v;
        if (total <= l) ++count;
        int k = K - 1;
        while (k >= 0 && ++n[k] > l) n[k--] = 0;
        if (k < 0) break;
      }
      if (count != chi_l(K, l)) ++mismatches;
    }
  }
  return {eps0 <= 1e-15 && chi0 && beta <= 1e-12 && mismatches == 0,
          fmt("eps_0 vs 1-(1-R)^K max diff %.1e; chi_0 = 1 %s; sum vs incomplete beta max diff %.1e (tol 1e-12); "
              "%d chi_l mismatches vs brute force",
              eps0, chi0 ? "for all K" : "FAILED", beta, mismatches)};
}

Outcome criterion12() {
  const Real mem = memory_estimate(1e4, 288, 4), time = time_estimate(1e4, 4);
  return {mem == 9.216e11 && time == 2400.0, fmt("memory %.4e bytes, time %.1f s", mem, time)};
}

Outcome criterion13() {
  Real worst = 0.0;
  for (int i = 0; i <= 150; ++i) {
    const Real s = 0.01 * i;
    const Real lhs = std::pow(std::cosh(s), 4) - std::pow(std::sinh(s), 4);
    worst = std::max(worst, std::abs(lhs - std::cosh(2 * s)) / std::cosh(2 * s));
    worst = std::max(worst, std::abs(renyi_entropy(s, 2.0) - std::log(std::cosh(2 * s))));
  }
  const Real alpha = 0.9, r = 0.5;
  const int K = 8, points = 21;
  Real mx = 0, my = 0, sxy = 0, sxx = 0;
  std::vector<Real> lx, ly;
  for (int i = 0; i < points; ++i) {
    const Real eta = std::pow(10.0, -3.0 + 2.0 * i / (points - 1));
    lx.push_back(std::log(eta));
    ly.push_back(std::log(K * renyi_entropy(eta * std::exp(-r) * std::sinh(r), alpha)));
    mx += lx.back() / points;
    my += ly.back() / points;
  }
  for (int i = 0; i < points; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const Real slope = sxy / sxx;
  const Real rel = std::abs(slope / (2 * alpha) - 1.0);
  return {worst <= 1e-12 && rel <= 0.05,
          fmt("identity max relative error %.1e (tol 1e-12); K S_0.9 log-log slope %.4f vs 1.8 (%.1f%%, tol 5%%, r=%.1f)",
              worst, slope, 100 * rel, r)};
}

Outcome criterion14() {
  const fs::path root = fs::temp_directory_path() / "gbsmps_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  write_covariance(root / "V.txt", reference_circuit().matrix());
  RunConfig c;
  c.cov = root / "V.txt";
  c.chi = 8;
  c.d_build = 4;
  c.shots = 2000;
  c.seed = 14;
  c.bench_cutoff = 4;
  c.oracle_draws = 256;
  std::map<std::string, std::string> first;
  int files = 0, differing = 0;
  for (int run = 0; run < 2; ++run) {
    c.out = root / ("run" + std::to_string(run));
    c.workers = run == 0 ? 1 : 4;
    run_pipeline(c);
    for (const auto& e : fs::recursive_directory_iterator(c.out)) {
      if (!e.is_regular_file() || e.path().filename() == "timing.json") continue;
      const std::string rel = fs::relative(e.path(), c.out).string();
      const std::string bytes = read_file(e.path());
      if (run == 0) {
        first[rel] = bytes;
        ++files;
      } else if (!first.count(rel) || first[rel] != bytes) {
        ++differing;
      }
    }
  }
  std::set<std::string> stages;
  for (const auto& [rel, bytes] : first) stages.insert(rel.substr(0, rel.find('/')));
  fs::remove_all(root);
  return {differing == 0 && files > 0 && stages.size() == 4,
          fmt("%d artifacts over %zu stages (1 vs 4 workers), %d differ", files, stages.size(), differing)};
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

int main_impl(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "single-mode decomposition", criterion1},
      {2, "SDP beats Williamson split", criterion2},
      {3, "hafnian oracle equivalence", criterion3},
      {4, "MPS exactness", criterion4},
      {5, "TMSV Schmidt spectrum", criterion5},
      {6, "end-to-end sampling", criterion6},
      {7, "thermal consistency", criterion7},
      {8, "XEB/TVD direction", criterion8},
      {9, "cumulants", criterion9},
      {10, "Bayesian score signs", criterion10},
      {11, "tail formulas", criterion11},
      {12, "cost formulas", criterion12},
      {13, "Renyi scaling", criterion13},
      {14, "determinism", criterion14},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("criterion %2d %s  %s: %s [%.1f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.title, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace gbsmps

int main(int argc, char** argv) { return gbsmps::main_impl(argc, argv); }
