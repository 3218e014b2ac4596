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

// Command-line front end. Exit codes: 0 ok, 2 invalid input, 3 numerical
// nonconvergence, 4 resource cap, 1 anything else.
//
// Environment: GBSMPS_WORKERS sets the worker count (--workers wins),
// GBSMPS_SCRATCH is the default output root of `run` and `gen-circuit`.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

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
using nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitNonconvergence = 3;
constexpr int kExitResourceCap = 4;

fs::path scratch_root() {
  if (const char* env = std::getenv("GBSMPS_SCRATCH")) {
    if (*env) return env;
  }
  return "gbsmps-scratch";
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

std::vector<Real> real_list(const std::string& s) {
  std::vector<Real> out;
  for (const std::string& item : split(s, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("not a number: '" + item + "'");
    }
  }
  if (out.empty()) throw ValidationError("empty list");
  return out;
}

std::vector<int> int_list(const std::string& s) {
  std::vector<int> out;
  for (Real v : real_list(s)) {
    if (v != static_cast<int>(v)) throw ValidationError("not an integer: " + std::to_string(v));
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// A scalar broadcast to `n` entries, or exactly `n` comma-separated values.
VectorR per_mode(const std::string& s, int n, const char* what) {
  const std::vector<Real> v = real_list(s);
  if (v.size() == 1) return VectorR::Constant(n, v[0]);
  if (static_cast<int>(v.size()) != n) {
    throw ValidationError(std::string(what) + " needs 1 or " + std::to_string(n) + " values");
  }
  return Eigen::Map<const VectorR>(v.data(), n);
}

std::string num(Real v, int precision = 6) {
  std::ostringstream out;
  out << std::setprecision(precision) << v;
  return out.str();
}

// Aligned-column table on stdout plus an optional CSV copy.
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void print(std::ostream& out) const {
    std::vector<std::size_t> width(header_.size());
    for (std::size_t j = 0; j < header_.size(); ++j) width[j] = header_[j].size();
    for (const auto& r : rows_) {
      for (std::size_t j = 0; j < r.size(); ++j) width[j] = std::max(width[j], r[j].size());
    }
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t j = 0; j < r.size(); ++j) {
        out << (j ? "  " : "") << std::setw(static_cast<int>(width[j])) << r[j];
      }
      out << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
  }

  void csv(const fs::path& file) const {
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << r[j];
      out << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    write_file(file, out.str());
  }

  void emit(const std::string& csv_path) const {
    print(std::cout);
    if (!csv_path.empty()) csv(csv_path);
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// ---------------------------------------------------------------- decompose

struct DecomposeArgs {
  std::string cov, out, method = "sdp";
  Real tol = 1e-6;
};

void add_decompose(CLI::App& app, DecomposeArgs& a) {
  auto* cmd = app.add_subcommand("decompose", "Split V into a pure part V_p and classical noise W");
  cmd->add_option("--cov", a.cov, "Input covariance file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", a.out, "Output files vp.txt,w.txt")->required();
  cmd->add_option("--method", a.method, "sdp or williamson")->check(CLI::IsMember({"sdp", "williamson"}));
  cmd->add_option("--tol", a.tol, "Relative objective tolerance of the SDP");
  cmd->final_callback([&a] {
    const std::vector<std::string> outs = split(a.out, ',');
    if (outs.size() != 2) throw ValidationError("--out needs two comma-separated paths");
    const std::string bytes = read_file(a.cov);
    std::istringstream in(bytes);
    const CovMatrix V = read_covariance(in);
    const Decomposition d = decompose(V, parse_method(a.method), a.tol);
    const std::string hash =
        fnv1a_hex(json({{"cov", fnv1a_hex(bytes)}, {"method", a.method}, {"tol", a.tol}}).dump());
    write_covariance(outs[0], d.Vp.matrix(), "config=" + hash);
    write_covariance(outs[1], d.W, "config=" + hash);
    std::cout << stats_json(d) << '\n';
  });
}

// ---------------------------------------------------------------- build-mps

struct BuildArgs {
  std::string cov, out;
  int chi = 16, d = 4, max_hafnian = kDefaultMaxHafnianSize;
};

void add_build(CLI::App& app, BuildArgs& a) {
  auto* cmd = app.add_subcommand("build-mps", "Build the MPS of a pure covariance matrix");
  cmd->add_option("--cov", a.cov, "Pure covariance file (e.g. decompose output)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", a.out, "Output directory")->required();
  cmd->add_option("--chi", a.chi, "Bond dimension")->check(CLI::PositiveNumber);
  cmd->add_option("--d", a.d, "Local photon cutoff")->check(CLI::PositiveNumber);
  cmd->add_option("--max-hafnian", a.max_hafnian, "Largest hafnian allowed");
  cmd->final_callback([&a] {
    const std::string bytes = read_file(a.cov);
    std::istringstream in(bytes);
    const CovMatrix Vp = read_covariance(in);
    MpsOptions opt;
    opt.chi = a.chi;
    opt.d = a.d;
    opt.max_hafnian_size = a.max_hafnian;
    const std::string hash = fnv1a_hex(
        json({{"config", {{"chi", a.chi}, {"d", a.d}, {"max_hafnian_size", a.max_hafnian}}},
              {"inputs", {{"vp", fnv1a_hex(bytes)}}}})
            .dump());
    const MpsBuild build = build_mps(Vp, opt);
    save_mps(build, a.out, hash);
    Table t({"bond", "chi", "epsilon"});
    for (int b = 1; b < build.state.modes; ++b) {
      t.add({std::to_string(b), std::to_string(build.state.bond_dim(b)), num(build.report.epsilon[b - 1])});
    }
    t.print(std::cout);
    std::cout << "center_error " << num(build.report.center_error) << "  l_max " << build.report.l_max
              << "  max_hafnian_size " << build.report.max_hafnian_size << "  config " << hash << '\n';
  });
}

// ---------------------------------------------------------------- sample

struct SampleArgs {
  std::string mps, w, out;
  int shots = 1000, d_sample = kDefaultSampleCutoff;
  std::uint64_t seed = 0;
  bool threshold = false;
};

void add_sample(CLI::App& app, SampleArgs& a) {
  auto* cmd = app.add_subcommand("sample", "Draw photon patterns from an MPS plus displacement noise");
  cmd->add_option("--mps", a.mps, "MPS directory")->required()->check(CLI::ExistingDirectory);
  cmd->add_option("--w", a.w, "Noise covariance W (omit for a pure state)")->check(CLI::ExistingFile);
  cmd->add_option("--shots", a.shots, "Number of patterns")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", a.seed, "Global seed");
  cmd->add_option("--d-sample", a.d_sample, "Local cutoff while sampling")->check(CLI::PositiveNumber);
  cmd->add_flag("--threshold", a.threshold, "Report click patterns");
  cmd->add_option("--out", a.out, "Sample file")->required();
  cmd->final_callback([&a] {
    const MpsBuild build = load_mps(a.mps);
    const int m = build.state.modes;
    const MatrixR W = a.w.empty() ? MatrixR::Zero(2 * m, 2 * m) : read_real_block(a.w);
    if (W.rows() != 2 * m) throw ValidationError("W and MPS mode counts differ");
    SampleOptions opt;
    opt.d_sample = a.d_sample;
    opt.detector = a.threshold ? Detector::kThreshold : Detector::kPnr;
    const SampleBatch batch = sample_batch(build.state, W, a.shots, a.seed, opt);
    const std::string mps_manifest = read_file(fs::path(a.mps) / "manifest.json");
    const std::string hash = fnv1a_hex(
        json({{"mps", fnv1a_hex(mps_manifest)},
              {"w", a.w.empty() ? "" : fnv1a_hex(read_file(a.w))},
              {"shots", a.shots},
              {"seed", a.seed},
              {"d_sample", a.d_sample},
              {"detector", detector_name(opt.detector)}})
            .dump());
    write_file(a.out, format_samples(batch, hash));
    std::cerr << "max_leakage " << num(batch.stats.max_leakage) << "  leaky_sites " << batch.stats.leaky_sites
              << '\n';
  });
}

// ---------------------------------------------------------------- benchmark

struct BenchArgs {
  std::string samples, samples_b, cov, cov_b, csv;
  int cutoff = 4, draws = 4096, max_order = kMaxCumulantOrder, resamples = kDefaultBootstrap;
  int budget = kDefaultSubsetBudget;
  std::uint64_t seed = 0;
};

// Reference distribution of V from the dense oracle.
PatternTable reference_table(const std::string& cov, const BenchArgs& a, Detector det) {
  const CovMatrix V = read_covariance(cov);
  const Decomposition d = decompose_sdp(V);
  const GaussianOracle oracle(d.Vp, d.W, a.cutoff);
  PatternTable t = oracle.distribution(a.draws, a.seed);
  return det == Detector::kThreshold ? click_table(t) : t;
}

void add_benchmark(CLI::App& app, BenchArgs& a) {
  auto* cmd = app.add_subcommand("benchmark", "Compare samples with a reference Gaussian state");
  cmd->require_subcommand(1);
  auto common = [&a](CLI::App* sub, bool needs_cov) {
    sub->add_option("--samples", a.samples, "Sample file")->required()->check(CLI::ExistingFile);
    auto* cov = sub->add_option("--cov", a.cov, "Reference covariance file")->check(CLI::ExistingFile);
    if (needs_cov) cov->required();
    sub->add_option("--cutoff", a.cutoff, "Oracle photon cutoff per mode");
    sub->add_option("--draws", a.draws, "Oracle Monte-Carlo draws");
    sub->add_option("--seed", a.seed, "Oracle and bootstrap seed");
    sub->add_option("--csv", a.csv, "Also write the table as CSV");
  };

  auto* xeb_cmd = cmd->add_subcommand("xeb", "Cross entropy per photon-number sector");
  common(xeb_cmd, true);
  xeb_cmd->final_callback([&a] {
    const SampleBatch s = read_samples(fs::path(a.samples));
    const ReferenceModel model(reference_table(a.cov, a, s.detector));
    Table t({"N", "count", "excluded", "xe", "stderr"});
    for (const SectorXeb& x : xeb_all(s, model, s.detector)) {
      t.add({std::to_string(x.N), std::to_string(x.count), std::to_string(x.excluded), num(x.xe), num(x.stderr_)});
    }
    t.emit(a.csv);
  });

  auto* tvd_cmd = cmd->add_subcommand("tvd", "Total variation distance");
  common(tvd_cmd, false);
  tvd_cmd->add_option("--samples-b", a.samples_b, "Second sample file")->check(CLI::ExistingFile);
  tvd_cmd->final_callback([&a] {
    const SampleBatch s = read_samples(fs::path(a.samples));
    Table t({"reference", "tvd"});
    if (!a.samples_b.empty()) {
      const SampleBatch b = read_samples(fs::path(a.samples_b));
      t.add({"samples-b", num(tvd_empirical(count_patterns(s), count_patterns(b)))});
    } else if (!a.cov.empty()) {
      t.add({"oracle", num(tvd_to_reference(s, reference_table(a.cov, a, s.detector)))});
    } else {
      throw ValidationError("tvd needs --samples-b or --cov");
    }
    t.emit(a.csv);
  });

  auto* corr_cmd = cmd->add_subcommand("corr", "Two-point correlations against the exact values");
  common(corr_cmd, true);
  corr_cmd->final_callback([&a] {
    const SampleBatch s = read_samples(fs::path(a.samples));
    const CovMatrix V = read_covariance(a.cov);
    const std::vector<Real> truth = pair_values(ground_truth_two_point(V, s.detector));
    const std::vector<Real> est = sample_two_point(s, s.detector);
    const std::vector<Pattern> pairs = all_pairs(s.modes);
    Table t({"i", "j", "truth", "sample"});
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      t.add({std::to_string(pairs[k][0]), std::to_string(pairs[k][1]), num(truth[k]), num(est[k])});
    }
    t.emit(a.csv);
    const TwoPointStats st = two_point_stats(est, truth);
    std::cout << "slope " << num(st.slope) << "  intercept " << num(st.intercept) << "  slope_origin "
              << num(st.slope_origin) << "  pearson " << num(st.pearson) << "  distance " << num(st.distance)
              << '\n';
  });

  auto* bayes_cmd = cmd->add_subcommand("bayes", "Bayesian score of the truth against a mockup");
  common(bayes_cmd, true);
  bayes_cmd->add_option("--cov-b", a.cov_b, "Mockup covariance file")->required()->check(CLI::ExistingFile);
  bayes_cmd->final_callback([&a] {
    const SampleBatch s = read_samples(fs::path(a.samples));
    const ReferenceModel g(reference_table(a.cov, a, s.detector));
    const ReferenceModel mock(reference_table(a.cov_b, a, s.detector));
    const BayesScore b = bayesian_score(s, g, mock);
    Table t({"score", "stderr", "used", "excluded"});
    t.add({num(b.score), num(b.stderr_), std::to_string(b.used), std::to_string(b.excluded)});
    t.emit(a.csv);
  });

  auto* sp_cmd = cmd->add_subcommand("spearman", "Rank correlation of cumulants per order");
  common(sp_cmd, true);
  sp_cmd->add_option("--max-order", a.max_order, "Highest cumulant order")->check(CLI::Range(1, kMaxCumulantOrder));
  sp_cmd->add_option("--resamples", a.resamples, "Bootstrap resamples")->check(CLI::PositiveNumber);
  sp_cmd->add_option("--budget", a.budget, "Subsets per order")->check(CLI::PositiveNumber);
  sp_cmd->final_callback([&a] {
    const SampleBatch s = read_samples(fs::path(a.samples));
    SpearmanOptions opt;
    opt.max_order = a.max_order;
    opt.resamples = a.resamples;
    opt.budget = a.budget;
    opt.seed = a.seed;
    opt.clicks = s.detector == Detector::kThreshold;
    const PatternTable truth = reference_table(a.cov, a, s.detector);
    Table t({"order", "subsets", "spearman", "stderr", "ci_low", "ci_high"});
    for (const OrderCorrelation& o : spearman_by_order(s, truth, opt)) {
      t.add({std::to_string(o.order), std::to_string(o.subsets), num(o.spearman), num(o.stderr_), num(o.ci_low),
             num(o.ci_high)});
    }
    t.emit(a.csv);
  });
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string mode = "worst-case", k = "1", r = "1", eta = "0.5", eps = "0.01", cov, csv, method = "sdp";
  int modes = 0, d = 4;
};

void add_estimate(CLI::App& app, EstimateArgs& a) {
  auto* cmd = app.add_subcommand("estimate", "Bond-dimension and cost estimates (CSV)");
  cmd->add_option("--mode", a.mode, "worst-case or circuit")->check(CLI::IsMember({"worst-case", "circuit"}));
  cmd->add_option("--k", a.k, "Pair counts (comma list)");
  cmd->add_option("--r", a.r, "Input squeezing (comma list)");
  cmd->add_option("--eta", a.eta, "Transmission (comma list)");
  cmd->add_option("--eps", a.eps, "Target truncation errors (comma list)");
  cmd->add_option("--modes", a.modes, "Mode count for the memory estimate (default 2K)");
  cmd->add_option("--d", a.d, "Local cutoff for the cost estimates");
  cmd->add_option("--cov", a.cov, "Covariance file for --mode circuit")->check(CLI::ExistingFile);
  cmd->add_option("--method", a.method, "Decomposition for mixed input")->check(CLI::IsMember({"sdp", "williamson"}));
  cmd->add_option("--csv", a.csv, "Write CSV here instead of stdout");
  cmd->final_callback([&a] {
    std::ostringstream out;
    if (a.mode == "worst-case") {
      out << "K,r,eta,eps,s,nbar,R,level,chi,memory_bytes,time_seconds,hafnian_size\n";
      for (int K : int_list(a.k)) {
        for (Real r : real_list(a.r)) {
          for (Real eta : real_list(a.eta)) {
            for (Real eps : real_list(a.eps)) {
              const WorstCaseBond b = worst_case_bond(K, r, eta, eps);
              const int m = a.modes > 0 ? a.modes : 2 * K;
              const Real chi = static_cast<Real>(b.chi);
              out << K << ',' << r << ',' << eta << ',' << eps << ',' << num(b.s, 10) << ',' << num(b.nbar, 10)
                  << ',' << num(b.R, 10) << ',' << b.level << ',' << b.chi << ','
                  << num(memory_estimate(chi, m, a.d), 10) << ',' << num(time_estimate(chi, a.d), 10) << ','
                  << max_hafnian_size(b.level) << '\n';
            }
          }
        }
      }
    } else {
      if (a.cov.empty()) throw ValidationError("--mode circuit needs --cov");
      const CovMatrix V = read_covariance(a.cov);
      const CovMatrix Vp = is_pure(V) ? V : decompose(V, parse_method(a.method)).Vp;
      out << "bond,eps,chi\n";
      for (Real eps : real_list(a.eps)) {
        for (int b = 1; b < Vp.modes(); ++b) out << b << ',' << eps << ',' << circuit_bond(Vp, b, eps) << '\n';
      }
    }
    if (a.csv.empty()) {
      std::cout << out.str();
    } else {
      write_file(a.csv, out.str());
    }
  });
}

// ---------------------------------------------------------------- gen-circuit

struct GenArgs {
  std::string ensemble = "haar", r = "0.8", eta = "0.5", unitary, out;
  int modes = 0, depth = 0, k = 0;
  std::uint64_t seed = 0;
};

Ensemble parse_ensemble(const std::string& name) {
  if (name == "haar") return Ensemble::kGlobalHaar;
  if (name == "brickwork") return Ensemble::kBrickwork;
  if (name == "tmsv-worst-case") return Ensemble::kTmsvWorstCase;
  if (name == "explicit") return Ensemble::kExplicit;
  throw ValidationError("unknown ensemble '" + name + "'");
}

void add_gen(CLI::App& app, GenArgs& a) {
  auto* cmd = app.add_subcommand("gen-circuit", "Write a lossy squeezed-light circuit (V, V0, U, eta)");
  cmd->add_option("--ensemble", a.ensemble, "haar, brickwork, tmsv-worst-case or explicit")
      ->check(CLI::IsMember({"haar", "brickwork", "tmsv-worst-case", "explicit"}));
  cmd->add_option("--modes", a.modes, "Mode count");
  cmd->add_option("--k", a.k, "Pair count for tmsv-worst-case (modes = 2K)");
  cmd->add_option("--r", a.r, "Input squeezing (scalar or per-mode list)");
  cmd->add_option("--eta", a.eta, "Transmission (scalar or per-mode list)");
  cmd->add_option("--depth", a.depth, "Brickwork depth");
  cmd->add_option("--unitary", a.unitary, "Unitary file for the explicit ensemble")->check(CLI::ExistingFile);
  cmd->add_option("--seed", a.seed, "Circuit seed");
  cmd->add_option("--out", a.out, "Output directory");
  cmd->final_callback([&a] {
    CircuitSpec spec;
    spec.ensemble = parse_ensemble(a.ensemble);
    spec.depth = a.depth;
    if (spec.ensemble == Ensemble::kExplicit) {
      if (a.unitary.empty()) throw ValidationError("explicit ensemble needs --unitary");
      spec.U = read_complex_matrix(fs::path(a.unitary));
      if (!is_unitary(spec.U)) throw ValidationError("--unitary is not unitary");
      spec.modes = static_cast<int>(spec.U.rows());
    } else if (spec.ensemble == Ensemble::kTmsvWorstCase && a.k > 0) {
      spec.modes = 2 * a.k;
    } else {
      spec.modes = a.modes;
    }
    if (spec.modes < 1) throw ValidationError("--modes must be positive");
    if (a.modes > 0 && a.modes != spec.modes) throw ValidationError("--modes disagrees with the ensemble size");
    spec.r_in = per_mode(a.r, spec.modes, "--r");
    spec.eta = per_mode(a.eta, spec.modes, "--eta");
    const MatrixC U = circuit_unitary(spec, stream_key(a.seed, stage::kCircuit, 0));
    spec.U = U;
    spec.ensemble = Ensemble::kExplicit;
    const CovMatrix V = build_circuit(spec, 0);
    const json config = {{"ensemble", a.ensemble}, {"modes", spec.modes}, {"depth", a.depth},
                         {"r", std::vector<Real>(spec.r_in.data(), spec.r_in.data() + spec.modes)},
                         {"eta", std::vector<Real>(spec.eta.data(), spec.eta.data() + spec.modes)},
                         {"unitary", a.unitary.empty() ? "" : fnv1a_hex(read_file(a.unitary))}};
    const std::string hash = fnv1a_hex(json({{"config", config}, {"seed", a.seed}}).dump());
    const fs::path dir = a.out.empty() ? scratch_root() / ("circuit-" + hash) : fs::path(a.out);
    const std::string tag = "config=" + hash;
    write_covariance(dir / "V.txt", V.matrix(), tag);
    write_covariance(dir / "V0.txt", squeezed_input(spec.r_in).matrix(), tag);
    write_complex_matrix(dir / "U.txt", U, tag);
    write_vector(dir / "eta.txt", spec.eta, tag);
    json m = {{"stage", "gen-circuit"}, {"config_hash", hash}, {"config", config},
              {"seed", a.seed},         {"version", kVersion}};
    write_file(dir / "manifest.json", m.dump(2) + "\n");
    std::cout << dir.string() << '\n';
  });
}

// ---------------------------------------------------------------- hafnian

struct HafArgs {
  std::string matrix;
  bool brute = false;
};

void add_hafnian(CLI::App& app, HafArgs& a) {
  auto* cmd = app.add_subcommand("hafnian", "Hafnian of a complex symmetric matrix file");
  cmd->add_option("--matrix", a.matrix, "Matrix file (n, then rows of re im pairs)")->required()->check(CLI::ExistingFile);
  cmd->add_flag("--brute", a.brute, "Also evaluate the perfect-matching sum");
  cmd->final_callback([&a] {
    const MatrixC X = read_complex_matrix(fs::path(a.matrix));
    if ((X - X.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max<Real>(1.0, X.cwiseAbs().maxCoeff())) {
      throw ValidationError("matrix is not symmetric");
    }
    const Complex h = hafnian(X);
    std::cout << std::setprecision(17) << h.real() << ' ' << h.imag() << '\n';
    if (a.brute) {
      const Complex b = hafnian_brute(X);
      std::cout << std::setprecision(17) << b.real() << ' ' << b.imag() << '\n';
    }
  });
}

// ---------------------------------------------------------------- run

struct RunArgs {
  std::string cov, out, method = "sdp", detector = "pnr";
  RunConfig config;
  bool no_benchmark = false;
};

void add_run(CLI::App& app, RunArgs& a) {
  auto* cmd = app.add_subcommand("run", "decompose, build-mps, sample and benchmark in one go (resumable)");
  RunConfig& c = a.config;
  cmd->add_option("--cov", a.cov, "Input covariance file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", a.out, "Run directory");
  cmd->add_option("--method", a.method, "sdp or williamson")->check(CLI::IsMember({"sdp", "williamson"}));
  cmd->add_option("--tol", c.tol, "Relative objective tolerance of the SDP");
  cmd->add_option("--chi", c.chi, "Bond dimension")->check(CLI::PositiveNumber);
  cmd->add_option("--d", c.d_build, "Local cutoff of the MPS")->check(CLI::PositiveNumber);
  cmd->add_option("--d-sample", c.d_sample, "Local cutoff while sampling")->check(CLI::PositiveNumber);
  cmd->add_option("--max-hafnian", c.max_hafnian_size, "Largest hafnian allowed");
  cmd->add_option("--shots", c.shots, "Number of patterns")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "Global seed");
  cmd->add_option("--detector", a.detector, "pnr or threshold")->check(CLI::IsMember({"pnr", "threshold"}));
  cmd->add_option("--bench-cutoff", c.bench_cutoff, "Oracle cutoff of the benchmark stage");
  cmd->add_option("--draws", c.oracle_draws, "Oracle Monte-Carlo draws");
  cmd->add_flag("--no-benchmark", a.no_benchmark, "Stop after sampling");
  cmd->final_callback([&a] {
    RunConfig c = a.config;
    c.cov = a.cov;
    c.method = parse_method(a.method);
    c.detector = parse_detector(a.detector);
    c.benchmark = !a.no_benchmark;
    c.verbose = true;
    c.out = a.out.empty() ? scratch_root() / ("run-" + fnv1a_hex(read_file(a.cov)) + "-" + std::to_string(c.seed))
                          : fs::path(a.out);
    const PipelineResult r = run_pipeline(c);
    std::cout << c.out.string() << '\n';
    std::cout << "decompose " << (r.decompose_resumed ? "reused" : "computed") << ", mps "
              << (r.mps_resumed ? "reused" : "built") << ", " << r.samples.shots() << " samples"
              << (r.benchmarked ? ", benchmarked" : "") << '\n';
  });
}

int main_impl(int argc, char** argv) {
  CLI::App app{"Lossy Gaussian boson sampling with matrix product states"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  app.add_option("--workers", "Worker threads (overrides GBSMPS_WORKERS)")
      ->check(CLI::PositiveNumber)
      ->each([](const std::string& v) { setenv("GBSMPS_WORKERS", v.c_str(), 1); });

  DecomposeArgs dec;
  BuildArgs build;
  SampleArgs sample;
  BenchArgs bench;
  EstimateArgs est;
  GenArgs gen;
  HafArgs haf;
  RunArgs run;
  add_decompose(app, dec);
  add_build(app, build);
  add_sample(app, sample);
  add_benchmark(app, bench);
  add_estimate(app, est);
  add_gen(app, gen);
  add_hafnian(app, haf);
  add_run(app, run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NonconvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNonconvergence;
  } catch (const ResourceCapError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitResourceCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace
}  // namespace gbsmps

int main(int argc, char** argv) { return gbsmps::main_impl(argc, argv); }
