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

#include "gbsmps/pipeline.hpp"

#include <chrono>
#include <iostream>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "gbsmps/benchmark.hpp"
#include "gbsmps/io.hpp"

namespace gbsmps {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void progress(const RunConfig& c, const std::string& line) {
  static std::mutex mu;
  if (!c.verbose) return;
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << line << std::endl;
}

std::string hash_json(const json& j) { return fnv1a_hex(j.dump()); }

// Manifest config hash of a stage, or "" when there is none.
std::string existing_hash(const fs::path& dir) {
  const fs::path file = dir / "manifest.json";
  if (!fs::exists(file)) return "";
  try {
    return json::parse(read_file(file)).value("config_hash", "");
  } catch (const json::exception&) {
    return "";
  }
}

void write_manifest(const fs::path& dir, const std::string& stage, const std::string& hash,
                    const json& config, const json& inputs, std::uint64_t seed) {
  json m;
  m["stage"] = stage;
  m["config_hash"] = hash;
  m["config"] = config;
  m["inputs"] = inputs;
  m["seed"] = seed;
  m["version"] = kVersion;
  write_file(dir / "manifest.json", m.dump(2) + "\n");
}

void write_timing(const fs::path& dir, double seconds, bool resumed) {
  json t;
  t["wall_seconds"] = seconds;
  t["resumed"] = resumed;
  write_file(dir / "timing.json", t.dump(2) + "\n");
}

// Runs `body`, prefixing any library error with the stage name.
template <typename Body>
auto run_stage(const std::string& name, Body&& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    throw ValidationError("stage " + name + ": " + e.what());
  } catch (const NonconvergenceError& e) {
    throw NonconvergenceError("stage " + name + ": " + e.what());
  } catch (const ResourceCapError& e) {
    throw ResourceCapError("stage " + name + ": " + e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Method parse_method(const std::string& name) {
  if (name == "sdp") return Method::kSdp;
  if (name == "williamson") return Method::kWilliamson;
  throw ValidationError("unknown decomposition method '" + name + "'");
}

const char* method_name(Method m) { return m == Method::kSdp ? "sdp" : "williamson"; }

Decomposition decompose(const CovMatrix& V, Method method, Real tol) {
  if (method == Method::kWilliamson) return williamson_split(V);
  DecomposeOptions opt;
  opt.objective_tol = tol;
  return decompose_sdp(V, opt);
}

std::string format_samples(const SampleBatch& batch, const std::string& config_hash) {
  std::ostringstream raw;
  write_samples(raw, batch);
  const std::string text = raw.str();
  const auto eol = text.find('\n');
  return text.substr(0, eol + 1) + "# config=" + config_hash + "\n" + text.substr(eol + 1);
}

PipelineResult run_pipeline(const RunConfig& c) {
  PipelineResult result;
  const std::string cov_bytes = read_file(c.cov);

  // Decompose.
  const fs::path ddir = c.out / "decompose";
  json dconf = {{"method", method_name(c.method)}, {"tol", c.tol}};
  const json dinputs = {{"cov", fnv1a_hex(cov_bytes)}};
  const std::string dhash = hash_json({{"config", dconf}, {"inputs", dinputs}});
  run_stage("decompose", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    if (existing_hash(ddir) == dhash && fs::exists(ddir / "vp.txt") && fs::exists(ddir / "w.txt")) {
      result.split.Vp = read_covariance(ddir / "vp.txt");
      result.split.W = read_real_block(ddir / "w.txt");
      result.split.objective = result.split.Vp.matrix().trace();
      result.decompose_resumed = true;
      progress(c, "[decompose] reused " + ddir.string());
    } else {
      std::istringstream in(cov_bytes);
      const CovMatrix V = read_covariance(in);
      result.split = decompose(V, c.method, c.tol);
      fs::create_directories(ddir);
      write_covariance(ddir / "vp.txt", result.split.Vp.matrix(), "config=" + dhash);
      write_covariance(ddir / "w.txt", result.split.W, "config=" + dhash);
      write_file(ddir / "stats.json", stats_json(result.split) + "\n");
      write_manifest(ddir, "decompose", dhash, dconf, dinputs, c.seed);
      progress(c, "[decompose] " + stats_json(result.split));
    }
    write_timing(ddir, seconds_since(t0), result.decompose_resumed);
    return 0;
  });

  // Build the MPS of the pure part.
  const fs::path mdir = c.out / "mps";
  const json mconf = {{"chi", c.chi}, {"d", c.d_build}, {"max_hafnian_size", c.max_hafnian_size}};
  const json minputs = {{"vp", fnv1a_hex(read_file(ddir / "vp.txt"))}};
  const std::string mhash = hash_json({{"config", mconf}, {"inputs", minputs}});
  const MpsState mps = run_stage("build-mps", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    MpsBuild build;
    if (existing_hash(mdir) == mhash) {
      build = load_mps(mdir);
      result.mps_resumed = true;
      progress(c, "[build-mps] reused " + mdir.string());
    } else {
      MpsOptions opt;
      opt.chi = c.chi;
      opt.d = c.d_build;
      opt.max_hafnian_size = c.max_hafnian_size;
      opt.workers = c.workers;
      build = build_mps(result.split.Vp, opt);
      save_mps(build, mdir, mhash);
      // Extend the format manifest with the run provenance.
      json m = json::parse(read_file(mdir / "manifest.json"));
      m["stage"] = "build-mps";
      m["config"] = mconf;
      m["inputs"] = minputs;
      m["seed"] = c.seed;
      m["software"] = kVersion;
      write_file(mdir / "manifest.json", m.dump(2) + "\n");
      progress(c, "[build-mps] center error " + std::to_string(build.report.center_error));
    }
    write_timing(mdir, seconds_since(t0), result.mps_resumed);
    return build.state;
  });

  // Sample.
  const fs::path sdir = c.out / "sample";
  const json sconf = {{"shots", c.shots},
                      {"d_sample", c.d_sample},
                      {"detector", detector_name(c.detector)}};
  const json sinputs = {{"mps", mhash}, {"w", fnv1a_hex(read_file(ddir / "w.txt"))}};
  const std::string shash = hash_json({{"config", sconf}, {"inputs", sinputs}, {"seed", c.seed}});
  run_stage("sample", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    SampleOptions opt;
    opt.d_sample = c.d_sample;
    opt.detector = c.detector;
    opt.workers = c.workers;
    result.samples = sample_batch(mps, result.split.W, c.shots, c.seed, opt);
    fs::create_directories(sdir);
    write_file(sdir / "samples.txt", format_samples(result.samples, shash));
    write_manifest(sdir, "sample", shash, sconf, sinputs, c.seed);
    write_timing(sdir, seconds_since(t0), false);
    progress(c, "[sample] " + std::to_string(c.shots) + " shots, max leakage " +
                    std::to_string(result.samples.stats.max_leakage));
    return 0;
  });

  const int m = result.split.Vp.modes();
  if (!c.benchmark || m > kOracleMaxModes) return result;

  // Benchmark against the dense oracle.
  const fs::path bdir = c.out / "benchmark";
  const json bconf = {{"cutoff", c.bench_cutoff}, {"draws", c.oracle_draws}};
  const json binputs = {{"samples", shash}};
  const std::string bhash = hash_json({{"config", bconf}, {"inputs", binputs}, {"seed", c.seed}});
  run_stage("benchmark", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const GaussianOracle oracle(result.split.Vp, result.split.W, c.bench_cutoff);
    PatternTable table = oracle.distribution(c.oracle_draws, c.seed);
    const bool clicks = c.detector == Detector::kThreshold;
    if (clicks) table = click_table(table);
    const ReferenceModel model(table);
    json report;
    report["tvd"] = tvd_to_reference(result.samples, table);
    json sectors = json::array();
    for (const SectorXeb& x : xeb_all(result.samples, model, c.detector)) {
      sectors.push_back({{"N", x.N}, {"xe", x.xe}, {"stderr", x.stderr_}, {"count", x.count},
                         {"excluded", x.excluded}});
    }
    report["xeb"] = sectors;
    if (m >= 3) {
      const CovMatrix V(result.split.Vp.matrix() + result.split.W);
      const std::vector<Real> truth = pair_values(ground_truth_two_point(V, c.detector));
      const std::vector<Real> est = sample_two_point(result.samples, c.detector);
      try {
        const TwoPointStats s = two_point_stats(est, truth);
        report["corr"] = {{"slope", s.slope}, {"intercept", s.intercept},
                          {"slope_origin", s.slope_origin}, {"pearson", s.pearson},
                          {"distance", s.distance}};
      } catch (const ValidationError&) {
        report["corr"] = nullptr;  // constant ground truth, e.g. vacuum
      }
    }
    fs::create_directories(bdir);
    write_file(bdir / "benchmark.json", report.dump(2) + "\n");
    write_manifest(bdir, "benchmark", bhash, bconf, binputs, c.seed);
    write_timing(bdir, seconds_since(t0), false);
    result.benchmarked = true;
    progress(c, "[benchmark] tvd " + std::to_string(report["tvd"].get<double>()));
    return 0;
  });
  return result;
}

}  // namespace gbsmps
