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

// End-to-end run: decompose -> build MPS -> sample -> benchmark. Every stage
// writes its artifacts plus a manifest.json (config hash, input hashes,
// config, seed, version) into its own directory under the run directory;
// wall times go to timing.json so the manifests stay byte-reproducible.
//
//   <out>/decompose/{vp.txt, w.txt, stats.json, manifest.json}
//   <out>/mps/{mode_*.bin, bond_*.lambda, manifest.json}
//   <out>/sample/{samples.txt, manifest.json}
//   <out>/benchmark/{benchmark.json, manifest.json}

#ifndef GBSMPS_PIPELINE_HPP
#define GBSMPS_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <string>

#include "gbsmps/decompose.hpp"
#include "gbsmps/mps.hpp"
#include "gbsmps/sampler.hpp"

namespace gbsmps {

inline constexpr const char* kVersion = "gbsmps 0.1.0";

enum class Method { kSdp, kWilliamson };

Method parse_method(const std::string& name);
const char* method_name(Method m);

struct RunConfig {
  std::filesystem::path cov;  // input covariance file
  std::filesystem::path out;  // run directory
  Method method = Method::kSdp;
  Real tol = 1e-6;            // relative objective tolerance of the SDP
  int chi = 16;
  int d_build = 4;
  int d_sample = kDefaultSampleCutoff;
  int max_hafnian_size = kDefaultMaxHafnianSize;
  int shots = 1000;
  std::uint64_t seed = 0;
  Detector detector = Detector::kPnr;
  int workers = 0;            // 0 selects worker_count()
  bool benchmark = true;      // skipped automatically above the oracle mode cap
  int bench_cutoff = 4;
  int oracle_draws = 4096;
  bool verbose = false;       // progress lines on stderr
};

struct PipelineResult {
  Decomposition split;
  bool decompose_resumed = false;
  bool mps_resumed = false;
  SampleBatch samples;
  bool benchmarked = false;
};

/// Throws the stage's error type with the stage name prefixed.
PipelineResult run_pipeline(const RunConfig& config);

/// Decomposition by the chosen method.
Decomposition decompose(const CovMatrix& V, Method method, Real tol = 1e-6);

/// Sample file text with a "# config=<hash>" line after the header.
std::string format_samples(const SampleBatch& batch, const std::string& config_hash);

}  // namespace gbsmps

#endif  // GBSMPS_PIPELINE_HPP
