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

#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "gbsmps/io.hpp"
#include "test_util.hpp"

namespace gbsmps {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gbsmps_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CovMatrix reference_circuit() {
  return apply_loss(apply_passive(squeezed_input(VectorR::Constant(3, 0.8)), haar_unitary(3, 11)), 0.5);
}

RunConfig small_config(const fs::path& dir, const fs::path& cov) {
  RunConfig c;
  c.cov = cov;
  c.out = dir / "run";
  c.chi = 6;
  c.d_build = 3;
  c.shots = 200;
  c.seed = 17;
  c.bench_cutoff = 3;
  c.oracle_draws = 32;
  return c;
}

// Every artifact except wall-time records, relative path -> bytes.
std::map<std::string, std::string> artifacts(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().filename() == "timing.json") continue;
    out[fs::relative(e.path(), root).string()] = read_file(e.path());
  }
  return out;
}

TEST(Io, CovarianceRoundTripIsExact) {
  RandomStream rng(3, stage::kOracle, 0);
  const CovMatrix V = testing::random_covariance(3, rng);
  std::stringstream buf;
  write_covariance(buf, V.matrix(), "config=abc");
  EXPECT_EQ(read_covariance(buf).matrix(), V.matrix());
}

TEST(Io, ComplexRoundTripIsExact) {
  const MatrixC U = haar_unitary(4, 2);
  std::stringstream buf;
  write_complex_matrix(buf, U);
  EXPECT_EQ(read_complex_matrix(buf), U);
}

TEST(Io, MalformedFilesAreValidationErrors) {
  for (const char* text : {"2\n1 0 0 0\n", "x\n", "1\n1 0\n0 1\n5\n", "1\n1 0\n0 0.5\n", "0\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(read_covariance(in), ValidationError) << text;
  }
  std::istringstream u("2\n1 0 0 0\n0 0 1\n");
  EXPECT_THROW(read_complex_matrix(u), ValidationError);
}

TEST(Io, CommentsAreSkipped) {
  std::istringstream in("# hello\n1\n# mid\n1 0\n0 1\n");
  EXPECT_EQ(read_covariance(in).matrix(), MatrixR::Identity(2, 2));
}

TEST(Io, FnvKnownDigests) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Pipeline, VacuumEndToEnd) {
  const fs::path dir = fresh_dir("vacuum");
  write_covariance(dir / "V.txt", MatrixR::Identity(6, 6));
  const PipelineResult r = run_pipeline(small_config(dir, dir / "V.txt"));
  for (const Pattern& p : r.samples.patterns) EXPECT_EQ(pattern_total(p), 0);
  EXPECT_LT(r.split.W.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE(r.benchmarked);
  const auto report = nlohmann::json::parse(read_file(dir / "run" / "benchmark" / "benchmark.json"));
  EXPECT_LT(report["tvd"].get<double>(), 1e-12);
  EXPECT_EQ(report["xeb"].size(), 1u);
  EXPECT_NEAR(report["xeb"][0]["xe"].get<double>(), 0.0, 1e-12);
}

TEST(Pipeline, ReferenceCircuitIsByteReproducible) {
  const fs::path dir = fresh_dir("repro");
  write_covariance(dir / "V.txt", reference_circuit().matrix());
  RunConfig a = small_config(dir, dir / "V.txt");
  RunConfig b = a;
  b.out = dir / "run2";
  b.workers = 3;
  run_pipeline(a);
  run_pipeline(b);
  const auto fa = artifacts(a.out), fb = artifacts(b.out);
  ASSERT_EQ(fa.size(), fb.size());
  for (const auto& [name, bytes] : fa) EXPECT_TRUE(fb.at(name) == bytes) << name;
  EXPECT_GT(fa.count("mps/mode_0002.bin"), 0u);
  EXPECT_GT(fa.count("sample/samples.txt"), 0u);
}

TEST(Pipeline, ResumesFromPersistedStages) {
  const fs::path dir = fresh_dir("resume");
  write_covariance(dir / "V.txt", reference_circuit().matrix());
  RunConfig c = small_config(dir, dir / "V.txt");
  c.benchmark = false;
  const PipelineResult first = run_pipeline(c);
  EXPECT_FALSE(first.mps_resumed);
  const PipelineResult second = run_pipeline(c);
  EXPECT_TRUE(second.decompose_resumed);
  EXPECT_TRUE(second.mps_resumed);
  EXPECT_EQ(first.samples.patterns, second.samples.patterns);
  c.chi = 5;
  const PipelineResult third = run_pipeline(c);
  EXPECT_TRUE(third.decompose_resumed);
  EXPECT_FALSE(third.mps_resumed);
}

TEST(Pipeline, InputsAreNotModified) {
  const fs::path dir = fresh_dir("inputs");
  write_covariance(dir / "V.txt", reference_circuit().matrix());
  const std::string before = read_file(dir / "V.txt");
  RunConfig c = small_config(dir, dir / "V.txt");
  c.benchmark = false;
  run_pipeline(c);
  EXPECT_EQ(read_file(dir / "V.txt"), before);
}

TEST(Pipeline, OutputsCarryTheConfigHash) {
  const fs::path dir = fresh_dir("hash");
  write_covariance(dir / "V.txt", reference_circuit().matrix());
  RunConfig c = small_config(dir, dir / "V.txt");
  c.benchmark = false;
  run_pipeline(c);
  for (const char* stage : {"decompose", "mps", "sample"}) {
    const std::string m = read_file(c.out / stage / "manifest.json");
    EXPECT_NE(m.find("config_hash"), std::string::npos) << stage;
    EXPECT_NE(m.find("\"seed\": 17"), std::string::npos) << stage;
  }
  EXPECT_EQ(read_file(c.out / "decompose" / "vp.txt").rfind("# config=", 0), 0u);
  const std::string samples = read_file(c.out / "sample" / "samples.txt");
  EXPECT_NE(samples.find("\n# config="), std::string::npos);
  EXPECT_EQ(read_samples(c.out / "sample" / "samples.txt").shots(), 200);
}

TEST(Pipeline, StageFailuresNameTheStage) {
  const fs::path dir = fresh_dir("fail");
  write_covariance(dir / "V.txt", reference_circuit().matrix());
  RunConfig c = small_config(dir, dir / "V.txt");
  c.max_hafnian_size = 2;
  try {
    run_pipeline(c);
    FAIL() << "expected a resource cap";
  } catch (const ResourceCapError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("stage build-mps: ", 0), 0u) << e.what();
  }
}

}  // namespace
}  // namespace gbsmps
