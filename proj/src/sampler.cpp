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

#include "gbsmps/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "gbsmps/hafnian.hpp"
#include "gbsmps/parallel.hpp"

namespace gbsmps {

namespace {

constexpr Real kStarvedMass = 1e-9;
constexpr Real kLeakageLog = 1e-4;
constexpr std::size_t kOracleChunks = 64;
constexpr std::size_t kOracleMaxEntries = std::size_t{1} << 22;

std::size_t ipow(int base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) out *= static_cast<std::size_t>(base);
  return out;
}

// Contracts axis k of a row-major tensor with D (rows x dims[k]).
std::vector<Complex> apply_axis(const std::vector<Complex>& in, std::vector<int>& dims, int k,
                                const MatrixC& D) {
  std::size_t pre = 1, post = 1;
  for (int i = 0; i < k; ++i) pre *= dims[i];
  for (std::size_t i = k + 1; i < dims.size(); ++i) post *= dims[i];
  const auto n_in = static_cast<std::size_t>(dims[k]);
  const auto n_out = static_cast<std::size_t>(D.rows());
  std::vector<Complex> out(pre * n_out * post, Complex(0.0, 0.0));
  for (std::size_t a = 0; a < pre; ++a) {
    for (std::size_t r = 0; r < n_out; ++r) {
      Complex* dst = &out[(a * n_out + r) * post];
      for (std::size_t n = 0; n < n_in; ++n) {
        const Complex c = D(r, n);
        if (c == Complex(0.0, 0.0)) continue;
        const Complex* src = &in[(a * n_in + n) * post];
        for (std::size_t b = 0; b < post; ++b) dst[b] += c * src[b];
      }
    }
  }
  dims[k] = static_cast<int>(n_out);
  return out;
}

}  // namespace

DisplacementSampler::DisplacementSampler(const MatrixR& W) {
  if (W.rows() != W.cols() || W.rows() % 2 != 0) {
    throw ValidationError("displacement covariance must be square with even dimension");
  }
  const MatrixR sym = 0.5 * (W + W.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixR> eig(sym);
  if (eig.info() != Eigen::Success) throw NonconvergenceError("eigendecomposition of W failed");
  const VectorR lam = eig.eigenvalues();
  if (lam.size() > 0 && lam.minCoeff() < -1e-8) {
    std::ostringstream msg;
    msg << "displacement covariance is not PSD (min eigenvalue " << lam.minCoeff() << ")";
    throw ValidationError(msg.str());
  }
  L_ = eig.eigenvectors() * lam.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  trivial_ = sym.cwiseAbs().maxCoeff() == 0.0;
}

DisplacementDraw DisplacementSampler::draw(RandomStream& rng) const {
  const int m = modes();
  DisplacementDraw out;
  VectorR z(2 * m);
  for (int i = 0; i < 2 * m; ++i) z(i) = rng.normal();
  out.delta = trivial_ ? VectorR::Zero(2 * m) : VectorR(L_ * z);
  out.beta.resize(m);
  for (int k = 0; k < m; ++k) out.beta(k) = 0.5 * Complex(out.delta(k), out.delta(m + k));
  return out;
}

DisplacementDraw draw_displacement(const MatrixR& W, RandomStream& rng) {
  return DisplacementSampler(W).draw(rng);
}

MpsState displace_tensors(const MpsState& mps, const VectorC& beta, int d_sample) {
  if (beta.size() != mps.modes) throw ValidationError("one displacement per mode required");
  if (d_sample < 1) throw ValidationError("sampling cutoff must be positive");
  MpsState out = mps;
  out.d = d_sample;
  for (int k = 0; k < mps.modes; ++k) {
    const SiteTensor& g = mps.gamma[k];
    SiteTensor t(d_sample, g.left, g.right);
    const std::size_t block = static_cast<std::size_t>(g.left) * g.right;
    if (beta(k) == Complex(0.0, 0.0)) {
      for (int n = 0; n < std::min(d_sample, g.d); ++n) {
        std::copy_n(&g.data[n * block], block, &t.data[n * block]);
      }
    } else {
      const MatrixC D = displacement_matrix(beta(k), d_sample, g.d);
      for (int m = 0; m < d_sample; ++m) {
        Complex* dst = &t.data[m * block];
        for (int n = 0; n < g.d; ++n) {
          const Complex c = D(m, n);
          const Complex* src = &g.data[n * block];
          for (std::size_t i = 0; i < block; ++i) dst[i] += c * src[i];
        }
      }
    }
    out.gamma[k] = std::move(t);
  }
  return out;
}

Pattern sample_chain(const MpsState& mps, RandomStream& rng, ChainStats* stats) {
  Pattern out(mps.modes, 0);
  VectorC env = VectorC::Ones(1);
  std::vector<VectorC> branch;
  std::vector<Real> mass;
  for (int k = 0; k < mps.modes; ++k) {
    const SiteTensor& g = mps.gamma[k];
    const bool last = k + 1 == mps.modes;
    branch.assign(g.d, VectorC());
    mass.assign(g.d, 0.0);
    Real total = 0.0;
    for (int n = 0; n < g.d; ++n) {
      VectorC v = VectorC::Zero(g.right);
      for (int a = 0; a < g.left; ++a) {
        if (env(a) == Complex(0.0, 0.0)) continue;
        for (int b = 0; b < g.right; ++b) v(b) += env(a) * g(n, a, b);
      }
      if (!last) v = v.cwiseProduct(mps.lambda[k].cast<Complex>());
      mass[n] = v.squaredNorm();
      total += mass[n];
      branch[n] = std::move(v);
    }
    if (!(total >= kStarvedMass)) {
      std::ostringstream msg;
      msg << "conditional mass " << total << " at mode " << k + 1
          << " is below the cutoff starvation threshold";
      throw ResourceCapError(msg.str());
    }
    if (stats != nullptr) {
      const Real leak = std::max(0.0, 1.0 - total);
      stats->max_leakage = std::max(stats->max_leakage, leak);
      if (leak > kLeakageLog) ++stats->leaky_sites;
    }
    Real u = rng.uniform() * total;
    int pick = g.d - 1;
    for (int n = 0; n < g.d; ++n) {
      if (u < mass[n]) {
        pick = n;
        break;
      }
      u -= mass[n];
    }
    while (mass[pick] == 0.0 && pick > 0) --pick;
    out[k] = pick;
    env = branch[pick] / std::sqrt(mass[pick]);
  }
  return out;
}

const char* detector_name(Detector d) { return d == Detector::kPnr ? "pnr" : "threshold"; }

Detector parse_detector(const std::string& name) {
  if (name == "pnr") return Detector::kPnr;
  if (name == "threshold") return Detector::kThreshold;
  throw ValidationError("unknown detector '" + name + "'");
}

Pattern to_clicks(std::span<const int> m) {
  Pattern out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i] > 0 ? 1 : 0;
  return out;
}

SampleBatch sample_batch(const MpsState& mps, const MatrixR& W, int shots, std::uint64_t seed,
                         const SampleOptions& options) {
  if (shots < 0) throw ValidationError("shot count must be nonnegative");
  if (W.rows() != 2 * mps.modes) throw ValidationError("W does not match the MPS mode count");
  const DisplacementSampler noise(W);
  SampleBatch batch;
  batch.modes = mps.modes;
  batch.seed = seed;
  batch.detector = options.detector;
  batch.patterns.resize(shots);
  std::vector<ChainStats> stats(shots);
  const int workers = options.workers > 0 ? options.workers : worker_count();
  parallel_for(
      static_cast<std::size_t>(shots),
      [&](std::size_t i) {
        RandomStream rng(seed, stage::kSampleShot, i);
        const DisplacementDraw draw = noise.draw(rng);
        const MpsState shifted = displace_tensors(mps, draw.beta, options.d_sample);
        Pattern m = sample_chain(shifted, rng, &stats[i]);
        batch.patterns[i] = options.detector == Detector::kThreshold ? to_clicks(m) : std::move(m);
      },
      workers);
  for (const ChainStats& s : stats) {
    batch.stats.max_leakage = std::max(batch.stats.max_leakage, s.max_leakage);
    batch.stats.leaky_sites += s.leaky_sites;
  }
  return batch;
}

void write_samples(std::ostream& out, const SampleBatch& batch) {
  out << "# modes=" << batch.modes << " shots=" << batch.shots() << " seed=" << batch.seed
      << " detector=" << detector_name(batch.detector) << '\n';
  for (const Pattern& p : batch.patterns) {
    for (std::size_t i = 0; i < p.size(); ++i) out << (i ? " " : "") << p[i];
    out << '\n';
  }
}

void write_samples(const std::filesystem::path& file, const SampleBatch& batch) {
  std::ofstream out(file);
  if (!out) throw ValidationError("cannot write " + file.string());
  write_samples(out, batch);
  if (!out) throw ValidationError("failed writing " + file.string());
}

SampleBatch read_samples(std::istream& in) {
  SampleBatch batch;
  std::string line;
  if (!std::getline(in, line) || line.rfind("#", 0) != 0) {
    throw ValidationError("sample file must start with a '# modes=... shots=...' header");
  }
  int shots = -1;
  bool have_modes = false;
  std::istringstream header(line.substr(1));
  std::string field;
  while (header >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    try {
      if (key == "modes") {
        batch.modes = std::stoi(value);
        have_modes = true;
      } else if (key == "shots") {
        shots = std::stoi(value);
      } else if (key == "seed") {
        batch.seed = std::stoull(value);
      } else if (key == "detector") {
        batch.detector = parse_detector(value);
      }
    } catch (const std::logic_error&) {
      throw ValidationError("bad sample header field '" + field + "'");
    }
  }
  if (!have_modes || batch.modes < 1) throw ValidationError("sample header lacks modes=");
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    Pattern p;
    int v;
    while (row >> v) {
      if (v < 0) throw ValidationError("negative photon count in sample file");
      p.push_back(v);
    }
    if (!row.eof()) throw ValidationError("non-integer entry in sample file: " + line);
    if (static_cast<int>(p.size()) != batch.modes) {
      throw ValidationError("sample row has wrong number of modes: " + line);
    }
    batch.patterns.push_back(std::move(p));
  }
  if (shots >= 0 && shots != batch.shots()) {
    throw ValidationError("sample file row count does not match shots= header");
  }
  return batch;
}

SampleBatch read_samples(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot read " + file.string());
  return read_samples(in);
}

std::size_t PatternTable::index(std::span<const int> m) const {
  std::size_t idx = 0;
  for (int k = 0; k < modes; ++k) idx = idx * cutoff + static_cast<std::size_t>(m[k]);
  return idx;
}

Pattern PatternTable::pattern(std::size_t index) const {
  Pattern out(modes);
  for (int k = modes - 1; k >= 0; --k) {
    out[k] = static_cast<int>(index % cutoff);
    index /= cutoff;
  }
  return out;
}

Real PatternTable::probability(std::span<const int> m) const {
  if (static_cast<int>(m.size()) != modes) throw ValidationError("pattern length mismatch");
  for (int v : m) {
    if (v < 0 || v >= cutoff) return 0.0;
  }
  return p[index(m)];
}

GaussianOracle::GaussianOracle(const CovMatrix& Vp, const MatrixR& W, int cutoff, int psi_cutoff)
    : modes_(Vp.modes()),
      cutoff_(cutoff),
      psi_cutoff_(psi_cutoff > 0 ? psi_cutoff : std::min(cutoff + 4, 12)),
      noise_(W) {
  if (modes_ > kOracleMaxModes) throw ResourceCapError("oracle supports at most 6 modes");
  if (cutoff < 1 || cutoff > kOracleMaxCutoff) throw ResourceCapError("oracle cutoff must be in [1, 8]");
  if (psi_cutoff_ < cutoff) throw ValidationError("state cutoff below output cutoff");
  if (noise_.modes() != modes_) throw ValidationError("W does not match V_p");
  const std::size_t size = ipow(psi_cutoff_, modes_);
  if (size > kOracleMaxEntries) throw ResourceCapError("oracle statevector too large");
  if (!is_pure(Vp, 1e-6)) throw ValidationError("oracle needs a pure V_p");
  const GaussianUnitaryFactors f = bloch_messiah(williamson(Vp).S);
  const SigmaMatrix sigma = build_sigma(f);
  psi_.resize(size);
  const Pattern vacuum(modes_, 0);
  const int cut = psi_cutoff_;
  const int m = modes_;
  parallel_for(size, [&](std::size_t idx) {
    Pattern n(m);
    std::size_t rest = idx;
    for (int k = m - 1; k >= 0; --k) {
      n[k] = static_cast<int>(rest % cut);
      rest /= cut;
    }
    psi_[idx] = fock_amplitude(f, sigma, n, vacuum, 128);
  });
}

std::vector<Complex> GaussianOracle::displaced(const VectorC& beta,
                                               std::span<const int> rows) const {
  std::vector<int> dims(modes_, psi_cutoff_);
  std::vector<Complex> t = psi_;
  for (int k = 0; k < modes_; ++k) {
    const MatrixC D = displacement_matrix(beta(k), cutoff_, psi_cutoff_);
    if (rows.empty()) {
      t = apply_axis(t, dims, k, D);
    } else {
      t = apply_axis(t, dims, k, D.row(rows[k]));
    }
  }
  return t;
}

Estimate GaussianOracle::probability(std::span<const int> m, int draws, std::uint64_t seed) const {
  if (static_cast<int>(m.size()) != modes_) throw ValidationError("pattern length mismatch");
  for (int v : m) {
    if (v < 0 || v >= cutoff_) throw ValidationError("pattern outside oracle cutoff");
  }
  if (noise_.trivial() || draws <= 0) {
    return {std::norm(displaced(VectorC::Zero(modes_), m)[0]), 0.0};
  }
  std::vector<Real> values(draws);
  parallel_for(static_cast<std::size_t>(draws), [&](std::size_t i) {
    RandomStream rng(seed, stage::kOracle, i);
    values[i] = std::norm(displaced(noise_.draw(rng).beta, m)[0]);
  });
  Real sum = 0.0, sq = 0.0;
  for (Real v : values) {
    sum += v;
    sq += v * v;
  }
  const Real mean = sum / draws;
  const Real var = draws > 1 ? std::max(0.0, (sq - draws * mean * mean) / (draws - 1)) : 0.0;
  return {mean, std::sqrt(var / draws)};
}

PatternTable GaussianOracle::distribution(int draws, std::uint64_t seed) const {
  PatternTable table;
  table.modes = modes_;
  table.cutoff = cutoff_;
  const std::size_t size = ipow(cutoff_, modes_);
  table.p.assign(size, 0.0);
  table.err.assign(size, 0.0);
  if (noise_.trivial() || draws <= 0) {
    const auto amp = displaced(VectorC::Zero(modes_), {});
    for (std::size_t i = 0; i < size; ++i) table.p[i] = std::norm(amp[i]);
    return table;
  }
  // Fixed chunking keeps the summation order independent of the worker count.
  const std::size_t chunks = std::min<std::size_t>(kOracleChunks, draws);
  std::vector<std::vector<Real>> sums(chunks, std::vector<Real>(size, 0.0));
  std::vector<std::vector<Real>> squares(chunks, std::vector<Real>(size, 0.0));
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t begin = c * draws / chunks;
    const std::size_t end = (c + 1) * draws / chunks;
    for (std::size_t i = begin; i < end; ++i) {
      RandomStream rng(seed, stage::kOracle, i);
      const auto amp = displaced(noise_.draw(rng).beta, {});
      for (std::size_t j = 0; j < size; ++j) {
        const Real v = std::norm(amp[j]);
        sums[c][j] += v;
        squares[c][j] += v * v;
      }
    }
  });
  for (std::size_t j = 0; j < size; ++j) {
    Real sum = 0.0, sq = 0.0;
    for (std::size_t c = 0; c < chunks; ++c) {
      sum += sums[c][j];
      sq += squares[c][j];
    }
    const Real mean = sum / draws;
    const Real var = draws > 1 ? std::max(0.0, (sq - draws * mean * mean) / (draws - 1)) : 0.0;
    table.p[j] = mean;
    table.err[j] = std::sqrt(var / draws);
  }
  return table;
}

}  // namespace gbsmps
