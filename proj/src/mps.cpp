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

#include "gbsmps/mps.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "gbsmps/parallel.hpp"

namespace gbsmps {

namespace fs = std::filesystem;

namespace {

constexpr std::array<char, 8> kTensorMagic = {'G', 'B', 'S', 'M', 'P', 'S', 'G', 'T'};
constexpr std::array<char, 8> kLambdaMagic = {'G', 'B', 'S', 'M', 'P', 'S', 'L', 'B'};
constexpr std::uint32_t kFormatVersion = 1;

struct Candidate {
  Real weight;
  Pattern pattern;
  int pivot;  // children may only increment modes >= pivot
};

struct HeavierFirst {
  bool operator()(const Candidate& a, const Candidate& b) const {
    if (a.weight != b.weight) return a.weight < b.weight;
    return a.pattern > b.pattern;
  }
};

std::vector<int> range_modes(int first, int last) {
  std::vector<int> out(last - first);
  std::iota(out.begin(), out.end(), first);
  return out;
}

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ValidationError("truncated MPS file");
  return value;
}

void check_magic(std::istream& in, const std::array<char, 8>& magic, const fs::path& file) {
  std::array<char, 8> buf{};
  in.read(buf.data(), buf.size());
  if (!in || buf != magic) throw ValidationError("not an MPS file: " + file.string());
  if (get<std::uint32_t>(in) != kFormatVersion) {
    throw ValidationError("unsupported MPS file version: " + file.string());
  }
}

std::string numbered(const char* stem, int k, const char* ext) {
  std::ostringstream name;
  name << stem << std::setw(4) << std::setfill('0') << k << ext;
  return name.str();
}

}  // namespace

MatrixC SiteTensor::slice(int n) const {
  MatrixC out(left, right);
  for (int a = 0; a < left; ++a) {
    for (int b = 0; b < right; ++b) out(a, b) = (*this)(n, a, b);
  }
  return out;
}

VectorR BondSpectrum::lambda() const {
  VectorR out(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) out(i) = std::sqrt(weights[i]);
  return out;
}

Real thermal_weight(const VectorR& nbar, std::span<const int> n) {
  Real w = 1.0;
  for (Eigen::Index i = 0; i < nbar.size(); ++i) {
    const Real nb = nbar(i);
    w /= nb + 1.0;
    if (n[i] > 0) w *= std::pow(nb / (nb + 1.0), n[i]);
  }
  return w;
}

std::vector<Pattern> top_patterns(const VectorR& nbar, int limit, Real min_weight) {
  const int m = static_cast<int>(nbar.size());
  std::vector<Pattern> out;
  if (limit <= 0) return out;
  std::priority_queue<Candidate, std::vector<Candidate>, HeavierFirst> heap;
  Pattern zero(m, 0);
  heap.push({thermal_weight(nbar, zero), zero, 0});
  // Every pattern has a unique parent (decrement its last nonzero entry),
  // which is never lighter, so best-first expansion visits patterns in
  // weight order.
  while (!heap.empty() && static_cast<int>(out.size()) < limit) {
    Candidate top = heap.top();
    heap.pop();
    if (top.weight < min_weight) break;
    for (int i = top.pivot; i < m; ++i) {
      Candidate child{0.0, top.pattern, i};
      ++child.pattern[i];
      child.weight = thermal_weight(nbar, child.pattern);
      if (child.weight >= min_weight) heap.push(std::move(child));
    }
    out.push_back(std::move(top.pattern));
  }
  return out;
}

BondSpectrum bond_spectrum(const CovMatrix& Vp, int k, int chi) {
  const int m = Vp.modes();
  if (k < 0 || k >= m) throw ValidationError("bond index out of range");
  if (chi < 1) throw ValidationError("bond dimension must be positive");
  const std::vector<int> block = range_modes(k, m);
  const WilliamsonResult w = williamson(k == 0 ? Vp : reduced_covariance(Vp, block));
  BondSpectrum out;
  out.nbar = w.thermal_means();
  out.S = w.S;
  out.patterns = top_patterns(out.nbar, chi);
  for (const Pattern& p : out.patterns) out.weights.push_back(thermal_weight(out.nbar, p));
  return out;
}

SiteTensor MpsState::right_canonical(int k) const {
  SiteTensor out = gamma[k];
  if (k + 1 >= modes) return out;
  const VectorR& lam = lambda[k];
  for (int n = 0; n < out.d; ++n) {
    for (int a = 0; a < out.left; ++a) {
      for (int b = 0; b < out.right; ++b) out(n, a, b) *= lam(b);
    }
  }
  return out;
}

MpsBuild build_mps(const CovMatrix& Vp, const MpsOptions& options) {
  if (options.chi < 1) throw ValidationError("bond dimension must be positive");
  if (options.d < 2) throw ValidationError("local dimension must be at least 2");
  require_physical(Vp);
  if (!is_pure(Vp, 1e-6)) throw ValidationError("MPS construction needs a pure covariance");
  const int m = Vp.modes();

  std::vector<BondSpectrum> spectra;
  spectra.reserve(m);
  for (int k = 0; k < m; ++k) spectra.push_back(bond_spectrum(Vp, k, k == 0 ? 1 : options.chi));

  MpsBuild out;
  MpsState& st = out.state;
  st.modes = m;
  st.d = options.d;
  st.chi = options.chi;
  for (int k = 1; k < m; ++k) {
    st.lambda.push_back(spectra[k].lambda());
    st.patterns.push_back(spectra[k].patterns);
    Real kept = 0.0;
    for (Real w : spectra[k].weights) kept += w;
    out.report.epsilon.push_back(std::clamp(1.0 - kept, 0.0, 1.0));
    for (const Pattern& p : spectra[k].patterns) {
      out.report.l_max = std::max(out.report.l_max, pattern_total(p));
    }
  }
  out.report.center_error = m > 1 ? out.report.epsilon[m / 2 - 1] : 0.0;

  const int workers = options.workers > 0 ? options.workers : worker_count();
  const Pattern empty;
  for (int k = 0; k < m; ++k) {
    const BondSpectrum& lhs = spectra[k];
    const bool last = k + 1 == m;
    // Composite (1 (+) U_{k+1})^dagger U_k acting on modes k..M-1.
    SymplecticMatrix composite = lhs.S;
    if (!last) {
      const SymplecticMatrix embedded = direct_sum(SymplecticMatrix::identity(1), spectra[k + 1].S);
      composite = compose(embedded.inverse(), lhs.S);
    }
    const GaussianUnitaryFactors f = bloch_messiah(composite);
    const SigmaMatrix sigma = build_sigma(f);
    const std::vector<Pattern>& right = last ? std::vector<Pattern>{empty} : spectra[k + 1].patterns;
    const int nl = static_cast<int>(lhs.patterns.size());
    const int nr = static_cast<int>(right.size());
    SiteTensor A(options.d, nl, nr);

    int biggest = 0;
    for (const Pattern& a : lhs.patterns) {
      for (const Pattern& b : right) {
        biggest = std::max(biggest, options.d - 1 + pattern_total(a) + pattern_total(b));
      }
    }
    out.report.max_hafnian_size = std::max(out.report.max_hafnian_size, biggest);

    parallel_for(
        static_cast<std::size_t>(options.d) * nl * nr,
        [&](std::size_t idx) {
          const int b = static_cast<int>(idx % nr);
          const int a = static_cast<int>((idx / nr) % nl);
          const int n = static_cast<int>(idx / (static_cast<std::size_t>(nr) * nl));
          Pattern n1;
          n1.reserve(right[b].size() + 1);
          n1.push_back(n);
          n1.insert(n1.end(), right[b].begin(), right[b].end());
          A(n, a, b) = fock_amplitude(f, sigma, n1, lhs.patterns[a], options.max_hafnian_size);
        },
        workers);

    if (!last) {
      const VectorR& lam = st.lambda[k];
      for (int n = 0; n < A.d; ++n) {
        for (int a = 0; a < nl; ++a) {
          for (int b = 0; b < nr; ++b) {
            A(n, a, b) = lam(b) < kMinLambda ? Complex(0.0, 0.0) : A(n, a, b) / lam(b);
          }
        }
      }
    }
    st.gamma.push_back(std::move(A));
  }

  // Each composite carries its own phase convention; fix the global phase so
  // that the vacuum amplitude is real and positive.
  const Pattern vacuum(m, 0);
  const Complex v = contract_amplitude(st, vacuum);
  if (std::abs(v) > 0.0) {
    const Complex phase = std::conj(v) / std::abs(v);
    for (Complex& x : st.gamma[0].data) x *= phase;
  }
  return out;
}

Real truncation_error(const TruncationReport& report) { return report.center_error; }

Complex contract_amplitude(const MpsState& mps, std::span<const int> m) {
  if (static_cast<int>(m.size()) != mps.modes) throw ValidationError("pattern length mismatch");
  VectorC env = VectorC::Ones(1);
  for (int k = 0; k < mps.modes; ++k) {
    const SiteTensor& g = mps.gamma[k];
    if (m[k] < 0) throw ValidationError("negative photon number");
    if (m[k] >= g.d) return Complex(0.0, 0.0);
    VectorC next = VectorC::Zero(g.right);
    for (int a = 0; a < g.left; ++a) {
      if (env(a) == Complex(0.0, 0.0)) continue;
      for (int b = 0; b < g.right; ++b) next(b) += env(a) * g(m[k], a, b);
    }
    if (k + 1 < mps.modes) next = next.cwiseProduct(mps.lambda[k].cast<Complex>());
    env = std::move(next);
  }
  return env(0);
}

void write_site_tensor(const fs::path& file, int k, const SiteTensor& t) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + file.string());
  out.write(kTensorMagic.data(), kTensorMagic.size());
  put<std::uint32_t>(out, kFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(k));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(t.d));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(t.left));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(t.right));
  for (const Complex& z : t.data) {
    put<double>(out, z.real());
    put<double>(out, z.imag());
  }
  if (!out) throw ValidationError("failed writing " + file.string());
}

SiteTensor read_site_tensor(const fs::path& file, int* k) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + file.string());
  check_magic(in, kTensorMagic, file);
  const auto index = static_cast<int>(get<std::uint32_t>(in));
  if (k != nullptr) *k = index;
  const auto d = static_cast<int>(get<std::uint32_t>(in));
  const auto left = static_cast<int>(get<std::uint32_t>(in));
  const auto right = static_cast<int>(get<std::uint32_t>(in));
  SiteTensor t(d, left, right);
  for (Complex& z : t.data) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    z = Complex(re, im);
  }
  return t;
}

void save_mps(const MpsBuild& build, const fs::path& dir, const std::string& config_hash) {
  const MpsState& st = build.state;
  fs::create_directories(dir);
  for (int k = 0; k < st.modes; ++k) {
    write_site_tensor(dir / numbered("mode_", k + 1, ".bin"), k + 1, st.gamma[k]);
  }
  for (int k = 1; k < st.modes; ++k) {
    const fs::path file = dir / numbered("bond_", k, ".lambda");
    std::ofstream out(file, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + file.string());
    const VectorR& lam = st.lambda[k - 1];
    const auto& pats = st.patterns[k - 1];
    out.write(kLambdaMagic.data(), kLambdaMagic.size());
    put<std::uint32_t>(out, kFormatVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(k));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(lam.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(st.modes - k));
    for (Eigen::Index i = 0; i < lam.size(); ++i) put<double>(out, lam(i));
    for (const Pattern& p : pats) {
      for (int v : p) put<std::int32_t>(out, v);
    }
    if (!out) throw ValidationError("failed writing " + file.string());
  }
  nlohmann::json manifest;
  manifest["format"] = "gbsmps-mps";
  manifest["version"] = kFormatVersion;
  manifest["modes"] = st.modes;
  manifest["d"] = st.d;
  manifest["chi"] = st.chi;
  manifest["center_error"] = build.report.center_error;
  manifest["epsilon"] = build.report.epsilon;
  manifest["l_max"] = build.report.l_max;
  manifest["max_hafnian_size"] = build.report.max_hafnian_size;
  manifest["config_hash"] = config_hash;
  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
  if (!out) throw ValidationError("failed writing manifest in " + dir.string());
}

MpsBuild load_mps(const fs::path& dir) {
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw ValidationError("missing manifest.json in " + dir.string());
  nlohmann::json manifest;
  try {
    mf >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad MPS manifest: ") + e.what());
  }
  MpsBuild build;
  MpsState& st = build.state;
  st.modes = manifest.at("modes").get<int>();
  st.d = manifest.at("d").get<int>();
  st.chi = manifest.at("chi").get<int>();
  build.report.center_error = manifest.at("center_error").get<Real>();
  build.report.epsilon = manifest.at("epsilon").get<std::vector<Real>>();
  build.report.l_max = manifest.value("l_max", 0);
  build.report.max_hafnian_size = manifest.value("max_hafnian_size", 0);
  for (int k = 1; k <= st.modes; ++k) {
    int index = 0;
    st.gamma.push_back(read_site_tensor(dir / numbered("mode_", k, ".bin"), &index));
    if (index != k) throw ValidationError("MPS site file out of order");
  }
  for (int k = 1; k < st.modes; ++k) {
    const fs::path file = dir / numbered("bond_", k, ".lambda");
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ValidationError("cannot read " + file.string());
    check_magic(in, kLambdaMagic, file);
    if (static_cast<int>(get<std::uint32_t>(in)) != k) throw ValidationError("bond file out of order");
    const auto count = static_cast<int>(get<std::uint32_t>(in));
    const auto width = static_cast<int>(get<std::uint32_t>(in));
    VectorR lam(count);
    for (int i = 0; i < count; ++i) lam(i) = get<double>(in);
    std::vector<Pattern> pats(count, Pattern(width));
    for (Pattern& p : pats) {
      for (int& v : p) v = get<std::int32_t>(in);
    }
    st.lambda.push_back(std::move(lam));
    st.patterns.push_back(std::move(pats));
  }
  for (int k = 0; k < st.modes; ++k) {
    const SiteTensor& g = st.gamma[k];
    const int want_left = k == 0 ? 1 : static_cast<int>(st.lambda[k - 1].size());
    const int want_right = k + 1 == st.modes ? 1 : static_cast<int>(st.lambda[k].size());
    if (g.left != want_left || g.right != want_right || g.d != st.d) {
      throw ValidationError("MPS tensor shapes inconsistent with bond files");
    }
  }
  return build;
}

}  // namespace gbsmps
