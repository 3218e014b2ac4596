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

#include "gbsmps/hafnian.hpp"

#include <array>
#include <cmath>

#include "gbsmps/parallel.hpp"

namespace gbsmps {

namespace {

constexpr int kFactorialTable = 256;

const std::array<Real, kFactorialTable>& factorial_table() {
  static const std::array<Real, kFactorialTable> table = [] {
    std::array<Real, kFactorialTable> t{};
    for (int n = 0; n < kFactorialTable; ++n) t[n] = std::lgamma(n + 1.0);
    return t;
  }();
  return table;
}

void require_pattern(std::span<const int> n, int modes) {
  if (static_cast<int>(n.size()) != modes) {
    throw ValidationError("photon pattern length must equal the mode count");
  }
  for (int v : n) {
    if (v < 0) throw ValidationError("photon counts must be nonnegative");
  }
}

}  // namespace

Real log_factorial(int n) {
  if (n < kFactorialTable) return factorial_table()[n];
  return std::lgamma(n + 1.0);
}

std::vector<Complex> hafnian_batch(std::span<const MatrixC> matrices, int max_size) {
  std::vector<Complex> out(matrices.size());
  parallel_for(matrices.size(), [&](std::size_t i) { out[i] = hafnian(matrices[i], max_size); });
  return out;
}

SigmaMatrix build_sigma(const GaussianUnitaryFactors& f) {
  const int m = f.modes();
  const VectorC t = f.r.array().tanh().matrix().cast<Complex>();
  const VectorC sech = f.r.array().cosh().inverse().matrix().cast<Complex>();
  SigmaMatrix sigma;
  sigma.data.resize(2 * m, 2 * m);
  sigma.data.topLeftCorner(m, m) = f.U2 * t.asDiagonal() * f.U2.transpose();
  sigma.data.topRightCorner(m, m) = f.U2 * sech.asDiagonal() * f.U1;
  sigma.data.bottomLeftCorner(m, m) = f.U1.transpose() * sech.asDiagonal() * f.U2.transpose();
  sigma.data.bottomRightCorner(m, m) = -(f.U1.transpose() * t.asDiagonal() * f.U1);
  return sigma;
}

MatrixC repeat_pattern(const SigmaMatrix& sigma, std::span<const int> n1,
                       std::span<const int> n2) {
  const int m = sigma.modes();
  require_pattern(n1, m);
  require_pattern(n2, m);
  std::vector<int> rows;
  for (int i = 0; i < m; ++i) rows.insert(rows.end(), n1[i], i);
  for (int i = 0; i < m; ++i) rows.insert(rows.end(), n2[i], m + i);
  const auto size = static_cast<Eigen::Index>(rows.size());
  MatrixC out(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = 0; j < size; ++j) out(i, j) = sigma.data(rows[i], rows[j]);
  }
  return out;
}

Complex fock_amplitude(const GaussianUnitaryFactors& f, const SigmaMatrix& sigma,
                       std::span<const int> n1, std::span<const int> n2, int max_size) {
  const int m = f.modes();
  require_pattern(n1, m);
  require_pattern(n2, m);
  int total = 0;
  Real log_norm = 0.0;
  for (int i = 0; i < m; ++i) {
    total += n1[i] + n2[i];
    log_norm += log_factorial(n1[i]) + log_factorial(n2[i]) + std::log(std::cosh(f.r(i)));
  }
  if (total % 2 != 0) return Complex(0.0, 0.0);
  if (total > max_size) {
    std::ostringstream msg;
    msg << "hafnian size " << total << " exceeds cap " << max_size << " for pattern (";
    for (int v : n1) msg << v << ' ';
    msg << "| ";
    for (int v : n2) msg << v << ' ';
    msg << ')';
    throw ResourceCapError(msg.str());
  }
  const Complex haf = hafnian(repeat_pattern(sigma, n1, n2), max_size);
  return haf * std::exp(-0.5 * log_norm);
}

Complex fock_amplitude(const GaussianUnitaryFactors& f, std::span<const int> n1,
                       std::span<const int> n2, int max_size) {
  return fock_amplitude(f, build_sigma(f), n1, n2, max_size);
}

Real pure_output_probability(const VectorR& r_in, const MatrixC& U, std::span<const int> m,
                             int max_size) {
  const auto modes = static_cast<int>(r_in.size());
  require_pattern(m, modes);
  const VectorC t = r_in.array().tanh().matrix().cast<Complex>();
  const MatrixC A = U * t.asDiagonal() * U.transpose();
  std::vector<int> rows;
  Real log_norm = 0.0;
  for (int i = 0; i < modes; ++i) {
    rows.insert(rows.end(), m[i], i);
    log_norm += log_factorial(m[i]) + std::log(std::cosh(r_in(i)));
  }
  if (rows.size() % 2 != 0) return 0.0;
  const auto size = static_cast<Eigen::Index>(rows.size());
  MatrixC Am(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = 0; j < size; ++j) Am(i, j) = A(rows[i], rows[j]);
  }
  return std::norm(hafnian(Am, max_size)) * std::exp(-log_norm);
}

MatrixC displacement_matrix(Complex beta, int rows, int cols) {
  if (rows < 1 || cols < 1) throw ValidationError("displacement cutoff must be positive");
  MatrixC D(rows, cols);
  // D|n> = (a^dagger - conj(beta)) D|n-1> / sqrt(n), seeded by the coherent
  // state <m|D|0> = e^{-|beta|^2/2} beta^m / sqrt(m!).
  D(0, 0) = std::exp(-0.5 * std::norm(beta));
  for (int m = 1; m < rows; ++m) D(m, 0) = beta / std::sqrt(static_cast<Real>(m)) * D(m - 1, 0);
  const Complex bc = std::conj(beta);
  for (int n = 1; n < cols; ++n) {
    const Real inv = 1.0 / std::sqrt(static_cast<Real>(n));
    D(0, n) = -bc * D(0, n - 1) * inv;
    for (int m = 1; m < rows; ++m) {
      D(m, n) = (std::sqrt(static_cast<Real>(m)) * D(m - 1, n - 1) - bc * D(m, n - 1)) * inv;
    }
  }
  return D;
}

}  // namespace gbsmps
