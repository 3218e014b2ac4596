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

// Hafnian kernels and Fock-basis matrix elements of Gaussian unitaries.

#ifndef GBSMPS_HAFNIAN_HPP
#define GBSMPS_HAFNIAN_HPP

#include <span>
#include <sstream>
#include <vector>

#include "gbsmps/gaussian.hpp"
#include "gbsmps/types.hpp"

namespace gbsmps {

inline constexpr int kDefaultMaxHafnianSize = 40;
inline constexpr int kBruteHafnianMaxSize = 14;

namespace detail {

template <typename Scalar>
Scalar brute_matchings(const Matrix<Scalar>& X, std::vector<int>& free_rows) {
  if (free_rows.empty()) return Scalar(1);
  const int first = free_rows.front();
  Scalar total(0);
  for (std::size_t k = 1; k < free_rows.size(); ++k) {
    const int partner = free_rows[k];
    std::vector<int> rest;
    rest.reserve(free_rows.size() - 2);
    for (std::size_t j = 1; j < free_rows.size(); ++j) {
      if (j != k) rest.push_back(free_rows[j]);
    }
    total += X(first, partner) * brute_matchings(X, rest);
  }
  return total;
}

}  // namespace detail

/// Sum over all perfect matchings of the products of matched entries.
/// Only the strict upper triangle is read.
template <typename Scalar>
Scalar hafnian_brute(const Matrix<Scalar>& X) {
  const auto n = X.rows();
  if (X.cols() != n) throw ValidationError("hafnian needs a square matrix");
  if (n > kBruteHafnianMaxSize) throw ResourceCapError("matrix too large for brute-force hafnian");
  if (n % 2 != 0) return Scalar(0);
  std::vector<int> rows(n);
  for (int i = 0; i < n; ++i) rows[i] = i;
  return detail::brute_matchings(X, rows);
}

/// Power-trace hafnian, O(n^4 2^{n/2}) with plain matrix powers.
///
/// haf(A) = sum_{Z subset [n/2]} (-1)^{n/2-|Z|} [x^{n/2}] exp(sum_j tr((A X)_Z^j) x^j / 2j)
/// where X swaps the two members of each row pair and (.)_Z keeps the row
/// pairs selected by Z.
template <typename Scalar>
Scalar hafnian(const Matrix<Scalar>& A, int max_size = kDefaultMaxHafnianSize) {
  const auto n = static_cast<int>(A.rows());
  if (A.cols() != n) throw ValidationError("hafnian needs a square matrix");
  if (n > max_size) {
    std::ostringstream msg;
    msg << "hafnian size " << n << " exceeds cap " << max_size;
    throw ResourceCapError(msg.str());
  }
  if (n == 0) return Scalar(1);
  if (n % 2 != 0) return Scalar(0);
  const int half = n / 2;

  // A X: column j of the product is column (j ^ 1) of A. Only the strict
  // upper triangle is read; the diagonal never enters a perfect matching.
  Matrix<Scalar> AX(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int jj = j ^ 1;
      if (i == jj) {
        AX(i, j) = Scalar(0);
      } else {
        AX(i, j) = i < jj ? A(i, jj) : A(jj, i);
      }
    }
  }

  Scalar total(0);
  std::vector<int> index;
  std::vector<Scalar> power_sums(half + 1);
  std::vector<Scalar> coeffs(half + 1);
  Matrix<Scalar> B;
  Matrix<Scalar> P;
  const unsigned long subsets = 1UL << half;
  for (unsigned long mask = 0; mask < subsets; ++mask) {
    index.clear();
    for (int k = 0; k < half; ++k) {
      if (mask & (1UL << k)) {
        index.push_back(2 * k);
        index.push_back(2 * k + 1);
      }
    }
    const auto size = static_cast<Eigen::Index>(index.size());
    std::fill(power_sums.begin(), power_sums.end(), Scalar(0));
    if (size > 0) {
      B.resize(size, size);
      for (Eigen::Index i = 0; i < size; ++i) {
        for (Eigen::Index j = 0; j < size; ++j) B(i, j) = AX(index[i], index[j]);
      }
      P = B;
      for (int j = 1; j <= half; ++j) {
        if (j > 1) P = P * B;
        power_sums[j] = P.trace() / Scalar(2 * j);
      }
    }
    // Coefficients of exp(sum_j p_j x^j) via c_k = (1/k) sum_j j p_j c_{k-j}.
    coeffs[0] = Scalar(1);
    for (int k = 1; k <= half; ++k) {
      Scalar acc(0);
      for (int j = 1; j <= k; ++j) acc += Scalar(j) * power_sums[j] * coeffs[k - j];
      coeffs[k] = acc / Scalar(k);
    }
    const int sign_exp = half - static_cast<int>(size / 2);
    total += (sign_exp % 2 == 0 ? coeffs[half] : -coeffs[half]);
  }
  return total;
}

/// Evaluates a batch of hafnians concurrently; result i belongs to input i.
std::vector<Complex> hafnian_batch(std::span<const MatrixC> matrices,
                                   int max_size = kDefaultMaxHafnianSize);

/// Complex symmetric 2M x 2M matrix [[U2 tanh(r) U2^T, U2 sech(r) U1],
/// [U1^T sech(r) U2^T, -U1^T tanh(r) U1]].
struct SigmaMatrix {
  MatrixC data;
  int modes() const { return static_cast<int>(data.rows() / 2); }
};

SigmaMatrix build_sigma(const GaussianUnitaryFactors& f);

/// Rows and columns of the output block repeated n1_i times followed by the
/// input block repeated n2_j times.
MatrixC repeat_pattern(const SigmaMatrix& sigma, std::span<const int> n1,
                       std::span<const int> n2);

/// <n1| U2 S(r) U1 |n2>.
Complex fock_amplitude(const GaussianUnitaryFactors& f, std::span<const int> n1,
                       std::span<const int> n2, int max_size = kDefaultMaxHafnianSize);

/// Same as fock_amplitude but reuses a precomputed Sigma.
Complex fock_amplitude(const GaussianUnitaryFactors& f, const SigmaMatrix& sigma,
                       std::span<const int> n1, std::span<const int> n2,
                       int max_size = kDefaultMaxHafnianSize);

/// Lossless GBS output probability with A = U diag(tanh r) U^T.
Real pure_output_probability(const VectorR& r_in, const MatrixC& U, std::span<const int> m,
                             int max_size = kDefaultMaxHafnianSize);

/// <m|D(beta)|n> for m < rows, n < cols.
MatrixC displacement_matrix(Complex beta, int rows, int cols);
inline MatrixC displacement_matrix(Complex beta, int d) { return displacement_matrix(beta, d, d); }

/// log(n!) via lgamma, cached for small n.
Real log_factorial(int n);

}  // namespace gbsmps

#endif  // GBSMPS_HAFNIAN_HPP
