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

// Shared generators and dense oracles for the test suites. Everything here is
// built from first principles (matrix exponentials in a truncated Fock space,
// exhaustive enumeration) and never calls the library's decompositions.

#ifndef GBSMPS_TESTS_TEST_UTIL_HPP
#define GBSMPS_TESTS_TEST_UTIL_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "gbsmps/gaussian.hpp"
#include "gbsmps/rng.hpp"
#include "gbsmps/types.hpp"

namespace gbsmps::testing {

inline MatrixC random_complex_symmetric(int n, RandomStream& rng) {
  MatrixC X(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      X(i, j) = Complex(rng.normal(), rng.normal());
      X(j, i) = X(i, j);
    }
  }
  return X;
}

inline MatrixR random_symmetric(int n, RandomStream& rng, Real scale = 1.0) {
  MatrixR X(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      X(i, j) = scale * rng.normal();
      X(j, i) = X(i, j);
    }
  }
  return X;
}

/// exp(Omega H) for a random symmetric H is symplectic.
inline MatrixR random_symplectic(int modes, RandomStream& rng, Real scale = 0.3) {
  const MatrixR H = random_symmetric(2 * modes, rng, scale);
  const MatrixR gen = omega(modes) * H;
  return gen.exp();
}

/// S diag(nu, nu) S^T with nu drawn from [1, 1 + spread].
inline CovMatrix random_covariance(int modes, RandomStream& rng, Real spread = 2.0) {
  const MatrixR S = random_symplectic(modes, rng);
  VectorR d(2 * modes);
  for (int i = 0; i < modes; ++i) {
    const Real nu = 1.0 + spread * rng.uniform();
    d(i) = nu;
    d(modes + i) = nu;
  }
  return CovMatrix(S * d.asDiagonal() * S.transpose());
}

/// Dense Fock-space operators on `modes` modes with per-mode cutoff `cutoff`.
class DenseFock {
 public:
  DenseFock(int modes, int cutoff) : modes_(modes), cutoff_(cutoff) {
    dim_ = 1;
    for (int i = 0; i < modes; ++i) dim_ *= cutoff;
    MatrixC a = MatrixC::Zero(cutoff, cutoff);
    for (int n = 1; n < cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<Real>(n));
    for (int k = 0; k < modes; ++k) {
      MatrixC op = MatrixC::Identity(1, 1);
      for (int j = 0; j < modes; ++j) {
        const MatrixC factor = (j == k) ? a : MatrixC::Identity(cutoff, cutoff);
        op = Eigen::kroneckerProduct(op, factor).eval();
      }
      lowering_.push_back(op);
    }
  }

  int dim() const { return dim_; }
  const MatrixC& a(int k) const { return lowering_[k]; }

  /// Row-major index: mode 0 is the most significant digit.
  int index(const std::vector<int>& n) const {
    int idx = 0;
    for (int k = 0; k < modes_; ++k) idx = idx * cutoff_ + n[k];
    return idx;
  }

  /// Passive unitary exp(sum_ij G_ij a_i^dag a_j) with U = exp(G).
  MatrixC passive(const MatrixC& U) const {
    const MatrixC G = U.log();
    MatrixC gen = MatrixC::Zero(dim_, dim_);
    for (int i = 0; i < modes_; ++i) {
      for (int j = 0; j < modes_; ++j) gen += G(i, j) * lowering_[i].adjoint() * lowering_[j];
    }
    return gen.exp();
  }

  /// prod_k exp(r_k / 2 (a_k^dag^2 - a_k^2)).
  MatrixC squeezer(const VectorR& r) const {
    MatrixC gen = MatrixC::Zero(dim_, dim_);
    for (int k = 0; k < modes_; ++k) {
      const MatrixC& ak = lowering_[k];
      gen += 0.5 * r(k) * (ak.adjoint() * ak.adjoint() - ak * ak);
    }
    return gen.exp();
  }

 private:
  int modes_;
  int cutoff_;
  int dim_;
  std::vector<MatrixC> lowering_;
};

/// Visits every pattern in [0, cutoff)^modes.
inline void for_each_pattern(int modes, int cutoff,
                             const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> n(modes, 0);
  while (true) {
    visit(n);
    int k = modes - 1;
    while (k >= 0 && ++n[k] == cutoff) n[k--] = 0;
    if (k < 0) return;
  }
}

inline Real max_abs_diff(const MatrixR& a, const MatrixR& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace gbsmps::testing

#endif  // GBSMPS_TESTS_TEST_UTIL_HPP
