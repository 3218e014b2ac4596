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

#ifndef GBSMPS_TYPES_HPP
#define GBSMPS_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace gbsmps {

using Real = double;
using Complex = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixR = Matrix<Real>;
using MatrixC = Matrix<Complex>;
using VectorR = Vector<Real>;
using VectorC = Vector<Complex>;

/// Photon-number pattern over a set of modes.
using Pattern = std::vector<int>;

inline int pattern_total(const Pattern& p) {
  int total = 0;
  for (int n : p) total += n;
  return total;
}

// Error hierarchy. The CLI maps these onto exit codes 2, 3 and 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NonconvergenceError : public Error {
 public:
  using Error::Error;
};

class ResourceCapError : public Error {
 public:
  using Error::Error;
};

}  // namespace gbsmps

#endif  // GBSMPS_TYPES_HPP
