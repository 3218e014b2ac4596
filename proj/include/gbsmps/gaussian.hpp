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

// Covariance-matrix formalism for zero-mean Gaussian states.
//
// Conventions used throughout the library:
//   * quadratures are ordered q = (x_1..x_M, p_1..p_M) ("xxpp");
//   * the vacuum covariance is the identity, a = (x + i p) / 2;
//   * a Gaussian unitary with symplectic matrix S maps V -> S V S^T;
//   * a passive unitary U acts as a_i -> sum_j U_ij a_j in the Heisenberg
//     picture, i.e. O = [[Re U, -Im U], [Im U, Re U]];
//   * the single-mode squeezer S(r) has symplectic diag(e^r, e^-r), so the
//     squeezed vacuum has covariance diag(e^2r, e^-2r).

#ifndef GBSMPS_GAUSSIAN_HPP
#define GBSMPS_GAUSSIAN_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "gbsmps/types.hpp"

namespace gbsmps {

/// Real symmetric 2M x 2M Wigner covariance matrix in xxpp ordering.
class CovMatrix {
 public:
  CovMatrix() = default;
  /// Throws ValidationError when `data` is not square with even dimension.
  explicit CovMatrix(MatrixR data);

  static CovMatrix vacuum(int modes);

  int modes() const { return static_cast<int>(data_.rows() / 2); }
  const MatrixR& matrix() const { return data_; }
  Real operator()(Eigen::Index i, Eigen::Index j) const { return data_(i, j); }

 private:
  MatrixR data_;
};

/// Real 2M x 2M matrix satisfying S Omega S^T = Omega.
class SymplecticMatrix {
 public:
  SymplecticMatrix() = default;
  /// Throws ValidationError unless S is symplectic to `tol`.
  explicit SymplecticMatrix(MatrixR data, Real tol = 1e-8);

  static SymplecticMatrix identity(int modes);

  int modes() const { return static_cast<int>(data_.rows() / 2); }
  const MatrixR& matrix() const { return data_; }

  SymplecticMatrix inverse() const;

 private:
  struct Unchecked {};
  SymplecticMatrix(MatrixR data, Unchecked) : data_(std::move(data)) {}
  friend SymplecticMatrix compose(const SymplecticMatrix&, const SymplecticMatrix&);
  friend SymplecticMatrix direct_sum(const SymplecticMatrix&, const SymplecticMatrix&);

  MatrixR data_;
};

/// Product a * b (apply b first).
SymplecticMatrix compose(const SymplecticMatrix& a, const SymplecticMatrix& b);
/// Block embedding of `a` on the first modes and `b` on the remaining ones.
SymplecticMatrix direct_sum(const SymplecticMatrix& a, const SymplecticMatrix& b);

struct WilliamsonResult {
  SymplecticMatrix S;
  VectorR nu;  // sorted descending, each >= 1 for physical states

  /// Thermal occupations (nu - 1) / 2, clamped at zero.
  VectorR thermal_means() const;
};

/// Bloch-Messiah factors of a Gaussian unitary U2 S(r) U1.
struct GaussianUnitaryFactors {
  MatrixC U2;
  VectorR r;  // nonnegative, sorted descending
  MatrixC U1;

  int modes() const { return static_cast<int>(r.size()); }
};

struct CovarianceReport {
  bool ok = true;
  Real symmetry_error = 0.0;   // max |V - V^T| relative to max |V|
  Real min_eigenvalue = 0.0;   // of the Hermitian matrix V + i Omega
  std::string message;
};

/// Canonical symplectic form [[0, 1], [-1, 0]] (x) 1_M.
MatrixR omega(int modes);

CovarianceReport validate_covariance(const MatrixR& V);

/// Throws ValidationError with the report message if `V` is not physical.
void require_physical(const CovMatrix& V);

CovMatrix squeezed_input(const VectorR& r);

/// Pure-loss channel with per-mode transmissions.
CovMatrix apply_loss(const CovMatrix& V, const VectorR& eta);
CovMatrix apply_loss(const CovMatrix& V, Real eta);

/// Orthogonal-symplectic matrix of a passive unitary.
MatrixR passive_symplectic(const MatrixC& U);
CovMatrix apply_passive(const CovMatrix& V, const MatrixC& U);
CovMatrix apply_symplectic(const CovMatrix& V, const SymplecticMatrix& S);

Real mean_photon(const CovMatrix& V);

WilliamsonResult williamson(const CovMatrix& V);

/// True when every symplectic eigenvalue is within `tol` of one.
bool is_pure(const CovMatrix& V, Real tol = 1e-7);

GaussianUnitaryFactors bloch_messiah(const SymplecticMatrix& S);

/// Symplectic matrix induced by U2 S(r) U1.
SymplecticMatrix factors_symplectic(const GaussianUnitaryFactors& f);

/// Complex (Bogoliubov) form a -> alpha a + beta a^dagger of a real symplectic.
struct Bogoliubov {
  MatrixC alpha;
  MatrixC beta;
};
Bogoliubov to_bogoliubov(const MatrixR& S);
MatrixR from_bogoliubov(const Bogoliubov& b);

/// Takagi factorization of a complex symmetric matrix: A = W diag(sigma) W^T
/// with W unitary and sigma sorted descending.
struct TakagiResult {
  MatrixC W;
  VectorR sigma;
};
TakagiResult takagi(const MatrixC& A, Real zero_tol = 1e-11);

CovMatrix reduced_covariance(const CovMatrix& V, std::span<const int> modes);

// Interferometer ensembles. All are deterministic in the seed.
MatrixC haar_unitary(int modes, std::uint64_t seed);
MatrixC brickwork_unitary(int modes, int depth, std::uint64_t seed);
/// Pairs (i, M-1-i) coupled so that equal squeezers produce TMSV pairs
/// straddling the center bipartition.
MatrixC tmsv_pairing_unitary(int pairs);

bool is_unitary(const MatrixC& U, Real tol = 1e-10);

enum class Ensemble { kExplicit, kGlobalHaar, kBrickwork, kTmsvWorstCase };

struct CircuitSpec {
  int modes = 0;
  VectorR r_in;
  VectorR eta;
  Ensemble ensemble = Ensemble::kExplicit;
  MatrixC U;      // used for kExplicit
  int depth = 0;  // brickwork depth
};

/// Interferometer matrix of the spec (generated from `seed` for ensembles).
MatrixC circuit_unitary(const CircuitSpec& spec, std::uint64_t seed);
CovMatrix build_circuit(const CircuitSpec& spec, std::uint64_t seed);

/// Covariance of a two-mode squeezed vacuum on two modes (xxpp ordering).
CovMatrix tmsv_covariance(Real s);

}  // namespace gbsmps

#endif  // GBSMPS_GAUSSIAN_HPP
