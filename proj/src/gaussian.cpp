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

#include "gbsmps/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "gbsmps/rng.hpp"

namespace gbsmps {

namespace {

const Complex kI(0.0, 1.0);

Real symplectic_defect(const MatrixR& S) {
  const MatrixR om = omega(static_cast<int>(S.rows() / 2));
  return (S * om * S.transpose() - om).cwiseAbs().maxCoeff();
}

// Index permutation sorting `values` descending, stable.
std::vector<int> descending_order(const VectorR& values) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values(a) > values(b); });
  return order;
}

// Rotates `v` so that its first entry with non-negligible modulus is
// positive imaginary. With e = u + i w this makes the leading entry of w
// positive and gives S = V^{1/2} for diagonal inputs.
void fix_phase(Eigen::Ref<VectorC> v) {
  const Real scale = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-8 * scale) {
      v *= kI * std::conj(v(i)) / std::abs(v(i));
      return;
    }
  }
}

}  // namespace

CovMatrix::CovMatrix(MatrixR data) : data_(std::move(data)) {
  if (data_.rows() != data_.cols() || data_.rows() % 2 != 0 || data_.rows() == 0) {
    throw ValidationError("covariance matrix must be square with even, nonzero dimension");
  }
}

CovMatrix CovMatrix::vacuum(int modes) {
  return CovMatrix(MatrixR::Identity(2 * modes, 2 * modes));
}

SymplecticMatrix::SymplecticMatrix(MatrixR data, Real tol) : data_(std::move(data)) {
  if (data_.rows() != data_.cols() || data_.rows() % 2 != 0) {
    throw ValidationError("symplectic matrix must be square with even dimension");
  }
  const Real defect = symplectic_defect(data_);
  if (!(defect <= tol * std::max<Real>(1.0, data_.squaredNorm()))) {
    std::ostringstream msg;
    msg << "matrix is not symplectic: max |S Omega S^T - Omega| = " << defect;
    throw ValidationError(msg.str());
  }
}

SymplecticMatrix SymplecticMatrix::identity(int modes) {
  return SymplecticMatrix(MatrixR::Identity(2 * modes, 2 * modes), Unchecked{});
}

SymplecticMatrix SymplecticMatrix::inverse() const {
  // S^{-1} = -Omega S^T Omega
  const MatrixR om = omega(modes());
  return SymplecticMatrix(-om * data_.transpose() * om, Unchecked{});
}

SymplecticMatrix compose(const SymplecticMatrix& a, const SymplecticMatrix& b) {
  return SymplecticMatrix(a.matrix() * b.matrix(), SymplecticMatrix::Unchecked{});
}

SymplecticMatrix direct_sum(const SymplecticMatrix& a, const SymplecticMatrix& b) {
  const int ma = a.modes();
  const int mb = b.modes();
  const int m = ma + mb;
  MatrixR out = MatrixR::Zero(2 * m, 2 * m);
  for (int bi = 0; bi < 2; ++bi) {
    for (int bj = 0; bj < 2; ++bj) {
      out.block(bi * m, bj * m, ma, ma) = a.matrix().block(bi * ma, bj * ma, ma, ma);
      out.block(bi * m + ma, bj * m + ma, mb, mb) = b.matrix().block(bi * mb, bj * mb, mb, mb);
    }
  }
  return SymplecticMatrix(std::move(out), SymplecticMatrix::Unchecked{});
}

VectorR WilliamsonResult::thermal_means() const {
  return ((nu.array() - 1.0) / 2.0).cwiseMax(0.0).matrix();
}

MatrixR omega(int modes) {
  MatrixR om = MatrixR::Zero(2 * modes, 2 * modes);
  om.topRightCorner(modes, modes).setIdentity();
  om.bottomLeftCorner(modes, modes) = -MatrixR::Identity(modes, modes);
  return om;
}

CovarianceReport validate_covariance(const MatrixR& V) {
  CovarianceReport report;
  if (V.rows() != V.cols() || V.rows() % 2 != 0 || V.rows() == 0) {
    report.ok = false;
    report.message = "dimension must be square, even and nonzero";
    return report;
  }
  const int m = static_cast<int>(V.rows() / 2);
  const Real scale = std::max<Real>(V.cwiseAbs().maxCoeff(), 1e-300);
  report.symmetry_error = (V - V.transpose()).cwiseAbs().maxCoeff() / scale;

  const MatrixR sym = 0.5 * (V + V.transpose());
  const MatrixC H = sym.cast<Complex>() + kI * omega(m).cast<Complex>();
  Eigen::SelfAdjointEigenSolver<MatrixC> eig(H, Eigen::EigenvaluesOnly);
  report.min_eigenvalue = eig.eigenvalues().minCoeff();

  std::ostringstream msg;
  if (report.symmetry_error > 1e-12) {
    report.ok = false;
    msg << "not symmetric (relative asymmetry " << report.symmetry_error << "); ";
  }
  if (report.min_eigenvalue < -1e-9) {
    report.ok = false;
    msg << "uncertainty principle violated: min eig(V + i Omega) = " << report.min_eigenvalue;
  }
  report.message = msg.str();
  return report;
}

void require_physical(const CovMatrix& V) {
  const CovarianceReport report = validate_covariance(V.matrix());
  if (!report.ok) throw ValidationError("invalid covariance: " + report.message);
}

CovMatrix squeezed_input(const VectorR& r) {
  const Eigen::Index m = r.size();
  MatrixR V = MatrixR::Zero(2 * m, 2 * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    V(i, i) = std::exp(2.0 * r(i));
    V(m + i, m + i) = std::exp(-2.0 * r(i));
  }
  return CovMatrix(std::move(V));
}

CovMatrix apply_loss(const CovMatrix& V, const VectorR& eta) {
  const int m = V.modes();
  if (eta.size() != m) throw ValidationError("loss vector length must equal the mode count");
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    if (!(eta(i) >= 0.0 && eta(i) <= 1.0)) {
      throw ValidationError("transmission must lie in [0, 1]");
    }
  }
  VectorR scale(2 * m);
  scale << eta.cwiseSqrt(), eta.cwiseSqrt();
  MatrixR out = scale.asDiagonal() * V.matrix() * scale.asDiagonal();
  for (int i = 0; i < m; ++i) {
    out(i, i) += 1.0 - eta(i);
    out(m + i, m + i) += 1.0 - eta(i);
  }
  return CovMatrix(std::move(out));
}

CovMatrix apply_loss(const CovMatrix& V, Real eta) {
  return apply_loss(V, VectorR::Constant(V.modes(), eta));
}

MatrixR passive_symplectic(const MatrixC& U) {
  const Eigen::Index m = U.rows();
  MatrixR O(2 * m, 2 * m);
  O << U.real(), -U.imag(), U.imag(), U.real();
  return O;
}

bool is_unitary(const MatrixC& U, Real tol) {
  if (U.rows() != U.cols()) return false;
  return (U.adjoint() * U - MatrixC::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff() <= tol;
}

CovMatrix apply_passive(const CovMatrix& V, const MatrixC& U) {
  if (U.rows() != V.modes() || !is_unitary(U, 1e-10)) {
    throw ValidationError("interferometer matrix must be unitary with matching size");
  }
  const MatrixR O = passive_symplectic(U);
  return CovMatrix(O * V.matrix() * O.transpose());
}

CovMatrix apply_symplectic(const CovMatrix& V, const SymplecticMatrix& S) {
  return CovMatrix(S.matrix() * V.matrix() * S.matrix().transpose());
}

Real mean_photon(const CovMatrix& V) {
  return (V.matrix().trace() - static_cast<Real>(V.matrix().rows())) / 4.0;
}

WilliamsonResult williamson(const CovMatrix& V) {
  const int m = V.modes();
  const MatrixR sym = 0.5 * (V.matrix() + V.matrix().transpose());
  Eigen::SelfAdjointEigenSolver<MatrixR> spectral(sym);
  const VectorR evals = spectral.eigenvalues();
  if (evals.minCoeff() <= 0.0) {
    throw ValidationError("Williamson decomposition needs a positive definite matrix");
  }
  const MatrixR& Q = spectral.eigenvectors();
  const MatrixR root = Q * evals.cwiseSqrt().asDiagonal() * Q.transpose();

  // i V^{1/2} Omega V^{1/2} is Hermitian with eigenvalues +-nu.
  const MatrixR K = root * omega(m) * root;
  const MatrixC H = kI * K.cast<Complex>();
  Eigen::SelfAdjointEigenSolver<MatrixC> herm(H);

  // Eigen sorts ascending; the top m eigenvalues are +nu.
  VectorR nu(m);
  MatrixC vecs(2 * m, m);
  for (int j = 0; j < m; ++j) {
    nu(j) = herm.eigenvalues()(2 * m - 1 - j);
    vecs.col(j) = herm.eigenvectors().col(2 * m - 1 - j);
  }
  const std::vector<int> order = descending_order(nu);

  MatrixR R(2 * m, 2 * m);
  VectorR nu_sorted(m);
  for (int j = 0; j < m; ++j) {
    VectorC e = vecs.col(order[j]);
    fix_phase(e);
    nu_sorted(j) = nu(order[j]);
    // K u = nu w, K w = -nu u for e = u + i w.
    R.col(j) = std::sqrt(2.0) * e.imag();
    R.col(m + j) = std::sqrt(2.0) * e.real();
  }
  VectorR scale(2 * m);
  scale << nu_sorted.cwiseSqrt().cwiseInverse(), nu_sorted.cwiseSqrt().cwiseInverse();
  MatrixR S = root * R * scale.asDiagonal();
  return WilliamsonResult{SymplecticMatrix(std::move(S), 1e-6), nu_sorted};
}

bool is_pure(const CovMatrix& V, Real tol) {
  const WilliamsonResult w = williamson(V);
  return (w.nu.array() - 1.0).abs().maxCoeff() <= tol;
}

Bogoliubov to_bogoliubov(const MatrixR& S) {
  const Eigen::Index m = S.rows() / 2;
  const MatrixR xx = S.topLeftCorner(m, m);
  const MatrixR xp = S.topRightCorner(m, m);
  const MatrixR px = S.bottomLeftCorner(m, m);
  const MatrixR pp = S.bottomRightCorner(m, m);
  Bogoliubov b;
  b.alpha = 0.5 * ((xx + pp).cast<Complex>() + kI * (px - xp).cast<Complex>());
  b.beta = 0.5 * ((xx - pp).cast<Complex>() + kI * (px + xp).cast<Complex>());
  return b;
}

MatrixR from_bogoliubov(const Bogoliubov& b) {
  const Eigen::Index m = b.alpha.rows();
  MatrixR S(2 * m, 2 * m);
  S << (b.alpha + b.beta).real(), (b.beta - b.alpha).imag(), (b.alpha + b.beta).imag(),
      (b.alpha - b.beta).real();
  return S;
}

TakagiResult takagi(const MatrixC& A, Real zero_tol) {
  const Eigen::Index m = A.rows();
  // A w* = sigma w  <=>  [[Re A, Im A], [Im A, -Re A]] (x; y) = sigma (x; y).
  MatrixR T(2 * m, 2 * m);
  T << A.real(), A.imag(), A.imag(), -A.real();
  T = 0.5 * (T + T.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixR> eig(T);

  const Real cutoff = zero_tol * std::max<Real>(1.0, A.cwiseAbs().maxCoeff());
  TakagiResult out;
  out.W = MatrixC::Zero(m, m);
  out.sigma = VectorR::Zero(m);
  Eigen::Index filled = 0;
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::Index col = 2 * m - 1 - j;
    const Real value = eig.eigenvalues()(col);
    if (value <= cutoff) break;
    VectorC w = eig.eigenvectors().col(col).head(m).cast<Complex>() +
                kI * eig.eigenvectors().col(col).tail(m).cast<Complex>();
    w.normalize();
    out.W.col(filled) = w;
    out.sigma(filled) = value;
    ++filled;
  }
  // Complete the null space with Gram-Schmidt over the standard basis.
  for (Eigen::Index e = 0; e < m && filled < m; ++e) {
    VectorC v = VectorC::Unit(m, e);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index c = 0; c < filled; ++c) {
        v -= out.W.col(c) * out.W.col(c).dot(v);
      }
    }
    const Real norm = v.norm();
    if (norm > 1e-6) {
      out.W.col(filled) = v / norm;
      ++filled;
    }
  }
  return out;
}

GaussianUnitaryFactors bloch_messiah(const SymplecticMatrix& S) {
  // Polar decomposition S = O P.
  Eigen::JacobiSVD<MatrixR> svd(S.matrix(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const MatrixR O = svd.matrixU() * svd.matrixV().transpose();
  const MatrixR P =
      svd.matrixV() * svd.singularValues().asDiagonal() * svd.matrixV().transpose();

  // P is positive symplectic: P = O_W S(r) O_W^T with beta_P = W sinh(r) W^T.
  const Bogoliubov pb = to_bogoliubov(0.5 * (P + P.transpose()));
  const MatrixC beta = 0.5 * (pb.beta + pb.beta.transpose());
  const TakagiResult tk = takagi(beta);

  GaussianUnitaryFactors f;
  f.r = tk.sigma.array().asinh().matrix();
  const MatrixC U_O = to_bogoliubov(O).alpha;
  f.U2 = U_O * tk.W;
  f.U1 = tk.W.adjoint();
  return f;
}

SymplecticMatrix factors_symplectic(const GaussianUnitaryFactors& f) {
  const Eigen::Index m = f.r.size();
  VectorR diag(2 * m);
  diag << f.r.array().exp().matrix(), (-f.r.array()).exp().matrix();
  MatrixR S = passive_symplectic(f.U2) * diag.asDiagonal() * passive_symplectic(f.U1);
  return SymplecticMatrix(std::move(S), 1e-6);
}

CovMatrix reduced_covariance(const CovMatrix& V, std::span<const int> modes) {
  if (modes.empty()) throw ValidationError("reduced covariance needs at least one mode");
  const int m = V.modes();
  const auto k = static_cast<Eigen::Index>(modes.size());
  std::vector<Eigen::Index> idx;
  idx.reserve(2 * modes.size());
  for (int mode : modes) {
    if (mode < 0 || mode >= m) throw ValidationError("mode index out of range");
    idx.push_back(mode);
  }
  for (int mode : modes) idx.push_back(mode + m);
  MatrixR out(2 * k, 2 * k);
  for (Eigen::Index i = 0; i < 2 * k; ++i) {
    for (Eigen::Index j = 0; j < 2 * k; ++j) out(i, j) = V(idx[i], idx[j]);
  }
  return CovMatrix(std::move(out));
}

MatrixC haar_unitary(int modes, std::uint64_t seed) {
  RandomStream rng(seed, stage::kCircuit, 0);
  MatrixC Z(modes, modes);
  for (int j = 0; j < modes; ++j) {
    for (int i = 0; i < modes; ++i) {
      const Real re = rng.normal();
      const Real im = rng.normal();
      Z(i, j) = Complex(re, im) / std::sqrt(2.0);
    }
  }
  Eigen::HouseholderQR<MatrixC> qr(Z);
  MatrixC Q = qr.householderQ() * MatrixC::Identity(modes, modes);
  const MatrixC R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < modes; ++j) {
    const Complex d = R(j, j);
    Q.col(j) *= d / std::abs(d);
  }
  return Q;
}

MatrixC brickwork_unitary(int modes, int depth, std::uint64_t seed) {
  MatrixC U = MatrixC::Identity(modes, modes);
  std::uint64_t counter = 0;
  for (int layer = 0; layer < depth; ++layer) {
    for (int i = layer % 2; i + 1 < modes; i += 2) {
      const MatrixC block = haar_unitary(2, mix64(seed) + counter++);
      MatrixC gate = MatrixC::Identity(modes, modes);
      gate.block(i, i, 2, 2) = block;
      U = gate * U;
    }
  }
  return U;
}

MatrixC tmsv_pairing_unitary(int pairs) {
  const int m = 2 * pairs;
  MatrixC U = MatrixC::Zero(m, m);
  // e^{-i pi/4} / sqrt(2) [[1, i], [i, 1]] maps two equal squeezers onto the
  // standard TMSV with A = tanh(r) [[0, 1], [1, 0]].
  const Complex c = std::exp(Complex(0.0, -M_PI / 4.0)) / std::sqrt(2.0);
  for (int k = 0; k < pairs; ++k) {
    const int a = k;
    const int b = m - 1 - k;
    U(a, a) = c;
    U(a, b) = c * kI;
    U(b, a) = c * kI;
    U(b, b) = c;
  }
  return U;
}

MatrixC circuit_unitary(const CircuitSpec& spec, std::uint64_t seed) {
  switch (spec.ensemble) {
    case Ensemble::kExplicit:
      return spec.U;
    case Ensemble::kGlobalHaar:
      return haar_unitary(spec.modes, seed);
    case Ensemble::kBrickwork:
      return brickwork_unitary(spec.modes, spec.depth, seed);
    case Ensemble::kTmsvWorstCase:
      if (spec.modes % 2 != 0) throw ValidationError("worst-case ensemble needs an even mode count");
      return tmsv_pairing_unitary(spec.modes / 2);
  }
  throw ValidationError("unknown ensemble");
}

CovMatrix build_circuit(const CircuitSpec& spec, std::uint64_t seed) {
  if (spec.r_in.size() != spec.modes || spec.eta.size() != spec.modes) {
    throw ValidationError("circuit vectors must have one entry per mode");
  }
  const MatrixC U = circuit_unitary(spec, seed);
  return apply_loss(apply_passive(squeezed_input(spec.r_in), U), spec.eta);
}

CovMatrix tmsv_covariance(Real s) {
  const Real c = std::cosh(2.0 * s);
  const Real sh = std::sinh(2.0 * s);
  MatrixR V = MatrixR::Zero(4, 4);
  V(0, 0) = V(1, 1) = V(2, 2) = V(3, 3) = c;
  V(0, 1) = V(1, 0) = sh;
  V(2, 3) = V(3, 2) = -sh;
  return CovMatrix(std::move(V));
}

}  // namespace gbsmps
