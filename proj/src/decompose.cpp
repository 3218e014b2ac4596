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

#include "gbsmps/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace gbsmps {

namespace {

const Complex kI(0.0, 1.0);

// Williamson eigenvalues this close to one are treated as already pure and
// excluded from the optimization.
constexpr Real kPinTol = 1e-9;

Real min_eig_symmetric(const MatrixR& A) {
  Eigen::SelfAdjointEigenSolver<MatrixR> eig(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

Real min_eig_uncertainty(const MatrixR& V) {
  const int m = static_cast<int>(V.rows() / 2);
  const MatrixC H = (0.5 * (V + V.transpose())).cast<Complex>() + kI * omega(m).cast<Complex>();
  Eigen::SelfAdjointEigenSolver<MatrixC> eig(H, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

// log det of a Hermitian positive definite matrix, or nullopt if not PD.
template <typename M>
std::optional<Real> log_det_pd(const M& A) {
  Eigen::LLT<M> llt(A);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Real acc = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const Real d = std::real(llt.matrixL()(i, i));
    if (!(d > 0.0)) return std::nullopt;
    acc += 2.0 * std::log(d);
  }
  return acc;
}

// Orthonormal basis of real symmetric n x n matrices: E_aa and
// (e_a e_b^T + e_b e_a^T) / sqrt(2).
struct SymBasis {
  explicit SymBasis(int n) : n(n) {
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) pairs.emplace_back(a, b);
    }
  }
  int size() const { return static_cast<int>(pairs.size()); }

  VectorR coordinates(const MatrixR& G) const {
    VectorR g(size());
    for (int k = 0; k < size(); ++k) {
      const auto [a, b] = pairs[k];
      g(k) = a == b ? G(a, a) : std::sqrt(2.0) * G(a, b);
    }
    return g;
  }

  MatrixR matrix(const VectorR& v) const {
    MatrixR X = MatrixR::Zero(n, n);
    for (int k = 0; k < size(); ++k) {
      const auto [a, b] = pairs[k];
      if (a == b) {
        X(a, a) = v(k);
      } else {
        X(a, b) = X(b, a) = v(k) / std::sqrt(2.0);
      }
    }
    return X;
  }

  int n;
  std::vector<std::pair<int, int>> pairs;
};

// Barrier objective t tr(C X) - log det(D - X) - log det(X + i Omega).
class BarrierProblem {
 public:
  BarrierProblem(MatrixR D, MatrixR C)
      : D_(std::move(D)), C_(std::move(C)), basis_(static_cast<int>(D_.rows())) {
    om_ = omega(static_cast<int>(D_.rows() / 2)).cast<Complex>() * kI;
  }

  std::optional<Real> value(const MatrixR& X, Real t) const {
    const auto ly = log_det_pd<MatrixR>(D_ - X);
    if (!ly) return std::nullopt;
    const MatrixC H = X.cast<Complex>() + om_;
    const auto lh = log_det_pd<MatrixC>(H);
    if (!lh) return std::nullopt;
    return t * (C_.cwiseProduct(X)).sum() - *ly - *lh;
  }

  // Newton step in matrix form and the squared Newton decrement.
  std::pair<MatrixR, Real> newton_step(const MatrixR& X, Real t) const {
    const int n = static_cast<int>(X.rows());
    const MatrixR A = (D_ - X).llt().solve(MatrixR::Identity(n, n));
    const MatrixC H = X.cast<Complex>() + om_;
    const MatrixC B = H.llt().solve(MatrixC::Identity(n, n));
    const MatrixR G = t * C_ + A - B.real();
    const VectorR g = basis_.coordinates(0.5 * (G + G.transpose()));

    const int p = basis_.size();
    MatrixR hess(p, p);
    auto term = [&](int a, int b, int c, int d) {
      return A(b, c) * A(d, a) + (B(b, c) * B(d, a)).real();
    };
    const Real w = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < p; ++k) {
      const auto [a, b] = basis_.pairs[k];
      for (int l = k; l < p; ++l) {
        const auto [c, d] = basis_.pairs[l];
        Real h;
        if (a == b && c == d) {
          h = term(a, a, c, c);
        } else if (a == b) {
          h = w * (term(a, a, c, d) + term(a, a, d, c));
        } else if (c == d) {
          h = w * (term(a, b, c, c) + term(b, a, c, c));
        } else {
          h = 0.5 * (term(a, b, c, d) + term(a, b, d, c) + term(b, a, c, d) + term(b, a, d, c));
        }
        hess(k, l) = h;
        hess(l, k) = h;
      }
    }
    // Jacobi scaling keeps the factorization stable as the barrier sharpens.
    const VectorR scale = hess.diagonal().cwiseAbs().cwiseSqrt().cwiseMax(1e-300).cwiseInverse();
    const MatrixR scaled = scale.asDiagonal() * hess * scale.asDiagonal();
    Eigen::LDLT<MatrixR> ldlt(scaled);
    const VectorR v = scale.asDiagonal() * ldlt.solve(-(scale.asDiagonal() * g));
    const Real decrement = -g.dot(v);
    return {basis_.matrix(v), decrement};
  }

  const MatrixR& C() const { return C_; }

 private:
  MatrixR D_;
  MatrixR C_;
  MatrixC om_;
  SymBasis basis_;
};

// Purifies X = S_x D_x S_x^T to S_x S_x^T, which is dominated by X.
MatrixR purify(const MatrixR& X, Real* deviation) {
  const WilliamsonResult w = williamson(CovMatrix(0.5 * (X + X.transpose())));
  *deviation = (w.nu.array() - 1.0).abs().maxCoeff();
  return w.S.matrix() * w.S.matrix().transpose();
}

void fill_residuals(const CovMatrix& V, Decomposition& d) {
  d.stats.reconstruction_residual = (V.matrix() - d.Vp.matrix() - d.W).cwiseAbs().maxCoeff();
  d.stats.min_eig_w = min_eig_symmetric(d.W);
  d.stats.min_eig_vp = min_eig_uncertainty(d.Vp.matrix());
  d.objective = d.Vp.matrix().trace();
}

}  // namespace

SingleModeSplit decompose_single_mode(Real r, Real eta) {
  if (!(r >= 0.0)) throw ValidationError("squeezing must be nonnegative");
  if (!(eta >= 0.0 && eta <= 1.0)) throw ValidationError("transmission must lie in [0, 1]");
  SingleModeSplit out;
  out.r = r;
  out.eta = eta;
  const Real squeezed = eta * std::exp(-2.0 * r) + 1.0 - eta;
  out.s = -0.5 * std::log(squeezed);
  // Nonnegative in exact arithmetic; clamp the rounding residue at large r.
  out.w_xx = std::max(0.0, eta * std::exp(2.0 * r) + 1.0 - eta - 1.0 / squeezed);
  return out;
}

Real infinite_squeezing_limit(Real eta) {
  if (!(eta >= 0.0 && eta < 1.0)) throw ValidationError("limit defined for eta in [0, 1)");
  return -0.5 * std::log1p(-eta);
}

Decomposition decompose_sdp(const CovMatrix& V, const DecomposeOptions& options) {
  require_physical(V);
  const int m = V.modes();
  const WilliamsonResult frame = williamson(V);
  const MatrixR& S = frame.S.matrix();

  std::vector<int> active;
  for (int j = 0; j < m; ++j) {
    if (frame.nu(j) > 1.0 + kPinTol) active.push_back(j);
  }

  Decomposition out;
  MatrixR framed_vp = MatrixR::Identity(2 * m, 2 * m);
  if (!active.empty()) {
    const int n = static_cast<int>(active.size());
    std::vector<int> idx;
    for (int j : active) idx.push_back(j);
    for (int j : active) idx.push_back(m + j);

    const MatrixR full_c = S.transpose() * S;
    MatrixR C(2 * n, 2 * n);
    MatrixR D = MatrixR::Zero(2 * n, 2 * n);
    for (int a = 0; a < 2 * n; ++a) {
      D(a, a) = frame.nu(active[a % n]);
      for (int b = 0; b < 2 * n; ++b) C(a, b) = full_c(idx[a], idx[b]);
    }
    const BarrierProblem problem(D, C);

    // Strictly feasible warm start halfway between the Williamson split and V.
    MatrixR X = MatrixR::Identity(2 * n, 2 * n) + 0.5 * (D - MatrixR::Identity(2 * n, 2 * n));
    const Real barrier_dim = 4.0 * n;
    Real t = barrier_dim / std::max<Real>(1.0, std::abs(C.cwiseProduct(X).sum()));
    MatrixR best_pure;
    while (true) {
      ++out.stats.outer_iterations;
      for (int it = 0; it < options.max_newton_per_stage; ++it) {
        auto [step, decrement] = problem.newton_step(X, t);
        ++out.stats.newton_iterations;
        if (!(decrement >= 0.0) || !std::isfinite(decrement)) break;
        if (decrement / 2.0 < 1e-12) break;
        const Real f0 = *problem.value(X, t);
        Real alpha = 1.0;
        bool moved = false;
        while (alpha > 1e-14) {
          const MatrixR trial = X + alpha * step;
          const auto f1 = problem.value(trial, t);
          if (f1 && *f1 <= f0 - 0.25 * alpha * decrement) {
            X = 0.5 * (trial + trial.transpose());
            moved = true;
            break;
          }
          alpha *= 0.5;
        }
        if (!moved) break;
      }
      const Real objective = C.cwiseProduct(X).sum();
      out.stats.barrier_parameter = t;
      out.stats.duality_gap_bound = barrier_dim / t;
      const bool gap_ok = barrier_dim / t <= options.final_gap * std::max<Real>(1.0, objective);
      if (gap_ok || t >= options.max_barrier) {
        Real deviation = 0.0;
        best_pure = purify(X, &deviation);
        out.stats.purity_deviation = deviation;
        if (deviation <= options.purity_tol || t >= options.max_barrier) {
          out.stats.converged = deviation <= options.purity_tol;
          break;
        }
      }
      t *= options.barrier_growth;
    }
    for (int a = 0; a < 2 * n; ++a) {
      for (int b = 0; b < 2 * n; ++b) framed_vp(idx[a], idx[b]) = best_pure(a, b);
    }
  } else {
    out.stats.converged = true;
  }

  MatrixR Vp = S * framed_vp * S.transpose();
  Vp = 0.5 * (Vp + Vp.transpose());
  out.W = V.matrix() - Vp;
  out.W = 0.5 * (out.W + out.W.transpose());
  out.Vp = CovMatrix(std::move(Vp));
  fill_residuals(V, out);
  if (!out.stats.converged) {
    std::ostringstream msg;
    msg << "decomposition did not converge: purity deviation " << out.stats.purity_deviation
        << ", barrier " << out.stats.barrier_parameter;
    throw NonconvergenceError(msg.str());
  }
  return out;
}

Decomposition williamson_split(const CovMatrix& V) {
  require_physical(V);
  const WilliamsonResult w = williamson(V);
  Decomposition out;
  MatrixR Vp = w.S.matrix() * w.S.matrix().transpose();
  out.W = V.matrix() - Vp;
  out.W = 0.5 * (out.W + out.W.transpose());
  out.Vp = CovMatrix(0.5 * (Vp + Vp.transpose()));
  out.stats.converged = true;
  fill_residuals(V, out);
  return out;
}

SingleModeWilliamsonSplit williamson_split_single_mode(Real r, Real eta) {
  const Real a = eta * std::exp(2.0 * r) + 1.0 - eta;
  const Real b = eta * std::exp(-2.0 * r) + 1.0 - eta;
  return SingleModeWilliamsonSplit{0.25 * std::log(a / b), 0.5 * (std::sqrt(a * b) - 1.0)};
}

Real actual_squeezed_photons(const CovMatrix& Vp) { return mean_photon(Vp); }

std::string stats_json(const Decomposition& d) {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "{\"objective\": " << d.objective << ", \"photons\": " << actual_squeezed_photons(d.Vp)
      << ", \"reconstruction_residual\": " << d.stats.reconstruction_residual
      << ", \"min_eig_w\": " << d.stats.min_eig_w << ", \"min_eig_vp\": " << d.stats.min_eig_vp
      << ", \"purity_deviation\": " << d.stats.purity_deviation
      << ", \"outer_iterations\": " << d.stats.outer_iterations
      << ", \"newton_iterations\": " << d.stats.newton_iterations
      << ", \"converged\": " << (d.stats.converged ? "true" : "false") << "}";
  return out.str();
}

}  // namespace gbsmps
