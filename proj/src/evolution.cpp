// Copyright 2026 The dissip Authors
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

#include "dissip/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "dissip/errors.hpp"
#include "dissip/format.hpp"

namespace dissip {
namespace {

void check_dim(const LindbladianRep& rep, const DenseOperator& x, const char* what) {
  if (x.rows() != rep.dim() || x.cols() != rep.dim()) {
    throw DimensionError(std::string(what) + ": operand is " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + ", generator acts on dimension " + std::to_string(rep.dim()));
  }
}

int resolve_steps(const LindbladianRep& rep, const EvolutionConfig& cfg) {
  const int suggested = suggested_steps(rep, cfg.t_final, cfg.step_guard);
  if (cfg.steps <= 0) return suggested;
  const double ratio = generator_norm_bound(rep) * cfg.t_final / cfg.steps;
  if (ratio > cfg.step_guard) {
    throw RefinementError("RK4 step guard violated: ||L|| dt = " + std::to_string(ratio) + " > " +
                              std::to_string(cfg.step_guard),
                          suggested);
  }
  return cfg.steps;
}

template <typename Apply>
DenseOperator rk4_step(const Apply& apply, const DenseOperator& x, double dt) {
  const DenseOperator k1 = apply(x);
  const DenseOperator k2 = apply(x + 0.5 * dt * k1);
  const DenseOperator k3 = apply(x + 0.5 * dt * k2);
  const DenseOperator k4 = apply(x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double real_trace_product(const DenseOperator& a, const DenseOperator& b) {
  // Tr(AB) = sum_ij A_ij B_ji
  return (a.array() * b.transpose().array()).sum().real();
}

}  // namespace

void validate_density_matrix(const DensityMatrix& state, const StateTolerances& tol) {
  const auto& r = state.rho;
  if (r.rows() != r.cols() || r.rows() == 0) throw DimensionError("density matrix must be square and nonempty");
  if (!r.allFinite()) throw NumericalError("density matrix has non-finite entries");
  const double herm = (r - r.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol.hermiticity) {
    throw NumericalError("density matrix not Hermitian: max |rho - rho^dag| = " + std::to_string(herm));
  }
  const double trace_err = std::abs(r.trace() - Complex(1.0, 0.0));
  if (trace_err > tol.trace) throw NumericalError("density matrix trace error " + std::to_string(trace_err));
  const double lo = min_eigenvalue(r);
  if (lo < tol.min_eigenvalue) throw NumericalError("density matrix min eigenvalue " + std::to_string(lo));
}

double min_eigenvalue(const DenseOperator& op) {
  const DenseOperator herm = 0.5 * (op + op.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseOperator> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double spectral_norm(const DenseOperator& op) {
  if (op.size() == 0) return 0.0;
  const double scale = std::max(1.0, op.cwiseAbs().maxCoeff());
  if (op.rows() == op.cols() && (op - op.adjoint()).cwiseAbs().maxCoeff() <= 1e-13 * scale) {
    const DenseOperator herm = 0.5 * (op + op.adjoint());
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<DenseOperator> svd(op);
  return svd.singularValues()(0);
}

int suggested_steps(const LindbladianRep& rep, double t, double guard) {
  if (t <= 0.0) return 1;
  if (!(guard > 0.0)) throw ValidationError("step guard must be positive");
  return std::max(1, static_cast<int>(std::ceil(generator_norm_bound(rep) * t / guard)));
}

DensityMatrix maximally_mixed(int qubits) {
  check_dense_capacity(qubits, "maximally_mixed");
  const Eigen::Index dim = Eigen::Index{1} << qubits;
  return {DenseOperator::Identity(dim, dim) / static_cast<double>(dim), "maximally_mixed(" + std::to_string(qubits) + ")"};
}

DensityMatrix evolve(const LindbladianRep& rep, const DensityMatrix& rho0, const EvolutionConfig& cfg,
                     const TrajectoryObserver& observer) {
  check_dim(rep, rho0.rho, "evolve");
  if (!(cfg.t_final >= 0.0) || !std::isfinite(cfg.t_final)) throw ValidationError("t must be finite and >= 0");
  const std::string tag = std::string(cfg.method == Method::Rk4 ? "rk4" : "expm") + "(t=" + std::to_string(cfg.t_final) + ")";

  auto row = [&](int step, double time, const DenseOperator& r) {
    if (!observer) return;
    observer(TrajectoryRow{step, time, real_trace_product(r, rep.h_dense), std::abs(r.trace() - Complex(1.0, 0.0)),
                           min_eigenvalue(r)});
  };

  DensityMatrix out{rho0.rho, rho0.provenance + " -> " + tag};
  if (cfg.t_final == 0.0) {
    row(0, 0.0, out.rho);
    return out;
  }

  if (cfg.method == Method::Expm) {
    row(0, 0.0, out.rho);
    out.rho = apply_superoperator(exp_generator(rep, cfg.t_final, Picture::Schrodinger), rho0.rho);
    row(1, cfg.t_final, out.rho);
  } else {
    const int steps = resolve_steps(rep, cfg);
    const double dt = cfg.t_final / steps;
    const int every = cfg.positivity_checkpoints > 0 ? std::max(1, steps / cfg.positivity_checkpoints) : steps + 1;
    auto apply = [&rep](const DenseOperator& x) { return apply_generator(rep, x); };
    row(0, 0.0, out.rho);
    for (int s = 1; s <= steps; ++s) {
      out.rho = rk4_step(apply, out.rho, dt);
      if (!out.rho.allFinite()) throw NumericalError("non-finite state at RK4 step " + std::to_string(s));
      row(s, s * dt, out.rho);
      if (s % every == 0 || s == steps) {
        const double lo = min_eigenvalue(out.rho);
        if (lo < cfg.positivity_abort) {
          throw RefinementError("positivity drift: min eigenvalue " + std::to_string(lo) + " at step " +
                                    std::to_string(s),
                                2 * steps);
        }
      }
    }
  }
  StateTolerances tol;
  tol.min_eigenvalue = cfg.positivity_abort;
  validate_density_matrix(out, tol);
  return out;
}

DenseOperator heisenberg_evolve(const LindbladianRep& rep, const DenseOperator& op, const EvolutionConfig& cfg) {
  check_dim(rep, op, "heisenberg_evolve");
  if (!(cfg.t_final >= 0.0) || !std::isfinite(cfg.t_final)) throw ValidationError("t must be finite and >= 0");
  if (cfg.t_final == 0.0) return op;
  if (cfg.method == Method::Expm) {
    return apply_superoperator(exp_generator(rep, cfg.t_final, Picture::Heisenberg), op);
  }
  const int steps = resolve_steps(rep, cfg);
  const double dt = cfg.t_final / steps;
  auto apply = [&rep](const DenseOperator& x) { return apply_generator_adjoint(rep, x); };
  DenseOperator x = op;
  for (int s = 1; s <= steps; ++s) {
    x = rk4_step(apply, x, dt);
    if (!x.allFinite()) throw NumericalError("non-finite operator at RK4 step " + std::to_string(s));
  }
  return x;
}

DenseOperator exp_generator(const LindbladianRep& rep, double t, Picture picture) {
  const DenseOperator gen = vectorized_generator(rep, picture) * Complex(t, 0.0);
  return gen.exp();
}

DenseOperator apply_superoperator(const DenseOperator& superop, const DenseOperator& op) {
  const Eigen::Index n = op.rows();
  if (op.cols() != n || superop.rows() != n * n || superop.cols() != n * n) {
    throw DimensionError("apply_superoperator: superoperator " + std::to_string(superop.rows()) +
                         " does not match operator dimension " + std::to_string(n));
  }
  const Eigen::Map<const Eigen::VectorXcd> v(op.data(), n * n);
  Eigen::VectorXcd r = superop * v;
  return Eigen::Map<DenseOperator>(r.data(), n, n);
}

DenseOperator choi_matrix(const LindbladianRep& rep, double t) {
  const Eigen::Index n = rep.dim();
  const DenseOperator s = exp_generator(rep, t, Picture::Schrodinger);
  DenseOperator choi(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      // Phi(|i><j|) is column i + j*n of s, reshaped column-major.
      const auto col = s.col(i + j * n);
      for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) choi(i * n + r, j * n + c) = col(r + c * n);
      }
    }
  }
  return choi;
}

DenseOperator choi_output_trace(const DenseOperator& choi, Eigen::Index dim) {
  if (choi.rows() != dim * dim || choi.cols() != dim * dim) throw DimensionError("choi_output_trace: size mismatch");
  DenseOperator out = DenseOperator::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      for (Eigen::Index r = 0; r < dim; ++r) out(i, j) += choi(i * dim + r, j * dim + r);
    }
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows) {
  out << "step,time,energy,trace_error,min_eig\n";
  for (const auto& r : rows) {
    out << r.step << ',' << format_double(r.time) << ',' << format_double(r.energy) << ','
        << format_double(r.trace_error) << ',' << format_double(r.min_eig) << '\n';
  }
}

}  // namespace dissip
