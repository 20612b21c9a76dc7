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

#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "dissip/lindblad.hpp"
#include "dissip/op_algebra.hpp"

namespace dissip {

struct DensityMatrix {
  DenseOperator rho;
  std::string provenance;

  Eigen::Index dim() const { return rho.rows(); }
};

/// Tolerances a state must meet to count as a density matrix.
struct StateTolerances {
  double hermiticity = 1e-10;
  double trace = 1e-10;
  double min_eigenvalue = -1e-8;
};

/// Throws NumericalError naming the violated invariant.
void validate_density_matrix(const DensityMatrix& state, const StateTolerances& tol = {});

/// Smallest eigenvalue of the Hermitian part.
double min_eigenvalue(const DenseOperator& op);

/// Largest singular value.
double spectral_norm(const DenseOperator& op);

enum class Method { Rk4, Expm };

struct EvolutionConfig {
  double t_final = 0.0;
  int steps = 0;  // 0: choose the smallest count meeting step_guard
  Method method = Method::Rk4;
  /// Required generator_norm_bound * t / steps.
  double step_guard = 0.1;
  /// Number of evenly spaced RK4 positivity checks (the final state is always checked).
  int positivity_checkpoints = 4;
  /// Minimum eigenvalue below which a trajectory aborts.
  double positivity_abort = -1e-6;
};

struct TrajectoryRow {
  int step = 0;
  double time = 0.0;
  double energy = 0.0;
  double trace_error = 0.0;
  double min_eig = 0.0;
};

using TrajectoryObserver = std::function<void(const TrajectoryRow&)>;

/// Smallest RK4 step count with generator_norm_bound * t / steps <= guard.
int suggested_steps(const LindbladianRep& rep, double t, double guard = 0.1);

DensityMatrix maximally_mixed(int qubits);

/// rho(t) = e^{L t}(rho0). The observer, if set, receives one row per RK4 step
/// (step 0 included); for expm it receives the endpoints only.
DensityMatrix evolve(const LindbladianRep& rep, const DensityMatrix& rho0, const EvolutionConfig& cfg,
                     const TrajectoryObserver& observer = {});

/// O(t) = e^{L^dag t}(O).
DenseOperator heisenberg_evolve(const LindbladianRep& rep, const DenseOperator& op, const EvolutionConfig& cfg);

/// e^{L t} (or e^{L^dag t}) as an N^2 x N^2 matrix on column-stacked vec. N <= 64.
DenseOperator exp_generator(const LindbladianRep& rep, double t, Picture picture);

/// Applies an N^2 x N^2 superoperator to an N x N operator.
DenseOperator apply_superoperator(const DenseOperator& superop, const DenseOperator& op);

/// Unnormalized Choi matrix sum_ij |i><j| (x) Phi_t(|i><j|), row index i*N + r. N <= 64.
DenseOperator choi_matrix(const LindbladianRep& rep, double t);

/// Tr_out of a Choi matrix; the identity for a trace-preserving map.
DenseOperator choi_output_trace(const DenseOperator& choi, Eigen::Index dim);

/// Columns: step,time,energy,trace_error,min_eig.
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows);

}  // namespace dissip
