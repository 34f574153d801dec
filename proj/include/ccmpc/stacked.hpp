#pragma once

#include "ccmpc/linear_model.hpp"

namespace ccmpc {

/// Condensed horizon form xi_hat = A_hat xi_0 + B_hat v_hat + c_hat(theta_hat),
/// with xi_hat = (xi_1, ..., xi_N) and v_hat = (v_0, ..., v_{N-1}).
struct StackedSystem {
  Mat A_hat;  ///< (N n_xi) x n_xi, row block i = A^{i+1}
  Mat B_hat;  ///< (N n_xi) x (N n_v), block (i,j) = A^{i-j} B for i >= j
  int N = 0;
  int n_xi = 0;
  int n_v = 0;
};

StackedSystem stack_dynamics(const LinearModel& model, int N);

/// Stacked bias c_hat(theta_hat): row block k equals sum_{i=0}^{k} A^{k-i} c(theta_i).
/// Uses theta_0..theta_{N-1}; theta_N does not enter the dynamics.
Vec stack_bias(const LinearModel& model, const ParameterTrajectory& theta);

/// Stepwise rollout, returns n_xi x (N+1) trajectory including xi_0.
/// Independent of the condensed form; serves as its oracle.
Mat simulate(const LinearModel& model, const Vec& xi0, const Mat& v_seq,
             const ParameterTrajectory& theta);

}  // namespace ccmpc
