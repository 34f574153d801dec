#pragma once

#include <functional>

#include "ccmpc/types.hpp"

namespace ccmpc {

/// Discrete-time affine model xi_{k+1} = A xi_k + B v_k + c(theta_k).
struct LinearModel {
  Mat A;  ///< n_xi x n_xi
  Mat B;  ///< n_xi x n_v
  std::function<Vec(const Vec& theta)> bias;  ///< c(theta), length n_xi
  bool bias_theta_dependent = false;

  int n_xi() const { return static_cast<int>(A.rows()); }
  int n_v() const { return static_cast<int>(B.cols()); }

  void validate() const {
    require(A.rows() == A.cols(), "LinearModel: A must be square");
    require(B.rows() == A.rows(), "LinearModel: B row count must match A");
    require(static_cast<bool>(bias), "LinearModel: bias function not set");
  }
};

/// One parameter trajectory theta_0..theta_N (columns), n_theta rows.
struct ParameterTrajectory {
  Mat values;  ///< n_theta x (N+1)

  int n_theta() const { return static_cast<int>(values.rows()); }
  int horizon() const { return static_cast<int>(values.cols()) - 1; }
  Vec at(int k) const { return values.col(k); }
};

inline ParameterTrajectory constant_trajectory(const Vec& theta, int N) {
  ParameterTrajectory t;
  t.values = theta.replicate(1, N + 1);
  return t;
}

}  // namespace ccmpc
