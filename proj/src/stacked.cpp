#include "ccmpc/stacked.hpp"

namespace ccmpc {

StackedSystem stack_dynamics(const LinearModel& model, int N) {
  model.validate();
  require(N >= 1, "stack_dynamics: horizon must be >= 1");
  const int n = model.n_xi();
  const int m = model.n_v();

  StackedSystem s;
  s.N = N;
  s.n_xi = n;
  s.n_v = m;
  s.A_hat = Mat::Zero(N * n, n);
  s.B_hat = Mat::Zero(N * n, N * m);

  Mat Apow = model.A;  // A^1
  for (int i = 0; i < N; ++i) {
    s.A_hat.middleRows(i * n, n) = Apow;
    if (i + 1 < N) Apow = model.A * Apow;
  }
  // Block column j holds (0, ..., 0, B, AB, A^2 B, ...)^T starting at row block j.
  Mat AB = model.B;  // A^0 B
  for (int d = 0; d < N; ++d) {
    for (int j = 0; d + j < N; ++j) {
      s.B_hat.block((d + j) * n, j * m, n, m) = AB;
    }
    if (d + 1 < N) AB = model.A * AB;
  }
  return s;
}

Vec stack_bias(const LinearModel& model, const ParameterTrajectory& theta) {
  model.validate();
  const int N = theta.horizon();
  require(N >= 1, "stack_bias: trajectory must cover at least one step");
  const int n = model.n_xi();

  Vec c_hat(N * n);
  Vec block = model.bias(theta.at(0));
  require(block.size() == n, "stack_bias: bias dimension mismatch");
  c_hat.head(n) = block;
  for (int k = 1; k < N; ++k) {
    block = model.A * block + model.bias(theta.at(k));
    c_hat.segment(k * n, n) = block;
  }
  return c_hat;
}

Mat simulate(const LinearModel& model, const Vec& xi0, const Mat& v_seq,
             const ParameterTrajectory& theta) {
  model.validate();
  const int N = static_cast<int>(v_seq.cols());
  require(theta.horizon() >= N, "simulate: trajectory shorter than input sequence");
  require(xi0.size() == model.n_xi(), "simulate: xi0 dimension mismatch");
  require(v_seq.rows() == model.n_v(), "simulate: input dimension mismatch");

  Mat traj(model.n_xi(), N + 1);
  traj.col(0) = xi0;
  for (int k = 0; k < N; ++k) {
    traj.col(k + 1) = model.A * traj.col(k) + model.B * v_seq.col(k) + model.bias(theta.at(k));
  }
  return traj;
}

}  // namespace ccmpc
