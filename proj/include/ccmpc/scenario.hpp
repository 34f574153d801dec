#pragma once

#include <cstdint>
#include <string>

#include "ccmpc/linear_model.hpp"

namespace ccmpc {

/// S sampled parameter trajectories theta_0..theta_N.
/// Sample-major storage: row s, column k*n_theta + d.
struct ScenarioSet {
  int n_theta = 1;
  int N = 0;
  int S = 0;
  Mat data;  ///< S x ((N+1) * n_theta)

  void resize(int S_, int N_, int n_theta_ = 1) {
    S = S_;
    N = N_;
    n_theta = n_theta_;
    data.resize(S, (N + 1) * n_theta);
  }
  Vec at(int s, int k) const { return data.row(s).segment(k * n_theta, n_theta).transpose(); }
  void set(int s, int k, const Vec& th) { data.row(s).segment(k * n_theta, n_theta) = th.transpose(); }
  ParameterTrajectory traj(int s) const {
    ParameterTrajectory t;
    t.values.resize(n_theta, N + 1);
    for (int k = 0; k <= N; ++k) t.values.col(k) = at(s, k);
    return t;
  }
  /// Column-wise sample mean as one trajectory.
  ParameterTrajectory mean_traj() const {
    ParameterTrajectory t;
    t.values.resize(n_theta, N + 1);
    const Vec m = data.colwise().mean().transpose();
    for (int k = 0; k <= N; ++k) t.values.col(k) = m.segment(k * n_theta, n_theta);
    return t;
  }
};

/// One row per sample, columns theta_0..theta_N (channel-expanded for n_theta > 1).
void write_scenarios_csv(const ScenarioSet& s, const std::string& path);
ScenarioSet read_scenarios_csv(const std::string& path, int n_theta = 1);

/// splitmix64 stream mixing for partitioned, order-independent seeding.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace ccmpc
