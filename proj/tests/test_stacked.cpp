// SPDX-License-Identifier: MIT
#include <cmath>

#include "ccmpc/constraint_eval.hpp"
#include "ccmpc/objective.hpp"
#include "ccmpc/scenario.hpp"
#include "ccmpc/stacked.hpp"
#include "ccmpc/validation.hpp"
#include "doctest.h"

using namespace ccmpc;

namespace {

LinearModel scalar_model(double a, double b, double c_const) {
  LinearModel m;
  m.A = Mat::Constant(1, 1, a);
  m.B = Mat::Constant(1, 1, b);
  m.bias = [c_const](const Vec&) { return Vec::Constant(1, c_const); };
  return m;
}

SpecBundle scalar_spec(double lo, double hi, double vlo, double vhi, SoftKind kind,
                       double soft) {
  SpecBundle s;
  s.n_xi = 1;
  s.n_v = 1;
  s.xi_req = [](const Vec&, int) { return Vec::Zero(1); };
  s.xi_lo = [lo](const Vec&, int) { return Vec::Constant(1, lo); };
  s.xi_hi = [hi](const Vec&, int) { return Vec::Constant(1, hi); };
  s.v_lo = [vlo](const Vec&, int) { return Vec::Constant(1, vlo); };
  s.v_hi = [vhi](const Vec&, int) { return Vec::Constant(1, vhi); };
  s.soft_bound = [soft](const Vec&, int) { return Vec::Constant(1, soft); };
  s.soft_kind = {kind};
  s.dep_req = {false};
  s.dep_xi_lo = {false};
  s.dep_xi_hi = {false};
  s.dep_v_lo = {false};
  s.dep_v_hi = {false};
  s.dep_soft = {false};
  return s;
}

}  // namespace

TEST_CASE("condensed operators on hand-checked scalar models") {
  const StackedSystem s1 = stack_dynamics(scalar_model(1.0, 1.0, 0.0), 2);
  CHECK(s1.A_hat(0, 0) == 1.0);
  CHECK(s1.A_hat(1, 0) == 1.0);
  CHECK(s1.B_hat(0, 0) == 1.0);
  CHECK(s1.B_hat(0, 1) == 0.0);
  CHECK(s1.B_hat(1, 0) == 1.0);
  CHECK(s1.B_hat(1, 1) == 1.0);

  const LinearModel m2 = scalar_model(2.0, 1.0, 1.0);
  const StackedSystem s2 = stack_dynamics(m2, 2);
  CHECK(s2.A_hat(0, 0) == 2.0);
  CHECK(s2.A_hat(1, 0) == 4.0);
  const Vec c_hat = stack_bias(m2, constant_trajectory(Vec::Zero(1), 2));
  CHECK(c_hat(0) == 1.0);
  CHECK(c_hat(1) == 3.0);
}

TEST_CASE("stepwise rollout on a hand-checked model") {
  const LinearModel m = scalar_model(0.5, 1.0, 0.0);
  Mat v(1, 2);
  v << 1.0, 0.0;
  const Mat X = simulate(m, Vec::Ones(1), v, constant_trajectory(Vec::Zero(1), 2));
  CHECK(X(0, 0) == 1.0);
  CHECK(X(0, 1) == 1.5);
  CHECK(X(0, 2) == 0.75);
}

TEST_CASE("condensed prediction matches stepwise simulation on random models") {
  const auto results = run_stacking_suite(17);
  for (const auto& r : results) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.pass);
  }
}

TEST_CASE("canonical rows: layout, pruning, hand-checked evaluations") {
  const LinearModel m = scalar_model(1.0, 1.0, 0.5);
  const int N = 1;

  SUBCASE("upper soft row") {
    const SpecBundle spec = scalar_spec(-2.0, 3.0, -3.0, 3.0, SoftKind::upper, 1.2);
    const ConstraintIndexMap index = build_index_map(spec, m, N, Vec::Zero(1));
    CHECK(index.n_rows() == 5);
    CHECK(static_cast<int>(index.active.size()) == 5);
    const ConstraintEvaluator eval(m, spec, stack_dynamics(m, N), index);

    const Vec X = eval.offset(constant_trajectory(Vec::Zero(1), N));
    CHECK(X(0) == doctest::Approx(-2.5).epsilon(1e-15));  // xi_lo - c_hat
    CHECK(X(1) == doctest::Approx(-2.5).epsilon(1e-15));  // c_hat - xi_hi
    CHECK(X(2) == doctest::Approx(-3.0).epsilon(1e-15));  // v_lo
    CHECK(X(3) == doctest::Approx(-3.0).epsilon(1e-15));  // -v_hi
    CHECK(X(4) == doctest::Approx(-0.7).epsilon(1e-15));  // c_hat - soft

    const Vec y = eval.lhs(Vec::Constant(1, 2.0), Vec::Constant(1, 3.0), Vec::Ones(1));
    CHECK(y(0) == doctest::Approx(5.0));
    CHECK(y(1) == doctest::Approx(-5.0));
    CHECK(y(2) == doctest::Approx(3.0));
    CHECK(y(3) == doctest::Approx(-3.0));
    CHECK(y(4) == doctest::Approx(-4.0));  // gamma - p
  }

  SUBCASE("lower soft row flips both sides") {
    const SpecBundle spec = scalar_spec(-2.0, 3.0, -3.0, 3.0, SoftKind::lower, 0.8);
    const ConstraintIndexMap index = build_index_map(spec, m, N, Vec::Zero(1));
    CHECK(index.rows[4].soft_sign == -1);
    const ConstraintEvaluator eval(m, spec, stack_dynamics(m, N), index);
    const Vec X = eval.offset(constant_trajectory(Vec::Zero(1), N));
    CHECK(X(4) == doctest::Approx(0.3).epsilon(1e-15));  // soft - c_hat
    const Vec y = eval.lhs(Vec::Constant(1, 2.0), Vec::Constant(1, 3.0), Vec::Ones(1));
    CHECK(y(4) == doctest::Approx(6.0));  // gamma + p
  }

  SUBCASE("infinite bounds prune and evaluate to -inf") {
    const SpecBundle spec = scalar_spec(-kInf, 3.0, -3.0, kInf, SoftKind::none, 0.0);
    const ConstraintIndexMap index = build_index_map(spec, m, N, Vec::Zero(1));
    CHECK(index.n_rows() == 5);
    CHECK(static_cast<int>(index.active.size()) == 2);
    CHECK(index.rows[0].pruned);   // state_lo
    CHECK(index.rows[3].pruned);   // input_hi
    CHECK(index.rows[4].pruned);   // soft (kind none)
    const ConstraintEvaluator eval(m, spec, stack_dynamics(m, N), index);
    const Vec X = eval.offset(constant_trajectory(Vec::Zero(1), N));
    CHECK(X(0) == -kInf);
    CHECK(X(3) == -kInf);
    CHECK(X(4) == -kInf);
  }
}

TEST_CASE("canonical row count is five blocks for any sizes") {
  for (int n_xi : {1, 3})
    for (int n_v : {1, 2})
      for (int N : {1, 4}) {
        LinearModel m;
        m.A = Mat::Identity(n_xi, n_xi) * 0.5;
        m.B = Mat::Ones(n_xi, n_v);
        m.bias = [n_xi](const Vec&) { return Vec::Zero(n_xi); };
        SpecBundle s;
        s.n_xi = n_xi;
        s.n_v = n_v;
        s.xi_req = [n_xi](const Vec&, int) { return Vec::Zero(n_xi); };
        s.xi_lo = [n_xi](const Vec&, int) { return Vec::Constant(n_xi, -5.0); };
        s.xi_hi = [n_xi](const Vec&, int) { return Vec::Constant(n_xi, 5.0); };
        s.v_lo = [n_v](const Vec&, int) { return Vec::Constant(n_v, -5.0); };
        s.v_hi = [n_v](const Vec&, int) { return Vec::Constant(n_v, 5.0); };
        s.soft_bound = [n_xi](const Vec&, int) { return Vec::Constant(n_xi, 4.0); };
        s.soft_kind.assign(n_xi, SoftKind::upper);
        s.dep_req.assign(n_xi, false);
        s.dep_xi_lo.assign(n_xi, false);
        s.dep_xi_hi.assign(n_xi, false);
        s.dep_v_lo.assign(n_v, false);
        s.dep_v_hi.assign(n_v, false);
        s.dep_soft.assign(n_xi, false);
        const ConstraintIndexMap index = build_index_map(s, m, N, Vec::Zero(1));
        CHECK(index.n_rows() == 2 * N * n_xi + 2 * N * n_v + N * n_xi);
        CHECK(static_cast<int>(index.active.size()) == index.n_rows());
        for (int id : index.active) {
          if (index.rows[id].block == Block::soft) CHECK(index.gamma_pos(id) >= 0);
        }
      }
}

TEST_CASE("tracking objective: positive definite, matches direct cost differences") {
  const LinearModel m = scalar_model(0.7, 0.9, 0.2);
  const int N = 3;
  const SpecBundle spec = scalar_spec(-10.0, 10.0, -10.0, 10.0, SoftKind::none, 0.0);
  const ConstraintIndexMap index = build_index_map(spec, m, N, Vec::Zero(1));
  const StackedSystem sys = stack_dynamics(m, N);
  const ConstraintEvaluator eval(m, spec, sys, index);

  Weights w;
  w.w_req = Vec::Constant(1, 2.5);
  w.w_v = Vec::Constant(1, 0.3);
  w.w_soft = Vec::Constant(1, 1.0);

  ScenarioSet scen;
  scen.resize(4, N, 1);
  for (int s = 0; s < 4; ++s)
    for (int k = 0; k <= N; ++k) scen.set(s, k, Vec::Constant(1, 0.25 * s - 0.3 * k));

  Vec mean_term = Vec::Zero(N);
  for (int s = 0; s < 4; ++s) mean_term += eval.objective_term(scen.traj(s));
  mean_term /= 4.0;

  const Vec xi0 = Vec::Constant(1, 0.4);
  const QuadObjective q = build_objective(sys, index, w, xi0, mean_term);
  REQUIRE(q.H.rows() == N);
  CHECK(Eigen::LLT<Mat>(q.H).info() == Eigen::Success);

  // Direct scenario-averaged cost; constant terms cancel in differences.
  auto direct = [&](const Vec& v_hat) {
    double J = 0;
    Mat v_seq = Eigen::Map<const Mat>(v_hat.data(), 1, N);
    for (int s = 0; s < 4; ++s) {
      const ParameterTrajectory traj = scen.traj(s);
      const Mat X = simulate(m, xi0, v_seq, traj);
      for (int k = 1; k <= N; ++k) {
        const double e = X(0, k) - spec.xi_req(traj.at(k), k)(0);
        J += w.w_req(0) * e * e;
      }
      for (int k = 0; k < N; ++k) J += w.w_v(0) * v_seq(0, k) * v_seq(0, k);
    }
    return J / 4.0;
  };
  auto quad = [&](const Vec& v) { return 0.5 * v.dot(q.H * v) + q.g.dot(v); };

  const Vec v1 = (Vec(3) << 0.3, -0.8, 1.1).finished();
  const Vec v2 = (Vec(3) << -0.5, 0.2, 0.9).finished();
  CHECK(quad(v1) - quad(v2) == doctest::Approx(direct(v1) - direct(v2)).epsilon(1e-10));
}

TEST_CASE("objective without tracking weight reduces to the input penalty") {
  const LinearModel m = scalar_model(0.7, 0.9, 0.2);
  const int N = 3;
  const SpecBundle spec = scalar_spec(-10.0, 10.0, -10.0, 10.0, SoftKind::none, 0.0);
  const ConstraintIndexMap index = build_index_map(spec, m, N, Vec::Zero(1));
  Weights w;
  w.w_req = Vec::Zero(1);
  w.w_v = Vec::Constant(1, 0.3);
  w.w_soft = Vec::Constant(1, 1.0);
  const QuadObjective q =
      build_objective(stack_dynamics(m, N), index, w, Vec::Zero(1), Vec::Zero(N));
  CHECK((q.H - 0.6 * Mat::Identity(N, N)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(q.g.cwiseAbs().maxCoeff() == 0.0);
}
