// SPDX-License-Identifier: MIT
#include <cmath>

#include "ccmpc/exlin.hpp"
#include "ccmpc/validation.hpp"
#include "doctest.h"

using namespace ccmpc;

TEST_CASE("cubic map inversion at a hand-checked point") {
  const MonotoneMap m = cubic_map(1.0, 1.0);
  CHECK(m.invert(2.0) == doctest::Approx(1.0).epsilon(1e-12));  // x + x^3 = 2
  CHECK(m.invert(0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m.invert(-2.0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(m.invert(kInf) == kInf);
  CHECK(m.invert(-kInf) == -kInf);
}

TEST_CASE("input map with a state-dependent gain") {
  InputMap im;
  im.shape = cubic_map(1.0, 0.0);
  im.scale = [](const Vec& x) { return 1.0 + x(0) * x(0); };
  const Vec x = Vec::Constant(1, 2.0);  // gain 5
  CHECK(im.apply(1.0, x) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(im.apply(-1.0, x) == doctest::Approx(-5.0).epsilon(1e-14));
  CHECK(im.invert(5.0, x) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(im.invert(im.apply(0.37, x), x) == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("smooth gain profile stays inside its band") {
  CHECK(smooth_step(0.0) == 0.5);
  CHECK(smooth_step(1e6) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(smooth_step(-1e6) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("coordinate-change suite: round-trips, conjugacy, bound transforms") {
  const auto results = run_exlin_suite(41);
  for (const auto& r : results) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.pass);
  }
}

TEST_CASE("input bounds transform through the gain at the operating state") {
  ExlinModel m;
  m.core.A = Mat::Identity(1, 1) * 0.5;
  m.core.B = Mat::Identity(1, 1);
  m.core.bias = [](const Vec&) -> Vec { return Vec::Zero(1); };
  m.phi = {cubic_map(1.0, 0.0)};
  InputMap im;
  im.shape = cubic_map(1.0, 0.0);
  im.scale = [](const Vec& x) { return 1.0 + x(0) * x(0); };
  m.psi_in = {im};

  SpecBundle phys;
  phys.n_xi = 1;
  phys.n_v = 1;
  phys.xi_req = [](const Vec&, int) { return Vec::Zero(1); };
  phys.xi_lo = [](const Vec&, int) { return Vec::Constant(1, -kInf); };
  phys.xi_hi = [](const Vec&, int) { return Vec::Constant(1, kInf); };
  phys.v_lo = [](const Vec&, int) { return Vec::Constant(1, -1.0); };
  phys.v_hi = [](const Vec&, int) { return Vec::Constant(1, 1.0); };
  phys.soft_bound = [](const Vec&, int) { return Vec::Constant(1, kInf); };
  phys.soft_kind = {SoftKind::none};
  phys.dep_req = {false};
  phys.dep_xi_lo = {false};
  phys.dep_xi_hi = {false};
  phys.dep_v_lo = {false};
  phys.dep_v_hi = {false};
  phys.dep_soft = {false};

  const SpecBundle tr = transform_spec(m, phys, Vec::Constant(1, 2.0));
  const Vec th = Vec::Zero(1);
  CHECK(tr.v_lo(th, 0)(0) == doctest::Approx(-5.0).epsilon(1e-14));
  CHECK(tr.v_hi(th, 0)(0) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(std::isinf(tr.xi_hi(th, 1)(0)));
}

TEST_CASE("operating states recovered from the previous transformed plan") {
  ExlinModel m;
  m.core.A = Mat::Identity(2, 2) * 0.5;
  m.core.B = Mat::Identity(2, 2);
  m.core.bias = [](const Vec&) -> Vec { return Vec::Zero(2); };
  m.phi = {cubic_map(1.0, 1e-3), cubic_map(2.0, 1e-2)};
  for (int i = 0; i < 2; ++i) {
    InputMap im;
    im.shape = cubic_map(1.0, 0.0);
    im.scale = [](const Vec&) { return 1.0; };
    m.psi_in.push_back(im);
  }

  const Vec x_now = (Vec(2) << 0.7, -0.4).finished();
  Mat xi_plan(2, 3);
  xi_plan << 0.1, 0.5, -0.2, 0.3, -0.6, 0.8;
  const Mat ops = resolve_operating_states(m, x_now, xi_plan);
  REQUIRE(ops.cols() == 3);
  CHECK((ops.col(0) - x_now).cwiseAbs().maxCoeff() == 0.0);
  for (int k = 1; k < 3; ++k) {
    CHECK((m.phi_apply(ops.col(k)) - xi_plan.col(k)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}
