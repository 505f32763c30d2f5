#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "ftpit/errors.hpp"
#include "ftpit/problems.hpp"
#include "test_util.hpp"

using namespace ftpit;
using namespace ftpit::testing;
using std::numbers::pi;

TEST_SUITE("problems") {

TEST_CASE("heat forcing matches the manufactured solution") {
  // u = sin(pi x) cos t gives f = u_t - nu u_xx = sin(pi x)(nu pi^2 cos t - sin t)
  const double nu = 0.5;
  HeatProblem heat(nu, 63);
  const Vector x = heat.grid().points();
  for (const double t : {0.0, 0.3, 2.0}) {
    Vector f;
    heat.eval_explicit(heat.exact_solution(t).value(), t, f);
    const Vector expect = (pi * x.array()).sin() * (nu * pi * pi * std::cos(t) - std::sin(t));
    CHECK(max_abs(f - expect) < 1e-12);
  }
  CHECK(max_abs(heat.initial_condition(0.0) - Vector((pi * x.array()).sin())) < 1e-15);
}

TEST_CASE("heat implicit solve on the discrete eigenvector") {
  HeatProblem heat(0.5, 255);
  const double h = heat.grid().h;
  const Vector x = heat.grid().points();
  const Vector b = (pi * x.array()).sin();
  const double lam = 4.0 / (h * h) * std::pow(std::sin(pi * h / 2.0), 2);
  for (const double a : {0.01, 0.5, 3.0}) {
    const Vector u = heat.implicit_solve(a, b, 0.0, b);
    CHECK(max_abs(u - b / (1.0 + a * 0.5 * lam)) < 1e-12);
  }
  CHECK(max_abs(heat.implicit_solve(0.7, Vector::Zero(255), 0.0, b)) == 0.0);
}

TEST_CASE("heat laplacian is second order") {
  double prev = 0.0;
  for (const int N : {31, 63, 127, 255}) {
    HeatProblem heat(1.0, N);
    const Vector x = heat.grid().points();
    const Vector u = (pi * x.array()).sin();
    Vector lap;
    heat.eval_implicit(u, 0.0, lap);
    const double err = max_abs(lap + pi * pi * u);
    if (prev > 0.0) CHECK(std::abs(std::log2(prev / err) - 2.0) < 0.05);
    prev = err;
  }
}

TEST_CASE("advection exact solution, constants and mean") {
  std::mt19937_64 rng(3);
  for (const int order : {2, 4}) {
    AdvectionProblem adv(1.0, 64, order);
    const Vector x = adv.grid().points();
    CHECK(max_abs(adv.exact_solution(0.25).value() -
                  Vector((2.0 * pi * (x.array() + 0.25)).cos())) < 1e-15);
    Vector out;
    adv.eval_implicit(Vector::Constant(64, 3.0), 0.0, out);
    CHECK(max_abs(out) < 1e-12);
    const Vector b = random_vector(rng, 64);
    const Vector u = adv.implicit_solve(0.1, b, 0.0, b);
    CHECK(std::abs(u.mean() - b.mean()) < 1e-13);
    adv.eval_implicit(u, 0.0, out);
    CHECK(max_abs(u - 0.1 * out - b) < 1e-12);
  }
}

TEST_CASE("advection stencils converge at their order") {
  for (const int order : {2, 4}) {
    double prev = 0.0;
    for (const int N : {32, 64, 128, 256}) {
      AdvectionProblem adv(1.0, N, order);
      const Vector x = adv.grid().points();
      Vector ux;
      adv.eval_implicit(Vector((2.0 * pi * x.array()).cos()), 0.0, ux);
      const double err = max_abs(ux + 2.0 * pi * Vector((2.0 * pi * x.array()).sin()));
      if (prev > 0.0) CHECK(std::abs(std::log2(prev / err) - order) < 0.05);
      prev = err;
    }
  }
}

TEST_CASE("gray-scott right-hand side at the trivial state") {
  GrayScottParams p;
  Vector s(2 * 9);
  for (int i = 0; i < 9; ++i) {
    s(2 * i) = 1.0;
    s(2 * i + 1) = 0.0;
  }
  Vector out;
  GrayScottProblem(p, 9).eval_implicit(s, 0.0, out);
  for (int i = 0; i < 9; ++i) {
    CHECK(std::abs(out(2 * i)) < 1e-15);
    CHECK(std::abs(out(2 * i + 1) + p.B) < 1e-15);
  }
  p.decay = DecayVariant::Standard;
  GrayScottProblem(p, 9).eval_implicit(s, 0.0, out);
  CHECK(max_abs(out) < 1e-15);
  CHECK(parse_decay_variant(to_string(DecayVariant::Standard)) == DecayVariant::Standard);
  CHECK_THROWS_AS(parse_decay_variant("other"), ConfigError);
}

TEST_CASE("gray-scott initial condition") {
  GrayScottProblem gs(GrayScottParams{}, 129);
  const Vector s = gs.initial_condition(0.0);
  CHECK(std::abs(s(0) - 1.0) < 1e-15);
  CHECK(std::abs(s(1)) < 1e-15);
  CHECK(std::abs(s(2 * 64) - 0.5) < 1e-14);
  CHECK(std::abs(s(2 * 64 + 1) - 0.25) < 1e-14);
}

TEST_CASE("gray-scott jacobian against finite differences") {
  std::mt19937_64 rng(9);
  for (const auto decay : {DecayVariant::AsPrinted, DecayVariant::Standard}) {
    GrayScottParams p;
    p.decay = decay;
    GrayScottProblem gs(p, 17);
    const Vector s = gs.initial_condition(0.0) + random_vector(rng, 34, 0.1);
    const Matrix J = gs.jacobian_dense(s);
    const double eps = 1e-6;
    const Matrix fd = probe_operator(34, [&](const Vector& e) {
      Vector fp, fm;
      gs.eval_implicit(s + eps * e, 0.0, fp);
      gs.eval_implicit(s - eps * e, 0.0, fm);
      return Vector((fp - fm) / (2.0 * eps));
    });
    CHECK(max_abs(J - fd) < 1e-6 * (1.0 + max_abs(J)));
  }
}

TEST_CASE("gray-scott newton meets its tolerance") {
  std::mt19937_64 rng(21);
  GrayScottProblem gs(GrayScottParams{}, 65);
  const Vector s0 = gs.initial_condition(0.0);
  const Vector b = s0 + random_vector(rng, s0.size(), 0.01);
  const double a = 0.7;
  const Vector u = gs.implicit_solve(a, b, 0.0, b);
  Vector f;
  gs.eval_implicit(u, 0.0, f);
  CHECK(max_abs(u - a * f - b) <= 1e-9);
}

TEST_CASE("dahlquist") {
  DahlquistProblem d(-1.0);
  Vector one = Vector::Ones(1);
  CHECK(std::abs(d.implicit_solve(1.0, one, 0.0, one)(0) - 0.5) < 1e-15);
  CHECK(std::abs(d.exact_solution(2.0).value()(0) - std::exp(-2.0)) < 1e-15);
}

TEST_CASE("grid conventions") {
  const auto dir = Grid1D::make(Boundary::Dirichlet, 255, 0.0, 1.0);
  CHECK(dir.h == doctest::Approx(1.0 / 256));
  CHECK(dir.x(0) == doctest::Approx(1.0 / 256));
  const auto per = Grid1D::make(Boundary::Periodic, 256, 0.0, 1.0);
  CHECK(per.x(255) == doctest::Approx(255.0 / 256));
  const auto neu = Grid1D::make(Boundary::Neumann, 129, 0.0, 100.0);
  CHECK(neu.x(128) == doctest::Approx(100.0));
  CHECK_THROWS_AS(HeatProblem(0.5, 0), ConfigError);
}

}  // TEST_SUITE
