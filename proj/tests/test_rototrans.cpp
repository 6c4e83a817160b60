#include <doctest.h>

#include <random>

#include "curvex/rototrans.hpp"

using namespace curvex;

namespace {

NodeField planar_unit(int r, int c) {
  NodeField g(GridShape::planar(r, c));
  std::fill(g.v.begin(), g.v.end(), 1.0);
  return g;
}

}  // namespace

TEST_CASE("angle table covers the circle once") {
  AngleTable t = AngleTable::make(16);
  CHECK(t.theta.front() == 0.0);
  CHECK(t.theta.back() == doctest::Approx(2 * M_PI * 15 / 16));
  CHECK(t.c[4] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(t.s[4] == doctest::Approx(1.0));
  CHECK_THROWS_AS(AngleTable::make(3), config_error);
}

TEST_CASE("lifted diracs") {
  GridShape s = GridShape::lifted(6, 6, 8);
  NodeField a = lifted_dirac(s, 2, 3, 1, +1);
  NodeField b = lifted_dirac(s, 4, 4, 5, -1);
  double total = 0;
  for (std::size_t n = 0; n < a.v.size(); ++n) total += a.v[n] + b.v[n];
  CHECK(total == 0.0);

  NodeField c = lifted_dirac(s, 2, 3, 1, -1);
  for (std::size_t n = 0; n < a.v.size(); ++n) CHECK(a.v[n] + c.v[n] == 0.0);

  CHECK_THROWS_AS(lifted_dirac(s, 2, 3, 9, 1), config_error);
}

TEST_CASE("marginal of a lifted dirac is the planar dirac") {
  GridShape s = GridShape::lifted(5, 5, 4);
  NodeField mu = lifted_dirac(s, 1, 2, 3, +1);
  // marginal over theta of the node field
  double at_12 = 0, elsewhere = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      double m = 0;
      for (int k = 0; k < 4; ++k) m += mu.at(i, j, k);
      if (i == 1 && j == 2)
        at_12 = m;
      else
        elsewhere += std::abs(m);
    }
  CHECK(at_12 == 1.0);
  CHECK(elsewhere == 0.0);
}

TEST_CASE("marginalize commutes with the divergence") {
  GridShape s = GridShape::lifted(7, 6, 8);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  EdgeField z(s);
  for (int a = 0; a < 3; ++a)
    for (auto& v : z.comp[a]) v = u(rng);

  EdgeField zt = marginalize(z);
  NodeField planar_div = divergence_adjoint(zt);
  NodeField lifted_div = divergence_adjoint(z);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 6; ++j) {
      double m = 0;
      for (int k = 0; k < 8; ++k) m += lifted_div.at(i, j, k);
      CHECK(std::abs(planar_div.at(i, j) - m) <= 1e-12);
    }
}

TEST_CASE("marginal of a theta-constant row flow is the planar row flow") {
  GridShape s = GridShape::lifted(5, 6, 4);
  EdgeField z(s);
  for (int j = 1; j < 4; ++j) z.at(1, 2, j, 2) = 1.0;  // col edges at k=2
  EdgeField zt = marginalize(z);
  CHECK(zt.at(1, 2, 1) == 1.0);
  CHECK(zt.at(1, 2, 2) == 1.0);
  CHECK(zt.at(1, 2, 3) == 1.0);
  CHECK(zt.at(1, 2, 0) == 0.0);
  for (double v : zt.comp[0]) CHECK(v == 0.0);
}

TEST_CASE("lifted straight-line solve reaches the segment energy") {
  // endpoints aligned with their shared angle: a 26-edge row-direction
  // segment at k = 0 on a 30x6 grid, unit weight, EL alpha = 1
  const int rows = 30, cols = 6, K = 8;
  NodeField g = planar_unit(rows, cols);
  EnergySpec spec(EnergyFamily::RotoEL, g, 1.0);
  DiracMass a, b;
  a.i = 2;
  a.j = 3;
  a.third = 0;
  a.sign = -1;
  b.i = 28;
  b.j = 3;
  b.third = 0;
  b.sign = +1;
  SolverConfig cfg;
  cfg.max_steps = 2500;
  cfg.check_every = 250;
  LiftedSolveResult res = solve_lifted(spec, {a, b}, K, cfg);

  const double length = 26.0;
  CHECK(res.state.log.back().energy == doctest::Approx(length).epsilon(0.01));

  // planar energy of the marginalized field agrees
  EnergySpec planar_spec(EnergyFamily::L2Averaged, g);
  CHECK(primal_energy(res.planar, planar_spec) ==
        doctest::Approx(length).epsilon(0.01));

  // a single curve connecting the endpoints
  REQUIRE(res.curves.size() >= 1);
  CHECK(res.curves.front().nodes.front()[0] == 2);
  CHECK(res.curves.front().nodes.back()[0] == 28);
}

TEST_CASE("max_step_turning counts stacked angle moves") {
  TracedCurve c;
  c.nodes = {{0, 0, 0}, {1, 0, 0}, {1, 0, 1}, {1, 0, 2}, {1, 1, 2}};
  CHECK(max_step_turning(c, 16) == doctest::Approx(2 * (2 * M_PI / 16)));
  TracedCurve straight;
  straight.nodes = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  CHECK(max_step_turning(straight, 16) == 0.0);
}
