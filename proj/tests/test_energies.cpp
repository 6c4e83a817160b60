#include <doctest.h>

#include <random>

#include "curvex/energies.hpp"
#include "oracles.hpp"

using namespace curvex;

namespace {

std::mt19937_64 rng(7);

NodeField unit_weight(const GridShape& s) {
  NodeField g(s);
  std::fill(g.v.begin(), g.v.end(), 1.0);
  return g;
}

NodeField planar_unit(int r, int c) { return unit_weight(GridShape::planar(r, c)); }

DualField random_dual(const GridShape& s, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  DualField f(s);
  for (int a = 0; a < s.axes(); ++a)
    for (auto& v : f.comp[a]) v = u(rng);
  return f;
}

}  // namespace

TEST_CASE("primal energy basics") {
  GridShape s = GridShape::planar(4, 4);
  EnergySpec l1(EnergyFamily::L1, unit_weight(s));
  CHECK(primal_energy(EdgeField(s), l1) == 0.0);

  EdgeField z(s);
  z.at(0, 1, 2) = 1.0;  // one horizontal (row-direction) unit edge
  CHECK(primal_energy(z, l1) == doctest::Approx(1.0));
}

TEST_CASE("dual projection examples") {
  GridShape s = GridShape::planar(2, 2);
  {
    EnergySpec spec(EnergyFamily::L2Averaged, unit_weight(s));
    DualField p(s);
    p.at(0, 0, 0) = 3.0;
    p.at(1, 0, 0) = 4.0;
    DualField q = project_dual(std::move(p), spec);
    CHECK(q.at(0, 0, 0) == doctest::Approx(0.6));
    CHECK(q.at(1, 0, 0) == doctest::Approx(0.8));
  }
  {
    NodeField g = unit_weight(s);
    std::fill(g.v.begin(), g.v.end(), 0.5);
    EnergySpec spec(EnergyFamily::L1, g);
    DualField p(s);
    p.at(0, 1, 1) = 0.9;
    p.at(1, 1, 1) = -0.2;
    DualField q = project_dual(std::move(p), spec);
    CHECK(q.at(0, 1, 1) == doctest::Approx(0.5));
    CHECK(q.at(1, 1, 1) == doctest::Approx(-0.2));
  }
  {
    NodeField g = unit_weight(s);
    g.v[0] = 0.0;
    EnergySpec spec(EnergyFamily::L2Averaged, g);
    DualField p(s);
    p.at(0, 0, 0) = 2.0;
    DualField q = project_dual(std::move(p), spec);
    CHECK(q.at(0, 0, 0) == 0.0);
  }
}

TEST_CASE("interior points are fixed by the dual projection") {
  GridShape s = GridShape::planar(3, 3);
  for (auto fam : {EnergyFamily::L1, EnergyFamily::L2Averaged}) {
    EnergySpec spec(fam, unit_weight(s));
    DualField p = random_dual(s, 0.4);  // strictly inside every node ball
    DualField q = project_dual(p, spec);
    for (int a = 0; a < 2; ++a)
      for (std::size_t n = 0; n < p.comp[a].size(); ++n)
        CHECK(q.comp[a][n] == p.comp[a][n]);
  }
}

TEST_CASE("halfplane set membership shapes") {
  HalfPlaneSetSpec tac{EnergyFamily::RotoTAC, 2.0};
  CHECK(tac.contains(0, 0));
  CHECK(tac.contains(1, 0, 1e-15));
  CHECK(tac.contains(-100, 1.5));
  CHECK(!tac.contains(1.5, 0));

  HalfPlaneSetSpec trl{EnergyFamily::RotoTRL, 0.5};
  CHECK(trl.contains(0, 0));
  CHECK(std::abs(trl.membership_residual(1, 0)) <= 1e-15);
  CHECK(trl.contains(-3, 0.49));
  CHECK(!trl.contains(-3, 0.51));

  HalfPlaneSetSpec el{EnergyFamily::RotoEL, 1.0};
  CHECK(el.contains(0, 0));
  CHECK(std::abs(el.membership_residual(1, 0)) <= 1e-15);
  CHECK(el.contains(-1, 2.8));
  CHECK(!el.contains(0.9, 0.8));
}

TEST_CASE("TAC projection is the box clamp") {
  HalfPlaneSetSpec tac{EnergyFamily::RotoTAC, 2.0};
  auto q = project_halfplane_set(5, -3, tac);
  CHECK(q[0] == doctest::Approx(1.0));
  CHECK(q[1] == doctest::Approx(-2.0));
  auto fixed = project_halfplane_set(0, 0, tac);
  CHECK(fixed[0] == 0.0);
  CHECK(fixed[1] == 0.0);
}

TEST_CASE("TRL/EL projections agree with the boundary scan oracle") {
  std::uniform_real_distribution<double> u(-4, 4);
  for (double alpha : {0.5, 2.0}) {
    HalfPlaneSetSpec trl{EnergyFamily::RotoTRL, alpha};
    for (int t = 0; t < 20; ++t) {
      double a = u(rng), b = u(rng);
      auto q = project_halfplane_set(a, b, trl);
      CHECK(trl.membership_residual(q[0], q[1]) <= 1e-10);
      if (!trl.contains(a, b)) {
        auto ref = oracle::scan_trl(a, b, alpha, 1e-4);
        CHECK(std::hypot(q[0] - ref.a, q[1] - ref.b) <= 2e-3);
      }
    }
  }
  for (double alpha : {0.5, 1.0, 2.0}) {
    HalfPlaneSetSpec el{EnergyFamily::RotoEL, alpha};
    for (int t = 0; t < 20; ++t) {
      double a = u(rng), b = u(rng);
      auto q = project_halfplane_set(a, b, el);
      CHECK(el.membership_residual(q[0], q[1]) <= 1e-10);
      if (!el.contains(a, b)) {
        auto ref = oracle::scan_el(a, b, alpha, 1e-4);
        CHECK(std::hypot(q[0] - ref.a, q[1] - ref.b) <= 2e-3);
      }
    }
  }
}

TEST_CASE("projections are idempotent and nonexpansive") {
  std::uniform_real_distribution<double> u(-5, 5);
  for (auto fam : {EnergyFamily::RotoTAC, EnergyFamily::RotoTRL, EnergyFamily::RotoEL}) {
    HalfPlaneSetSpec set{fam, 1.3};
    for (int t = 0; t < 200; ++t) {
      double a1 = u(rng), b1 = u(rng), a2 = u(rng), b2 = u(rng);
      auto q1 = project_halfplane_set(a1, b1, set);
      auto q2 = project_halfplane_set(a2, b2, set);
      auto q11 = project_halfplane_set(q1[0], q1[1], set);
      CHECK(std::hypot(q11[0] - q1[0], q11[1] - q1[1]) <= 1e-9);
      CHECK(std::hypot(q1[0] - q2[0], q1[1] - q2[1]) <=
            std::hypot(a1 - a2, b1 - b2) + 1e-12);
    }
  }
}

TEST_CASE("perspective identities: hbar(1,t) = f(t), hbar(0,t) = recession") {
  for (double t : {-2.0, -0.3, 0.0, 0.7, 3.0}) {
    for (double alpha : {0.5, 1.0, 2.0}) {
      CHECK(perspective_value(EnergyFamily::RotoTAC, alpha, 1, t) ==
            doctest::Approx(1 + alpha * std::abs(t)));
      CHECK(perspective_value(EnergyFamily::RotoTRL, alpha, 1, t) ==
            doctest::Approx(std::sqrt(1 + alpha * alpha * t * t)));
      CHECK(perspective_value(EnergyFamily::RotoEL, alpha, 1, t) ==
            doctest::Approx(1 + alpha * alpha * t * t));

      CHECK(perspective_value(EnergyFamily::RotoTAC, alpha, 0, t) ==
            doctest::Approx(alpha * std::abs(t)));
      CHECK(perspective_value(EnergyFamily::RotoTRL, alpha, 0, t) ==
            doctest::Approx(alpha * std::abs(t)));
      if (t != 0)
        CHECK(std::isinf(perspective_value(EnergyFamily::RotoEL, alpha, 0, t)));
      else
        CHECK(perspective_value(EnergyFamily::RotoEL, alpha, 0, 0) == 0.0);
    }
  }
  CHECK(std::isinf(perspective_value(EnergyFamily::RotoTAC, 1.0, -0.1, 0)));
}

TEST_CASE("support-function duality: sampled feasible duals reach the energy") {
  GridShape s = GridShape::planar(3, 3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto fam : {EnergyFamily::L1, EnergyFamily::L2Averaged}) {
    EnergySpec spec(fam, unit_weight(s));
    EdgeField z(s);
    for (int a = 0; a < 2; ++a)
      for (auto& v : z.comp[a]) v = u(rng);
    DualField az = average(z, averaging_mode(fam));
    double energy = primal_energy(z, spec);

    double best = 0;
    for (std::size_t n = 0; n < s.node_count(); ++n) {
      double node_best = 0;
      for (int t = 0; t < 1000; ++t) {
        double p0 = u(rng), p1 = u(rng);
        if (fam == EnergyFamily::L2Averaged) {
          double r = std::hypot(p0, p1);
          if (r > 1) {
            p0 /= r;
            p1 /= r;
          }
        } else {
          // the linf ball: the raw sample plus its sign-rounded corner
          double c0 = p0 < 0 ? -1.0 : 1.0, c1 = p1 < 0 ? -1.0 : 1.0;
          node_best = std::max(node_best, c0 * az.comp[0][n] + c1 * az.comp[1][n]);
        }
        node_best = std::max(node_best, p0 * az.comp[0][n] + p1 * az.comp[1][n]);
      }
      best += node_best;
    }
    CHECK(best <= energy + 1e-9);
    CHECK(best >= 0.98 * energy);
  }
}

TEST_CASE("lifted dual sampling reaches hbar on collinear data") {
  // per-node duality check of hbar against samples from C_hbar
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto fam : {EnergyFamily::RotoTAC, EnergyFamily::RotoTRL, EnergyFamily::RotoEL}) {
    const double alpha = 1.0;
    HalfPlaneSetSpec set{fam, alpha};
    for (int t = 0; t < 20; ++t) {
      double lam = std::abs(u(rng)) + 0.2;
      double v_theta = 0.8 * u(rng);
      double target = perspective_value(fam, alpha, lam, v_theta);
      double best = 0;
      for (int k = 0; k < 4000; ++k) {
        auto q = project_halfplane_set(20 * u(rng), 20 * u(rng), set);
        best = std::max(best, q[0] * lam + q[1] * v_theta);
      }
      CHECK(best <= target + 1e-9);
      CHECK(best >= 0.98 * target);
    }
  }
}

TEST_CASE("roto projection: fixed points, orthogonal preservation, membership") {
  GridShape s = GridShape::lifted(4, 4, 8);
  AngleTable angles = AngleTable::make(8);
  NodeField g = planar_unit(4, 4);
  for (auto fam : {EnergyFamily::RotoTAC, EnergyFamily::RotoTRL, EnergyFamily::RotoEL}) {
    EnergySpec spec(fam, g, 2.0);
    DualField p = random_dual(s, 3.0);
    DualField q = project_dual_roto(p, spec, angles);

    HalfPlaneSetSpec set{fam, 2.0};
    std::size_t n = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 8; ++k, ++n) {
          // orthogonal spatial component is untouched, exactly
          double op = p.comp[1][n] * angles.c[k] - p.comp[0][n] * angles.s[k];
          double oq = q.comp[1][n] * angles.c[k] - q.comp[0][n] * angles.s[k];
          CHECK(std::abs(op - oq) <= 1e-12);
          // and the projected pair is feasible
          double tang = q.comp[0][n] * angles.c[k] + q.comp[1][n] * angles.s[k];
          CHECK(set.membership_residual(tang, q.comp[2][n]) <= 1e-10);
        }

    DualField qq = project_dual_roto(q, spec, angles);
    for (int a = 0; a < 3; ++a)
      for (std::size_t m = 0; m < q.comp[a].size(); ++m)
        CHECK(std::abs(qq.comp[a][m] - q.comp[a][m]) <= 1e-12);
  }
}

TEST_CASE("zero-weight nodes collapse the lifted dual to zero") {
  GridShape s = GridShape::lifted(3, 3, 4);
  NodeField g = planar_unit(3, 3);
  g.at(1, 1) = 0.0;
  EnergySpec spec(EnergyFamily::RotoEL, g, 1.0);
  DualField p = random_dual(s, 2.0);
  DualField q = project_dual_roto(std::move(p), spec, AngleTable::make(4));
  for (int k = 0; k < 4; ++k)
    for (int a = 0; a < 3; ++a) CHECK(q.at(a, 1, 1, k) == 0.0);
}

TEST_CASE("lifted straight segment has energy = length under EL") {
  // flow along the row axis at k = 0 (theta_0 points toward +rows)
  GridShape s = GridShape::lifted(12, 4, 8);
  EdgeField z(s);
  for (int i = 2; i < 9; ++i) z.at(0, i, 2, 0) = 1.0;  // 7 edges, length 7
  EnergySpec spec(EnergyFamily::RotoEL, planar_unit(12, 4), 3.0);
  CHECK(primal_energy(z, spec) == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(diagnostic_energy(z, spec) == doctest::Approx(7.0).epsilon(1e-12));
}
