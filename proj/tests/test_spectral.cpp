#include <doctest.h>

#include <random>

#include "curvex/ops.hpp"
#include "curvex/spectral.hpp"
#include "oracles.hpp"

using namespace curvex;

namespace {

std::mt19937_64 rng(99);

NodeField random_zero_sum(const GridShape& s) {
  std::uniform_real_distribution<double> u(-1, 1);
  NodeField f(s);
  double mean = 0;
  for (auto& v : f.v) {
    v = u(rng);
    mean += v;
  }
  mean /= double(f.v.size());
  for (auto& v : f.v) v -= mean;
  return f;
}

EdgeField random_edge(const GridShape& s) {
  std::uniform_real_distribution<double> u(-1, 1);
  EdgeField f(s);
  for (int a = 0; a < s.axes(); ++a)
    for (auto& v : f.comp[a]) v = u(rng);
  return f;
}

double linf(const NodeField& a, const NodeField& b) {
  double m = 0;
  for (std::size_t n = 0; n < a.v.size(); ++n)
    m = std::max(m, std::abs(a.v[n] - b.v[n]));
  return m;
}

}  // namespace

TEST_CASE("spectrum has exactly one zero eigenvalue") {
  for (const auto& s : {GridShape::planar(4, 4), GridShape::volume(4, 3, 5),
                        GridShape::lifted(4, 4, 6)}) {
    LaplacianSpectrum spec(s);
    int zeros = 0;
    for (double e : spec.eigenvalues()) {
      CHECK(e >= 0.0);
      if (e == 0.0) ++zeros;
    }
    CHECK(zeros == 1);
  }
}

TEST_CASE("zero rhs solves to zero") {
  LaplacianSpectrum spec(GridShape::planar(5, 7));
  NodeField u = spec.solve_poisson(NodeField(GridShape::planar(5, 7)));
  for (double v : u.v) CHECK(v == 0.0);
}

TEST_CASE("poisson solve matches the dense pseudo-inverse on 4x4") {
  GridShape s = GridShape::planar(4, 4);
  NodeField rhs(s);
  rhs.at(0, 0) = 1.0;
  rhs.at(3, 3) = -1.0;
  LaplacianSpectrum spec(s);
  NodeField u = spec.solve_poisson(rhs);

  Eigen::MatrixXd G = oracle::dense_gradient(s);
  Eigen::VectorXd r(16);
  for (int n = 0; n < 16; ++n) r(n) = rhs.v[n];
  Eigen::VectorXd ud = oracle::dense_solve_poisson(G, r);
  for (int n = 0; n < 16; ++n)
    CHECK(std::abs(u.v[n] - ud(n)) <= 1e-10);
}

TEST_CASE("poisson residual on a lifted grid") {
  GridShape s = GridShape::lifted(8, 8, 6);
  LaplacianSpectrum spec(s);
  NodeField rhs = random_zero_sum(s);
  NodeField u = spec.solve_poisson(rhs);
  NodeField lap = divergence_adjoint(gradient(u));
  double rhs_inf = 0;
  for (double v : rhs.v) rhs_inf = std::max(rhs_inf, std::abs(v));
  CHECK(linf(lap, rhs) <= 1e-9 * rhs_inf);
  double mean = 0;
  for (double v : u.v) mean += v;
  CHECK(std::abs(mean / double(u.v.size())) <= 1e-12);
}

TEST_CASE("incompatible rhs is rejected with the residual mass named") {
  GridShape s = GridShape::planar(4, 4);
  LaplacianSpectrum spec(s);
  NodeField rhs(s);
  rhs.at(1, 1) = 1.0;  // net mass 1
  CHECK_THROWS_AS(spec.solve_poisson(rhs), config_error);
  try {
    spec.solve_poisson(rhs);
  } catch (const config_error& e) {
    CHECK(std::string(e.what()).find("net mass") != std::string::npos);
  }
}

TEST_CASE("projection fixes feasible points") {
  GridShape s = GridShape::planar(6, 5);
  LaplacianSpectrum spec(s);
  NodeField u(s);
  std::uniform_real_distribution<double> d(-1, 1);
  for (auto& v : u.v) v = d(rng);
  EdgeField z = gradient(u);  // any field is feasible for its own divergence
  NodeField mu = divergence_adjoint(z);
  EdgeField back = spec.project_divergence(z, mu);
  for (int a = 0; a < 2; ++a)
    for (std::size_t e = 0; e < z.comp[a].size(); ++e)
      CHECK(std::abs(back.comp[a][e] - z.comp[a][e]) <= 1e-12);
}

TEST_CASE("projection of zero equals the dense least-squares solution") {
  for (const auto& s : {GridShape::planar(5, 5), GridShape::planar(5, 3)}) {
    LaplacianSpectrum spec(s);
    NodeField mu(s);
    mu.at(1, 1) = -1.0;
    mu.at(s.rows() - 1, s.cols() - 2) = 1.0;
    EdgeField z = spec.project_divergence(EdgeField(s), mu);

    Eigen::MatrixXd G = oracle::dense_gradient(s);
    Eigen::VectorXd zv = Eigen::VectorXd::Zero(G.rows());
    Eigen::VectorXd muv(Eigen::Index(s.node_count()));
    for (std::size_t n = 0; n < s.node_count(); ++n) muv(Eigen::Index(n)) = mu.v[n];
    Eigen::VectorXd zd = oracle::dense_project_divergence(G, zv, muv);

    Eigen::Index r = 0;
    for (int a = 0; a < 2; ++a)
      for (std::size_t e = 0; e < z.comp[a].size(); ++e, ++r)
        CHECK(std::abs(z.comp[a][e] - zd(r)) <= 1e-8);
  }
}

TEST_CASE("projection is idempotent and feasible across modes") {
  for (const auto& s : {GridShape::planar(8, 8), GridShape::volume(5, 6, 4),
                        GridShape::lifted(6, 6, 8)}) {
    LaplacianSpectrum spec(s);
    for (int rep = 0; rep < 5; ++rep) {
      EdgeField z = random_edge(s);
      NodeField mu = random_zero_sum(s);
      EdgeField z1 = spec.project_divergence(z, mu);
      NodeField d = divergence_adjoint(z1);
      double mu_inf = 0;
      for (double v : mu.v) mu_inf = std::max(mu_inf, std::abs(v));
      CHECK(linf(d, mu) <= 1e-9 * (mu_inf + 1.0));
      EdgeField z2 = spec.project_divergence(z1, mu);
      for (int a = 0; a < s.axes(); ++a)
        for (std::size_t e = 0; e < z1.comp[a].size(); ++e)
          CHECK(std::abs(z1.comp[a][e] - z2.comp[a][e]) <= 1e-10);
    }
  }
}

TEST_CASE("the correction lies in the range of the gradient") {
  GridShape s = GridShape::planar(7, 6);
  LaplacianSpectrum spec(s);
  EdgeField z = random_edge(s);
  NodeField mu = random_zero_sum(s);
  EdgeField proj = spec.project_divergence(z, mu);
  EdgeField corr = proj;
  axpy(corr, -1.0, z);
  // least-squares fit of the correction onto gradients leaves ~no residual
  NodeField u = spec.solve_poisson(divergence_adjoint(corr));
  EdgeField fit = gradient(u);
  axpy(fit, -1.0, corr);
  CHECK(norm2(fit) <= 1e-9 * (norm2(corr) + 1.0));
}
