#include "curvex/ops.hpp"

#include <cmath>
#include <random>

namespace curvex {

namespace {

// Visits every edge of one axis and hands over (edge linear index,
// low node linear index, high node linear index).
template <typename F>
void for_each_edge(const GridShape& s, int axis, F&& f) {
  const int d0 = (axis == 0) ? s.edge_dim(0) : s.dim(0);
  const int d1 = (axis == 1) ? s.edge_dim(1) : s.dim(1);
  const int d2 = (axis == 2) ? s.edge_dim(2) : s.dim(2);
  std::size_t e = 0;
  for (int i = 0; i < d0; ++i)
    for (int j = 0; j < d1; ++j)
      for (int k = 0; k < d2; ++k, ++e) {
        int hi = i + (axis == 0);
        int hj = j + (axis == 1);
        int hk = k + (axis == 2);
        if (s.periodic(2) && axis == 2 && hk == s.dim(2)) hk = 0;
        f(e, s.node_index(i, j, k), s.node_index(hi, hj, hk));
      }
}

}  // namespace

EdgeField gradient(const NodeField& u) {
  EdgeField z(u.shape);
  for (int a = 0; a < u.shape.axes(); ++a)
    for_each_edge(u.shape, a, [&](std::size_t e, std::size_t lo, std::size_t hi) {
      z.comp[a][e] = u.v[hi] - u.v[lo];
    });
  return z;
}

NodeField divergence_adjoint(const EdgeField& z) {
  NodeField out(z.shape);
  for (int a = 0; a < z.shape.axes(); ++a)
    for_each_edge(z.shape, a, [&](std::size_t e, std::size_t lo, std::size_t hi) {
      out.v[hi] += z.comp[a][e];
      out.v[lo] -= z.comp[a][e];
    });
  return out;
}

DualField average(const EdgeField& z, AveragingMode mode) {
  DualField p(z.shape);
  if (mode == AveragingMode::Averaged) {
    for (int a = 0; a < z.shape.axes(); ++a)
      for_each_edge(z.shape, a, [&](std::size_t e, std::size_t lo, std::size_t hi) {
        p.comp[a][lo] += 0.5 * z.comp[a][e];
        p.comp[a][hi] += 0.5 * z.comp[a][e];
      });
  } else {
    // Forward: each edge lands on its low node only.
    for (int a = 0; a < z.shape.axes(); ++a)
      for_each_edge(z.shape, a, [&](std::size_t e, std::size_t lo, std::size_t) {
        p.comp[a][lo] = z.comp[a][e];
      });
  }
  return p;
}

EdgeField average_adjoint(const DualField& p, AveragingMode mode) {
  EdgeField z(p.shape);
  if (mode == AveragingMode::Averaged) {
    for (int a = 0; a < p.shape.axes(); ++a)
      for_each_edge(p.shape, a, [&](std::size_t e, std::size_t lo, std::size_t hi) {
        z.comp[a][e] = 0.5 * (p.comp[a][lo] + p.comp[a][hi]);
      });
  } else {
    for (int a = 0; a < p.shape.axes(); ++a)
      for_each_edge(p.shape, a, [&](std::size_t e, std::size_t lo, std::size_t) {
        z.comp[a][e] = p.comp[a][lo];
      });
  }
  return z;
}

double operator_norm(const GridShape& shape, AveragingMode mode, double rel_tol,
                     int max_iter, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  EdgeField v(shape);
  for (int a = 0; a < shape.axes(); ++a)
    for (auto& x : v.comp[a]) x = unif(rng);
  double nv = norm2(v);
  if (nv == 0) throw numeric_error("operator_norm: degenerate start vector");
  for (int a = 0; a < shape.axes(); ++a)
    for (auto& x : v.comp[a]) x /= nv;

  double lambda = 0;
  for (int it = 0; it < max_iter; ++it) {
    DualField w = average(v, mode);
    EdgeField next = average_adjoint(w, mode);
    double lambda_new = dot(w, w);  // Rayleigh quotient of A*A at unit v
    double nn = norm2(next);
    if (nn == 0) return 0.0;  // A vanishes on the reachable subspace
    for (int a = 0; a < shape.axes(); ++a)
      for (auto& x : next.comp[a]) x /= nn;
    v = std::move(next);
    if (it > 0 && std::abs(lambda_new - lambda) <= rel_tol * std::abs(lambda_new))
      return std::sqrt(lambda_new) * 1.01;
    lambda = lambda_new;
  }
  throw numeric_error("operator_norm: power iteration did not converge");
}

}  // namespace curvex
