// Independent reference implementations used to pin expected values. These
// deliberately re-derive everything from first principles (dense matrices,
// graph search, boundary scans) instead of calling the library operators.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "curvex/grid.hpp"

namespace oracle {

// Dense matrix of the staggered forward-difference gradient: rows are edges
// (axis 0 block first, then axis 1, then axis 2), columns are nodes. Node
// (i,j,k) sits at column ((i*n1)+j)*n2+k; the axis-a edge block is laid out
// row-major with the a-extent shortened by one (or kept, wrapping, if the
// grid is lifted and a = 2).
inline Eigen::MatrixXd dense_gradient(const curvex::GridShape& s) {
  const int n0 = s.dim(0), n1 = s.dim(1), n2 = s.axes() == 3 ? s.dim(2) : 1;
  const bool wrap = s.mode() == curvex::GridMode::Lifted;
  auto node = [&](int i, int j, int k) { return (i * n1 + j) * n2 + k; };

  std::size_t rows = 0;
  for (int a = 0; a < s.axes(); ++a) {
    int e0 = a == 0 ? n0 - 1 : n0;
    int e1 = a == 1 ? n1 - 1 : n1;
    int e2 = a == 2 ? (wrap ? n2 : n2 - 1) : n2;
    rows += std::size_t(e0) * e1 * e2;
  }
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(Eigen::Index(rows), n0 * n1 * n2);
  Eigen::Index r = 0;
  for (int a = 0; a < s.axes(); ++a) {
    int e0 = a == 0 ? n0 - 1 : n0;
    int e1 = a == 1 ? n1 - 1 : n1;
    int e2 = a == 2 ? (wrap ? n2 : n2 - 1) : n2;
    for (int i = 0; i < e0; ++i)
      for (int j = 0; j < e1; ++j)
        for (int k = 0; k < e2; ++k, ++r) {
          int hi = i + (a == 0), hj = j + (a == 1), hk = k + (a == 2);
          if (wrap && a == 2 && hk == n2) hk = 0;
          G(r, node(hi, hj, hk)) += 1.0;
          G(r, node(i, j, k)) -= 1.0;
        }
  }
  return G;
}

// Dense matrix of the node-averaging operator: rows are (axis, node) pairs,
// axis blocks first.
inline Eigen::MatrixXd dense_average(const curvex::GridShape& s, bool forward) {
  Eigen::MatrixXd G = dense_gradient(s);  // reuse the edge enumeration below
  const int n0 = s.dim(0), n1 = s.dim(1), n2 = s.axes() == 3 ? s.dim(2) : 1;
  const bool wrap = s.mode() == curvex::GridMode::Lifted;
  const Eigen::Index nodes = n0 * n1 * n2;
  auto node = [&](int i, int j, int k) { return (i * n1 + j) * n2 + k; };

  Eigen::MatrixXd A =
      Eigen::MatrixXd::Zero(nodes * s.axes(), G.rows());
  Eigen::Index e = 0;
  for (int a = 0; a < s.axes(); ++a) {
    int e0 = a == 0 ? n0 - 1 : n0;
    int e1 = a == 1 ? n1 - 1 : n1;
    int e2 = a == 2 ? (wrap ? n2 : n2 - 1) : n2;
    for (int i = 0; i < e0; ++i)
      for (int j = 0; j < e1; ++j)
        for (int k = 0; k < e2; ++k, ++e) {
          int hi = i + (a == 0), hj = j + (a == 1), hk = k + (a == 2);
          if (wrap && a == 2 && hk == n2) hk = 0;
          if (forward) {
            A(a * nodes + node(i, j, k), e) = 1.0;
          } else {
            A(a * nodes + node(i, j, k), e) += 0.5;
            A(a * nodes + node(hi, hj, hk), e) += 0.5;
          }
        }
  }
  return A;
}

// Least-squares projection of z onto {G^T z' = mu}: z + G (G^T G)^+ (mu - G^T z).
inline Eigen::VectorXd dense_project_divergence(const Eigen::MatrixXd& G,
                                                const Eigen::VectorXd& z,
                                                const Eigen::VectorXd& mu) {
  Eigen::MatrixXd L = G.transpose() * G;
  Eigen::VectorXd r = mu - G.transpose() * z;
  Eigen::VectorXd u = L.completeOrthogonalDecomposition().solve(r);
  return z + G * u;
}

inline Eigen::VectorXd dense_solve_poisson(const Eigen::MatrixXd& G,
                                           const Eigen::VectorXd& rhs) {
  Eigen::MatrixXd L = G.transpose() * G;
  // pseudo-inverse solution: orthogonal to constants, i.e. zero-mean
  return L.completeOrthogonalDecomposition().solve(rhs);
}

// Shortest path on the 4/6-connected grid graph where the edge leaving node
// (i,j,..) toward higher index along axis a costs g at that (governing)
// node. Returns the distance from src to dst.
inline double dijkstra_grid(const curvex::GridShape& s,
                            const std::vector<double>& g, std::size_t src,
                            std::size_t dst) {
  const int n0 = s.dim(0), n1 = s.dim(1), n2 = s.axes() == 3 ? s.dim(2) : 1;
  auto node = [&](int i, int j, int k) { return std::size_t((i * n1 + j) * n2 + k); };
  const std::size_t N = std::size_t(n0) * n1 * n2;
  std::vector<double> dist(N, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0;
  pq.push({0, src});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    if (u == dst) return d;
    int k = int(u % n2), j = int((u / n2) % n1), i = int(u / (std::size_t(n1) * n2));
    auto relax = [&](int ii, int jj, int kk, double w) {
      if (ii < 0 || ii >= n0 || jj < 0 || jj >= n1 || kk < 0 || kk >= n2) return;
      std::size_t v = node(ii, jj, kk);
      if (dist[u] + w < dist[v]) {
        dist[v] = dist[u] + w;
        pq.push({dist[v], v});
      }
    };
    // weight of an edge is g at its lower node, in both travel directions
    relax(i + 1, j, k, g[u]);
    relax(i, j + 1, k, g[u]);
    if (n2 > 1) relax(i, j, k + 1, g[u]);
    if (i > 0) relax(i - 1, j, k, g[node(i - 1, j, k)]);
    if (j > 0) relax(i, j - 1, k, g[node(i, j - 1, k)]);
    if (n2 > 1 && k > 0) relax(i, j, k - 1, g[node(i, j, k - 1)]);
  }
  return dist[dst];
}

// Brute-force nearest point on a curvature dual set, scanning the boundary
// at parameter resolution `res`. The sets are closed convex regions of the
// (a,b) plane; for an outside point the projection lies on the boundary.
struct BoundaryScan {
  double a, b, dist;
};

inline BoundaryScan scan_trl(double a0, double b0, double alpha, double res) {
  BoundaryScan best{0, 0, std::numeric_limits<double>::infinity()};
  auto consider = [&](double a, double b) {
    double d = std::hypot(a - a0, b - b0);
    if (d < best.dist) best = {a, b, d};
  };
  // left strip edges b = +/- alpha, a in [-6, 0]
  for (double a = -6.0; a <= 0.0; a += res) {
    consider(a, alpha);
    consider(a, -alpha);
  }
  // right half ellipse a = cos t, b = alpha sin t, t in [-pi/2, pi/2]
  for (double t = -M_PI / 2; t <= M_PI / 2; t += res)
    consider(std::cos(t), alpha * std::sin(t));
  return best;
}

inline BoundaryScan scan_el(double a0, double b0, double alpha, double res) {
  BoundaryScan best{0, 0, std::numeric_limits<double>::infinity()};
  const double c = 4 * alpha * alpha;
  for (double b = -14.0; b <= 14.0; b += res) {
    double a = 1.0 - b * b / c;
    double d = std::hypot(a - a0, b - b0);
    if (d < best.dist) best = {a, b, d};
  }
  return best;
}

}  // namespace oracle
