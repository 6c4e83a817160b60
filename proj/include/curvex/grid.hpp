#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "curvex/errors.hpp"

namespace curvex {

enum class GridMode { Planar, Volume, Lifted };

/// Node-centered grid geometry.
///
/// Axis 0 runs over rows (i), axis 1 over columns (j). Axis 2 is either a
/// depth axis (Volume, Neumann like the others) or a periodic angle axis
/// (Lifted). Storage is row-major with the last axis innermost.
///
/// Index convention used everywhere: the staggered edge between nodes
/// (i,j,..) and (i+1,j,..) along axis 0 is stored at integer index i of the
/// axis-0 component array; same pattern for the other axes. On the periodic
/// angle axis, edge index k joins node k to node (k+1) mod K, so the
/// component keeps full length K.
class GridShape {
 public:
  static GridShape planar(int rows, int cols) {
    return GridShape(rows, cols, 1, GridMode::Planar);
  }
  static GridShape volume(int rows, int cols, int depth) {
    return GridShape(rows, cols, depth, GridMode::Volume);
  }
  static GridShape lifted(int rows, int cols, int angles) {
    return GridShape(rows, cols, angles, GridMode::Lifted);
  }

  GridMode mode() const { return mode_; }
  int rows() const { return n_[0]; }
  int cols() const { return n_[1]; }
  int dim(int axis) const { return n_[axis]; }
  int axes() const { return mode_ == GridMode::Planar ? 2 : 3; }
  bool periodic(int axis) const { return axis == 2 && mode_ == GridMode::Lifted; }

  std::size_t node_count() const {
    return std::size_t(n_[0]) * n_[1] * n_[2];
  }
  std::size_t node_index(int i, int j, int k = 0) const {
    return (std::size_t(i) * n_[1] + j) * n_[2] + k;
  }

  /// Extent of the edge component along `axis` in that same axis direction.
  int edge_dim(int axis) const {
    return periodic(axis) ? n_[axis] : n_[axis] - 1;
  }
  std::size_t edge_count(int axis) const {
    std::size_t c = 1;
    for (int a = 0; a < 3; ++a) c *= (a == axis) ? edge_dim(a) : n_[a];
    return c;
  }
  std::size_t edge_index(int axis, int i, int j, int k = 0) const {
    int d1 = (axis == 1) ? edge_dim(1) : n_[1];
    int d2 = (axis == 2) ? edge_dim(2) : n_[2];
    return (std::size_t(i) * d1 + j) * d2 + k;
  }

  bool in_bounds(int i, int j, int k = 0) const {
    return i >= 0 && i < n_[0] && j >= 0 && j < n_[1] && k >= 0 && k < n_[2];
  }

  friend bool operator==(const GridShape& a, const GridShape& b) {
    return a.mode_ == b.mode_ && a.n_ == b.n_;
  }

 private:
  GridShape(int r, int c, int d, GridMode m) : n_{r, c, d}, mode_(m) {
    if (r < 2 || c < 2 || (m != GridMode::Planar && d < 2))
      throw config_error("grid dimensions must all be >= 2");
    if (m == GridMode::Planar && d != 1)
      throw config_error("planar grid has no third axis");
  }
  std::array<int, 3> n_;
  GridMode mode_;
};

/// One real value per grid node.
struct NodeField {
  GridShape shape;
  std::vector<double> v;

  explicit NodeField(const GridShape& s) : shape(s), v(s.node_count(), 0.0) {}
  NodeField(const GridShape& s, std::vector<double> values)
      : shape(s), v(std::move(values)) {
    if (v.size() != s.node_count())
      throw config_error("node value count does not match shape");
  }

  double& at(int i, int j, int k = 0) { return v[shape.node_index(i, j, k)]; }
  double at(int i, int j, int k = 0) const { return v[shape.node_index(i, j, k)]; }
};

/// Staggered vector field: one scalar per edge, one component array per axis.
struct EdgeField {
  GridShape shape;
  std::array<std::vector<double>, 3> comp;

  explicit EdgeField(const GridShape& s) : shape(s) {
    for (int a = 0; a < s.axes(); ++a) comp[a].assign(s.edge_count(a), 0.0);
  }

  double& at(int axis, int i, int j, int k = 0) {
    return comp[axis][shape.edge_index(axis, i, j, k)];
  }
  double at(int axis, int i, int j, int k = 0) const {
    return comp[axis][shape.edge_index(axis, i, j, k)];
  }
};

/// Dense small vector per node (2 components in 2D, 3 otherwise); holds the
/// dual variable p and node-centered averages of edge fields.
struct DualField {
  GridShape shape;
  std::array<std::vector<double>, 3> comp;

  explicit DualField(const GridShape& s) : shape(s) {
    for (int a = 0; a < s.axes(); ++a) comp[a].assign(s.node_count(), 0.0);
  }

  double& at(int axis, int i, int j, int k = 0) {
    return comp[axis][shape.node_index(i, j, k)];
  }
  double at(int axis, int i, int j, int k = 0) const {
    return comp[axis][shape.node_index(i, j, k)];
  }
};

// Small arithmetic helpers shared by the solver and the operators. They all
// require matching shapes (unchecked in release builds; the call sites are
// internal).

inline void fill(EdgeField& z, double value) {
  for (int a = 0; a < z.shape.axes(); ++a)
    std::fill(z.comp[a].begin(), z.comp[a].end(), value);
}

/// x += c * y
inline void axpy(EdgeField& x, double c, const EdgeField& y) {
  for (int a = 0; a < x.shape.axes(); ++a)
    for (std::size_t e = 0; e < x.comp[a].size(); ++e) x.comp[a][e] += c * y.comp[a][e];
}

inline void axpy(DualField& x, double c, const DualField& y) {
  for (int a = 0; a < x.shape.axes(); ++a)
    for (std::size_t e = 0; e < x.comp[a].size(); ++e) x.comp[a][e] += c * y.comp[a][e];
}

inline double dot(const EdgeField& x, const EdgeField& y) {
  double s = 0;
  for (int a = 0; a < x.shape.axes(); ++a)
    for (std::size_t e = 0; e < x.comp[a].size(); ++e) s += x.comp[a][e] * y.comp[a][e];
  return s;
}

inline double dot(const DualField& x, const DualField& y) {
  double s = 0;
  for (int a = 0; a < x.shape.axes(); ++a)
    for (std::size_t e = 0; e < x.comp[a].size(); ++e) s += x.comp[a][e] * y.comp[a][e];
  return s;
}

inline double dot(const NodeField& x, const NodeField& y) {
  double s = 0;
  for (std::size_t n = 0; n < x.v.size(); ++n) s += x.v[n] * y.v[n];
  return s;
}

inline double norm2(const EdgeField& x) { return std::sqrt(dot(x, x)); }
inline double norm2(const DualField& x) { return std::sqrt(dot(x, x)); }
inline double norm2(const NodeField& x) { return std::sqrt(dot(x, x)); }

inline double norm1(const EdgeField& x) {
  double s = 0;
  for (int a = 0; a < x.shape.axes(); ++a)
    for (double v : x.comp[a]) s += std::abs(v);
  return s;
}

}  // namespace curvex
