#include "curvex/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace curvex {
namespace fixtures {

namespace {

void stamp(NodeField& g, double i, double j, double radius, double value) {
  int lo_i = std::max(0, int(std::floor(i - radius)));
  int hi_i = std::min(g.shape.rows() - 1, int(std::ceil(i + radius)));
  int lo_j = std::max(0, int(std::floor(j - radius)));
  int hi_j = std::min(g.shape.cols() - 1, int(std::ceil(j + radius)));
  for (int a = lo_i; a <= hi_i; ++a)
    for (int b = lo_j; b <= hi_j; ++b)
      if (std::hypot(a - i, b - j) <= radius)
        g.at(a, b) = std::min(g.at(a, b), value);
}

// 4-connected rasterization of the segment (i0,j0)-(i1,j1): every pixel the
// ideal line passes through, plus the connector so consecutive pixels share
// an edge.
void draw_segment_4c(NodeField& g, int i0, int j0, int i1, int j1,
                     double value) {
  int di = std::abs(i1 - i0), dj = std::abs(j1 - j0);
  int si = i0 < i1 ? 1 : -1, sj = j0 < j1 ? 1 : -1;
  int i = i0, j = j0;
  g.at(i, j) = std::min(g.at(i, j), value);
  int err = di - dj;
  while (i != i1 || j != j1) {
    int e2 = 2 * err;
    if (e2 > -dj && i != i1) {
      err -= dj;
      i += si;
    } else {
      err += di;
      j += sj;
    }
    g.at(i, j) = std::min(g.at(i, j), value);
  }
}

// Dense polyline rasterizer with stroke width, via disc stamps along the
// parametric curve.
template <typename Curve>
void draw_parametric(NodeField& g, Curve&& c, int samples, double value) {
  for (int t = 0; t <= samples; ++t) {
    auto [i, j, r] = c(double(t) / samples);
    stamp(g, i, j, r, value);
  }
}

void add_noise(NodeField& g, double amount, std::uint64_t seed) {
  if (amount <= 0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, amount);
  for (double& v : g.v) v = std::clamp(v + n(rng), 0.0, 1.0);
}

struct CommaGeometry {
  double ci, cj, r0;
  std::array<double, 3> at(double t) const {
    // head (t=0) to tail tip (t=1): angle sweeps ~200 degrees while the
    // radius decays and the stroke tapers
    double ang = -0.5 + 3.6 * t;
    double r = r0 * (1.0 - 0.45 * t);
    double width = std::max(0.8, 2.8 * (1.0 - t) + 0.6);
    return {ci + r * std::sin(ang), cj + r * std::cos(ang), width};
  }
};

CommaGeometry comma_geometry(int rows, int cols) {
  return {0.52 * rows, 0.48 * cols, 0.33 * std::min(rows, cols)};
}

}  // namespace

NodeField comma(int rows, int cols, double noise, std::uint64_t seed) {
  NodeField g(GridShape::planar(rows, cols));
  std::fill(g.v.begin(), g.v.end(), 1.0);
  auto geom = comma_geometry(rows, cols);
  draw_parametric(
      g, [&](double t) { return geom.at(t); }, 6 * std::max(rows, cols), 0.02);
  add_noise(g, noise, seed);
  return g;
}

DiracSet comma_endpoints(int rows, int cols) {
  auto geom = comma_geometry(rows, cols);
  auto head = geom.at(0.0);
  auto tail = geom.at(1.0);
  DiracMass a, b;
  a.i = int(std::lround(head[0]));
  a.j = int(std::lround(head[1]));
  a.sign = -1;
  b.i = int(std::lround(tail[0]));
  b.j = int(std::lround(tail[1]));
  b.sign = +1;
  return {a, b};
}

NodeField chromosomes(int rows, int cols, int count, std::uint64_t seed,
                      double noise) {
  NodeField g(GridShape::planar(rows, cols));
  std::fill(g.v.begin(), g.v.end(), 0.95);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<std::array<double, 2>> centers;
  const double margin = 14.0;
  const double min_sep = 0.115 * std::min(rows, cols);
  int placed = 0, guard = 0;
  while (placed < count && guard < 200000) {
    ++guard;
    double ci = margin + unif(rng) * (rows - 2 * margin);
    double cj = margin + unif(rng) * (cols - 2 * margin);
    bool ok = true;
    for (auto& c : centers)
      if (std::hypot(c[0] - ci, c[1] - cj) < 2.2 * min_sep) ok = false;
    if (!ok) continue;
    centers.push_back({ci, cj});
    ++placed;

    double ang = unif(rng) * 2 * M_PI;
    double len = (0.045 + 0.035 * unif(rng)) * std::min(rows, cols);
    double bend = (unif(rng) - 0.5) * 1.6;  // curvature of the stroke
    draw_parametric(
        g,
        [&](double t) -> std::array<double, 3> {
          double u = (t - 0.5) * 2 * len;
          double v = bend * (t - 0.5) * (t - 0.5) * len;
          double i = ci + u * std::cos(ang) - v * std::sin(ang);
          double j = cj + u * std::sin(ang) + v * std::cos(ang);
          return {i, j, 1.1};
        },
        64, 0.05);
  }
  if (placed < count)
    throw config_error("chromosomes fixture: could not place all strokes");
  add_noise(g, noise, seed + 1);
  return g;
}

CrossingFixture crossing_curves() {
  CrossingFixture fx{NodeField(GridShape::planar(25, 40)), {}, {}, 16};
  std::fill(fx.g.v.begin(), fx.g.v.end(), 1.0);

  // V: (4,8) -> apex (14,18) -> (4,28); horizontal stroke row 9, cols 4..34.
  draw_segment_4c(fx.g, 4, 8, 14, 18, 0.08);
  draw_segment_4c(fx.g, 14, 18, 4, 28, 0.08);
  draw_segment_4c(fx.g, 9, 4, 9, 34, 0.08);
  fx.g.at(14, 18) = 0.01;  // apex: cheapest spot to concentrate the turn

  auto mass = [](int i, int j, int sign, int k) {
    DiracMass m;
    m.i = i;
    m.j = j;
    m.sign = sign;
    m.third = k;
    return m;
  };
  // Exact angle bins for K = 16 (quantum 22.5 deg, angle measured from the
  // row axis): V legs at 45 (k=2) and 135 (k=6), the horizontal at 90 (k=4).
  fx.lifted = {mass(4, 8, -1, 2), mass(4, 28, +1, 6), mass(9, 4, -1, 4),
               mass(9, 34, +1, 4)};
  fx.planar = fx.lifted;
  for (auto& m : fx.planar) m.third = -1;
  return fx;
}

GroundTruthFixture straight_segment(int rows, int cols) {
  GroundTruthFixture fx{NodeField(GridShape::planar(rows, cols)), {}};
  std::fill(fx.g.v.begin(), fx.g.v.end(), 1.0);
  const int row = rows / 2;
  const int j0 = cols / 5, j1 = cols - cols / 5 - 1;
  draw_segment_4c(fx.g, row, j0, row, j1, 0.0);
  fx.true_endpoints = {{row, j0}, {row, j1}};
  return fx;
}

GroundTruthFixture quarter_circle(int rows, int cols) {
  GroundTruthFixture fx{NodeField(GridShape::planar(rows, cols)), {}};
  std::fill(fx.g.v.begin(), fx.g.v.end(), 1.0);
  const double ci = rows * 0.2, cj = cols * 0.2;
  const double r = 0.55 * std::min(rows, cols);
  int prev_i = -1, prev_j = -1, first_i = 0, first_j = 0;
  const int samples = 8 * int(r);
  for (int t = 0; t <= samples; ++t) {
    double ang = 0.5 * M_PI * t / samples;
    int i = int(std::lround(ci + r * std::sin(ang)));
    int j = int(std::lround(cj + r * std::cos(ang)));
    if (prev_i < 0) {
      first_i = i;
      first_j = j;
      fx.g.at(i, j) = 0.0;
    } else if (i != prev_i || j != prev_j) {
      draw_segment_4c(fx.g, prev_i, prev_j, i, j, 0.0);
    }
    prev_i = i;
    prev_j = j;
  }
  fx.true_endpoints = {{first_i, first_j}, {prev_i, prev_j}};
  return fx;
}

VolumeFixture helix_volume(int rows, int cols, int depth) {
  VolumeFixture fx{NodeField(GridShape::volume(rows, cols, depth)), {}};
  std::fill(fx.g.v.begin(), fx.g.v.end(), 1.0);
  const double ci = rows / 2.0, cj = cols / 2.0;
  const double r = 0.3 * std::min(rows, cols);
  const int samples = 12 * std::max(rows, depth);
  std::array<int, 3> first{}, last{};
  for (int t = 0; t <= samples; ++t) {
    double u = double(t) / samples;
    double ang = 3.0 * M_PI * u;
    double i = ci + r * std::cos(ang);
    double j = cj + r * std::sin(ang);
    double k = 3 + u * (depth - 7);
    int lo_i = std::max(0, int(i) - 1), hi_i = std::min(rows - 1, int(i) + 1);
    int lo_j = std::max(0, int(j) - 1), hi_j = std::min(cols - 1, int(j) + 1);
    int lo_k = std::max(0, int(k) - 1), hi_k = std::min(depth - 1, int(k) + 1);
    for (int a = lo_i; a <= hi_i; ++a)
      for (int b = lo_j; b <= hi_j; ++b)
        for (int c = lo_k; c <= hi_k; ++c)
          if (std::sqrt((a - i) * (a - i) + (b - j) * (b - j) +
                        (c - k) * (c - k)) <= 1.4)
            fx.g.at(a, b, c) = 0.05;
    if (t == 0) first = {int(std::lround(i)), int(std::lround(j)), int(std::lround(k))};
    last = {int(std::lround(i)), int(std::lround(j)), int(std::lround(k))};
  }
  DiracMass a, b;
  a.i = first[0];
  a.j = first[1];
  a.third = first[2];
  a.sign = -1;
  b.i = last[0];
  b.j = last[1];
  b.third = last[2];
  b.sign = +1;
  fx.endpoints = {a, b};
  return fx;
}

}  // namespace fixtures
}  // namespace curvex
