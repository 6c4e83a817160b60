#pragma once

#include <cstdint>
#include <vector>

#include "curvex/diracs.hpp"
#include "curvex/grid.hpp"

namespace curvex {
namespace fixtures {

/// Synthetic stand-ins for the kinds of inputs the pipeline targets. All
/// generators are deterministic given their seed. Strokes are rasterized
/// 4-connected so a unit flow can follow them without leaving the dark set.

/// A noisy comma: a tapering spiral arc, dark on a light background.
NodeField comma(int rows, int cols, double noise = 0.08,
                std::uint64_t seed = 7);

/// The comma's two stroke endpoints (head first), as planar Dirac masses
/// (-1 at the head, +1 at the tail tip).
DiracSet comma_endpoints(int rows, int cols);

/// `count` short, gently curved, well-separated dark strokes.
NodeField chromosomes(int rows, int cols, int count = 42,
                      std::uint64_t seed = 11, double noise = 0.05);

/// Two crossing curves on a 25 x 40 grid: a V with 45-degree legs and a
/// 90-degree turn at its (extra dark) apex, crossed twice by a horizontal
/// stroke. Used to compare curvature energies.
struct CrossingFixture {
  NodeField g;          // 25 rows x 40 cols potential
  DiracSet planar;      // 4 planar endpoints
  DiracSet lifted;      // same endpoints with exact angle bins for K = 16
  int K = 16;
};
CrossingFixture crossing_curves();

/// A dark horizontal segment (g = 0) on a light background, plus its true
/// endpoint pixels.
struct GroundTruthFixture {
  NodeField g;
  std::vector<std::array<int, 2>> true_endpoints;
};
GroundTruthFixture straight_segment(int rows = 32, int cols = 32);

/// A dark quarter-circle arc with its two true endpoints.
GroundTruthFixture quarter_circle(int rows = 40, int cols = 40);

/// A 3D potential carrying a dark helical curve, with the curve's end
/// voxels as volume Dirac masses.
struct VolumeFixture {
  NodeField g;
  DiracSet endpoints;
};
VolumeFixture helix_volume(int rows = 70, int cols = 70, int depth = 30);

}  // namespace fixtures
}  // namespace curvex
