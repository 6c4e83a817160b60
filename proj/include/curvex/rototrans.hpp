#pragma once

#include <string>

#include "curvex/angles.hpp"
#include "curvex/endpoints.hpp"
#include "curvex/pdhg.hpp"

namespace curvex {

/// +/-1 at node (i, j, k) of the lifted grid.
NodeField lifted_dirac(const GridShape& lifted, int i, int j, int k, int sign);

/// Sums the two spatial staggered components over the angle axis, producing
/// the planar field whose divergence is the angle-marginal of the lifted one.
EdgeField marginalize(const EdgeField& lifted_z);

struct LiftedSolveResult {
  SolverState state;                 // lifted iterates and diagnostics
  EdgeField planar;                  // marginalized field
  std::vector<TracedCurve> curves;   // traced from the marginalized field
};

/// Runs the saddle-point solver with the lifted dual projection, then
/// marginalizes and traces. Endpoints carry (i, j, angle index, sign).
LiftedSolveResult solve_lifted(const EnergySpec& spec, const DiracSet& endpoints,
                               int K, const SolverConfig& config,
                               const LaplacianSpectrum* spectrum = nullptr,
                               const SolverState* warm = nullptr);

/// Largest single-spot direction change along a traced lifted curve: the
/// longest run of consecutive angle moves, in radians (run length * 2 pi / K).
/// Planar 4-connected polylines only bend in 90-degree quanta, so turning is
/// measured in the lifted domain where a direction jump shows up as stacked
/// angle moves at one pixel.
double max_step_turning(const TracedCurve& curve, int K);

/// Thresholded voxel dump of the node speed |Az| for external 3D viewers:
/// a `VOXELS <count>` header followed by `i j k value` lines.
void dump_voxels(const std::string& path, const EdgeField& lifted_z,
                 double threshold);

}  // namespace curvex
