#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "curvex/diracs.hpp"
#include "curvex/energies.hpp"
#include "curvex/grid.hpp"

namespace curvex {

struct BilevelConfig {
  int n_pairs = 1;
  double gmax = 0.5;
  int inner_steps = 60;
  int post_steps = 5000;
  int max_outer = 400;
  std::uint64_t seed = 0;
  int lifted_angles = 30;  // K of the lifted grid when the spec is a curvature family
  double theta_flux_threshold = 0.1;  // lifted mode, in units of mass
  double merge_overlap_frac = 0.5;
  double merge_angle_tol_deg = 30.0;
  bool grad_probe = false;  // optional post-convergence probe along grad g
  std::string snapshot_dir;  // per-iteration JSON dumps when non-empty
};

/// Draws n_pairs (+1,-1) pairs inside the sublevel set {g <= gmax}, the two
/// members of a pair within a 4x4 neighborhood of each other. lifted_K > 0
/// assigns uniformly random angle indices. Throws if the sublevel set is
/// empty.
DiracSet init_pairs(const NodeField& g, const BilevelConfig& config,
                    int lifted_K = 0);

/// Mean of the node-averaged planar flow over the 3x3 window around (i,j),
/// normalized; nullopt when the window carries no flow (magnitude < 1e-9).
std::optional<std::array<double, 2>> estimate_orientation(const EdgeField& z,
                                                          int i, int j);

enum class MoveCase { Shorten, LengthenCurve, LengthenOrtho, Shift, Converged, NoOrientation };

/// Applies the first matching move rule to the mass, given the planar flow
/// field and the weights. The shortening direction for a +1 mass points back
/// along the incoming flow, for a -1 mass along the outgoing flow (flow runs
/// from -1 toward +1). Cases: (a) shorten one pixel while g > gmax;
/// (b) lengthen onto the cheapest unvisited admissible pixel opposite or at
/// 45 deg of opposite; (c) same among the two orthogonal pixels; (d) same
/// among the two pixels at 45 deg of the shortening direction. The visited
/// set grows on (b)(c)(d) only, and a mass never shortens again after it has
/// lengthened.
MoveCase move_mass(DiracMass& mass, const EdgeField& planar_z,
                   const NodeField& g, double gmax);

/// Removes (+1,-1) pairs lying in each other's planar 3x3 neighborhood,
/// scanning row-major until no such pair remains.
void merge_close_opposites(DiracSet& masses);

struct TracedCurve {
  std::vector<std::array<int, 3>> nodes;  // (i, j, third-or-0)
  double flux = 0;
  int source = -1, sink = -1;  // indices into the traced DiracSet
};

/// Greedy flow decomposition: from each -1 mass, follow the incident edge of
/// maximum remaining outflow, peel off the path's bottleneck flux, and stop
/// on a +1 mass or when the flux falls under 1e-6. Works on planar, volume
/// and lifted grids. A path longer than the node count raises the cycle
/// guard.
std::vector<TracedCurve> trace_curves(const EdgeField& z, const DiracSet& masses);

/// Merges curve pairs that share at least overlap_frac of the shorter one's
/// planar nodes and whose end-to-end directions agree within angle_tol_deg:
/// the widest-separated (-,+) endpoint pair survives, the interior pair is
/// dropped. Returns the surviving masses.
DiracSet postprocess_merge(const std::vector<TracedCurve>& curves,
                           const DiracSet& masses, double overlap_frac = 0.5,
                           double angle_tol_deg = 30.0);

/// Angle-index update at a lifted mass: reads the two theta-staggered edges
/// at the node; when their sum exceeds the threshold in magnitude, k moves
/// one step in the direction that drains the boundary theta-flux --
/// +sign(flux) for a +1 mass and -sign(flux) for a -1 mass (documented
/// convention). Returns the new k.
int update_theta(const DiracMass& mass, const EdgeField& lifted_z,
                 double threshold);

struct BilevelResult {
  EdgeField z;                      // final solved field (lifted when roto)
  DiracSet masses;
  std::vector<TracedCurve> curves;  // traced from the final field
  int outer_iterations = 0;
};

/// The full endpoint-finding loop: init, repeated {warm solve, move every
/// mass, merge}, then trace/merge post-processing and one long final solve.
/// The potential g is spec.weight.
BilevelResult run_bilevel(const BilevelConfig& config, const EnergySpec& spec);

}  // namespace curvex
