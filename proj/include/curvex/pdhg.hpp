#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "curvex/energies.hpp"
#include "curvex/grid.hpp"
#include "curvex/spectral.hpp"

namespace curvex {

/// Step sizes and stopping policy for the saddle-point iteration.
///
/// tau/sigma <= 0 requests the defaults tau = 0.99/(||A|| S^(1/4)),
/// sigma = S^(1/4)/||A|| with S the node count, which keeps
/// tau sigma ||A||^2 <= 1. energy_rel_tol <= 0 disables the energy-window
/// stop, so the solver runs the full max_steps (the fixed-step mode).
struct SolverConfig {
  double tau = 0.0;
  double sigma = 0.0;
  int max_steps = 5000;
  int check_every = 50;
  double feas_tol = 1e-9;
  double energy_rel_tol = 0.0;
  std::uint64_t seed = 0;
};

struct CheckpointRecord {
  long long step = 0;
  double energy = 0;
  double feas = 0;
  double gap = 0;
  double wall_ms = 0;
};

/// Iterates plus running averages; reusable as a warm start for the next
/// solve (the primal part is re-projected onto the new constraint).
struct SolverState {
  EdgeField z;
  DualField p;
  EdgeField z_extrapolated;
  EdgeField z_sum;  // running sums; divide by steps for the averaged iterates
  DualField p_sum;
  long long steps = 0;
  std::vector<CheckpointRecord> log;

  explicit SolverState(const GridShape& s)
      : z(s), p(s), z_extrapolated(s), z_sum(s), p_sum(s) {}

  EdgeField averaged_z() const;
  DualField averaged_p() const;
};

/// Primal-dual solve of  min_{D*z = mu} sum g ||(Az)||  via projected dual
/// ascent / projected primal descent / extrapolation. The primal iterate is
/// re-projected onto the divergence constraint every step, so feasibility
/// holds at machine precision throughout. Diagnostics are recorded every
/// check_every steps as `step energy feas gap wallclock_ms` records.
///
/// `spectrum` may be shared across calls on the same shape; pass nullptr to
/// build one internally. `warm` seeds the iteration from a previous state.
SolverState solve(const EnergySpec& spec, const NodeField& mu,
                  const SolverConfig& config,
                  const LaplacianSpectrum* spectrum = nullptr,
                  const SolverState* warm = nullptr);

struct GapSurrogate {
  double gap = 0;          // diagnostic primal at averaged z  minus  dual value
  double dual_value = 0;   // <z_part, A* p_avg> for the fixed feasible z_part
  double dual_defect = 0;  // || A* p_avg - Proj_range(D) A* p_avg ||_2
};

/// Optimality surrogate at the averaged iterates. The dual value uses a
/// fixed feasible field (the projection of zero onto the constraint); the
/// defect reports how far A*p_avg is from the range of the gradient, which
/// is the part the exact partial gap would control via its bounded sets.
GapSurrogate gap_surrogate(const SolverState& state, const EnergySpec& spec,
                           const NodeField& mu,
                           const LaplacianSpectrum& spectrum);

/// Writes the diagnostics log as line-oriented records:
/// `step energy feas gap wallclock_ms`.
void write_log(std::ostream& os, const std::vector<CheckpointRecord>& log);

/// Builds the default step sizes for a shape/mode pair (exposed for tests
/// and for callers that pin step sizes once across many warm solves).
void default_step_sizes(const GridShape& shape, AveragingMode mode,
                        double& tau, double& sigma);

}  // namespace curvex
