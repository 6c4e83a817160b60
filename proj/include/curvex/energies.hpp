#pragma once

#include <array>
#include <optional>

#include "curvex/angles.hpp"
#include "curvex/grid.hpp"
#include "curvex/ops.hpp"

namespace curvex {

enum class EnergyFamily { L1, L2Forward, L2Averaged, RotoTAC, RotoTRL, RotoEL };

inline bool is_roto(EnergyFamily f) {
  return f == EnergyFamily::RotoTAC || f == EnergyFamily::RotoTRL ||
         f == EnergyFamily::RotoEL;
}

/// L1 and the forward-l2 family share the forward node stencil; everything
/// else (including the lifted families) uses true two-edge averaging.
inline AveragingMode averaging_mode(EnergyFamily f) {
  return (f == EnergyFamily::L1 || f == EnergyFamily::L2Forward)
             ? AveragingMode::Forward
             : AveragingMode::Averaged;
}

/// Energy selector plus its data: the weight field g (0 <= g <= 1; a planar
/// field broadcast over the angle axis for the lifted families) and the
/// curvature parameter alpha (lifted families only).
struct EnergySpec {
  EnergyFamily family = EnergyFamily::L2Averaged;
  NodeField weight;
  double alpha = 0.0;
  std::optional<double> gmax;

  EnergySpec(EnergyFamily f, NodeField g, double a = 0.0)
      : family(f), weight(std::move(g)), alpha(a) {
    for (double w : weight.v)
      if (!(w >= 0.0 && w <= 1.0))
        throw config_error("energy weight must lie in [0,1]");
    if (is_roto(family) && !(alpha > 0))
      throw config_error("curvature families need alpha > 0");
    if (!is_roto(family) && alpha != 0)
      throw config_error("alpha is only meaningful for curvature families");
  }

  /// Checks that the weight matches `grid`: same shape for non-lifted
  /// grids, planar rows x cols for lifted ones.
  void validate_grid(const GridShape& grid) const;

  /// Weight seen by node (i,j,k) of `grid`.
  double weight_at(const GridShape& grid, int i, int j, int k = 0) const {
    (void)grid;
    return is_roto(family) ? weight.at(i, j) : weight.at(i, j, k);
  }
};

/// The planar dual constraint set C_hbar of a curvature family, in the
/// (a, b) = (tangential spatial dual, angular dual) plane:
///   TAC: { a <= 1, |b| <= alpha }
///   TRL: { max(0,a)^2 + (b/alpha)^2 <= 1 }
///   EL : { a + b^2/(2 alpha)^2 <= 1 }
/// All three contain (0,0) and have (1,0) on the boundary.
struct HalfPlaneSetSpec {
  EnergyFamily family = EnergyFamily::RotoEL;
  double alpha = 1.0;

  /// Positive when (a,b) lies outside; <= 0 inside.
  double membership_residual(double a, double b) const;
  bool contains(double a, double b, double tol = 0.0) const {
    return membership_residual(a, b) <= tol;
  }
};

/// Euclidean projection onto C_hbar. TAC is a coordinatewise clamp; TRL with
/// alpha = 1 is radial on the right half-plane; the remaining cases run a
/// safeguarded Newton iteration on the scalar KKT equation with a bisection
/// fallback. Throws numeric_error if the result is still infeasible beyond
/// 1e-10 after the fallback.
std::array<double, 2> project_halfplane_set(double a, double b,
                                            const HalfPlaneSetSpec& set,
                                            double tol = 1e-12,
                                            int max_iter = 30);

/// Perspective/recession value of the curvature integrand:
/// hbar(s,t) = s f(t/s) for s > 0, the recession of f at s = 0, +inf for
/// s < 0. Returns +inf where the family dictates.
double perspective_value(EnergyFamily family, double alpha, double s, double t);

/// Weighted primal energy sum g * ||Az|| (family norm). Lifted families
/// evaluate g * h(theta_k, (Az)) and return +inf if any node's spatial
/// component strays from its angle direction beyond a 1e-9 relative
/// collinearity tolerance.
double primal_energy(const EdgeField& z, const EnergySpec& spec);

/// Finite substitute for primal_energy used for checkpoint logging in the
/// lifted families (equal to it on collinear fields): the dual set is
/// truncated to {a >= -3} and the free orthogonal dual component to the unit
/// ball before taking the support function. For the non-lifted families this
/// is exactly primal_energy.
double diagnostic_energy(const EdgeField& z, const EnergySpec& spec);

/// Per-node projection onto { ||p_n||_* <= g_n } for the non-lifted
/// families: coordinate clamp for L1, radial scaling for the l2 families.
/// Nodes with g = 0 map to zero.
DualField project_dual(DualField p, const EnergySpec& spec);

/// Per-node projection onto the lifted constraint set: the (tangential,
/// angular) pair is projected onto g * C_hbar and recombined, leaving the
/// orthogonal spatial component untouched. Newton failures are rethrown with
/// the node coordinates attached.
DualField project_dual_roto(DualField p, const EnergySpec& spec,
                            const AngleTable& angles);

}  // namespace curvex
