#include "curvex/energies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace curvex {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp(double x, double lo, double hi) {
  return std::min(std::max(x, lo), hi);
}
}  // namespace

void EnergySpec::validate_grid(const GridShape& grid) const {
  if (is_roto(family)) {
    if (grid.mode() != GridMode::Lifted)
      throw config_error("curvature families need a lifted grid");
    if (weight.shape.mode() != GridMode::Planar ||
        weight.shape.rows() != grid.rows() || weight.shape.cols() != grid.cols())
      throw config_error("lifted weight must be a planar rows x cols field");
  } else {
    if (grid.mode() == GridMode::Lifted)
      throw config_error("non-curvature families do not run on lifted grids");
    if (!(weight.shape == grid))
      throw config_error("weight shape does not match the grid");
  }
}

double HalfPlaneSetSpec::membership_residual(double a, double b) const {
  switch (family) {
    case EnergyFamily::RotoTAC:
      return std::max(a - 1.0, std::abs(b) - alpha);
    case EnergyFamily::RotoTRL: {
      double ap = std::max(0.0, a);
      return ap * ap + (b / alpha) * (b / alpha) - 1.0;
    }
    case EnergyFamily::RotoEL:
      return a + b * b / (4.0 * alpha * alpha) - 1.0;
    default:
      throw config_error("membership_residual: not a curvature family");
  }
}

namespace {

// Newton with a maintained bracket [lo, hi], F(lo) >= 0 >= F(hi). Falls back
// to 64 bisection steps if the iteration budget runs out.
template <typename F, typename dF>
double safeguarded_root(F f, dF df, double lo, double hi, double tol,
                        int max_iter, double x0) {
  double x = clamp(x0, lo, hi);
  for (int it = 0; it < max_iter; ++it) {
    double v = f(x);
    if (std::abs(v) <= tol) return x;
    (v > 0 ? lo : hi) = x;
    double d = df(x);
    double step = (d != 0) ? x - v / d : lo - 1;  // force bisection if flat
    x = (step > lo && step < hi) ? step : 0.5 * (lo + hi);
  }
  for (int it = 0; it < 64; ++it) {
    double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::array<double, 2> project_trl(double a, double b, double alpha, double tol,
                                  int max_iter) {
  if (a <= 0) return {a, clamp(b, -alpha, alpha)};
  if (alpha == 1.0) {
    double r = std::hypot(a, b);
    return {a / r, b / r};  // caller guarantees we are outside, so r > 1
  }
  const double a2 = alpha * alpha;
  // KKT for the ellipse arc: x = a/(1+2L), y = b/(1+2L/alpha^2), find L >= 0
  // with x^2 + (y/alpha)^2 = 1.
  auto F = [&](double L) {
    double x = a / (1 + 2 * L);
    double y = b / (1 + 2 * L / a2);
    return x * x + (y / alpha) * (y / alpha) - 1.0;
  };
  auto dF = [&](double L) {
    double u = 1 + 2 * L, w = 1 + 2 * L / a2;
    return -4 * a * a / (u * u * u) - (4 / a2) * (b / alpha) * (b / alpha) / (w * w * w);
  };
  double R = std::sqrt(a * a + (b / alpha) * (b / alpha));
  double m = std::min(1.0, 1.0 / a2);
  double hi = (R - 1) / (2 * m) + 1e-12;
  double L = safeguarded_root(F, dF, 0.0, hi, tol, max_iter, (R - 1) / 2);
  return {a / (1 + 2 * L), b / (1 + 2 * L / a2)};
}

std::array<double, 2> project_el(double a, double b, double alpha, double tol,
                                 int max_iter) {
  const double c = 4.0 * alpha * alpha;  // (2 alpha)^2
  // KKT for the parabola boundary: x = a - L, y = b/(1+2L/c), find L >= 0
  // with x + y^2/c = 1.
  auto F = [&](double L) {
    double y = b / (1 + 2 * L / c);
    return a - L + y * y / c - 1.0;
  };
  auto dF = [&](double L) {
    double w = 1 + 2 * L / c;
    return -1.0 - (4 * b * b / (c * c)) / (w * w * w);
  };
  double hi = a - 1 + b * b / c + 1e-12;
  double L = safeguarded_root(F, dF, 0.0, hi, tol, max_iter, 0.0);
  return {a - L, b / (1 + 2 * L / c)};
}

}  // namespace

std::array<double, 2> project_halfplane_set(double a, double b,
                                            const HalfPlaneSetSpec& set,
                                            double tol, int max_iter) {
  if (set.family == EnergyFamily::RotoTAC)
    return {std::min(a, 1.0), clamp(b, -set.alpha, set.alpha)};
  if (set.contains(a, b)) return {a, b};
  std::array<double, 2> q =
      set.family == EnergyFamily::RotoTRL
          ? project_trl(a, b, set.alpha, tol, max_iter)
          : project_el(a, b, set.alpha, tol, max_iter);
  if (set.membership_residual(q[0], q[1]) > 1e-10) {
    std::ostringstream msg;
    msg << "project_halfplane_set: infeasible result for (" << a << ", " << b
        << "), residual " << set.membership_residual(q[0], q[1]);
    throw numeric_error(msg.str());
  }
  return q;
}

double perspective_value(EnergyFamily family, double alpha, double s, double t) {
  if (s < 0) return kInf;
  switch (family) {
    case EnergyFamily::RotoTAC:
      return s + alpha * std::abs(t);
    case EnergyFamily::RotoTRL:
      return std::hypot(s, alpha * t);
    case EnergyFamily::RotoEL:
      if (s == 0) return t == 0 ? 0.0 : kInf;
      return s + alpha * alpha * t * t / s;
    default:
      throw config_error("perspective_value: not a curvature family");
  }
}

namespace {

// Support function of the family's dual set truncated to {a >= -3}; finite
// everywhere and equal to hbar on its finiteness domain with s >= 0.
double truncated_perspective(EnergyFamily family, double alpha, double s,
                             double t) {
  const double sp = std::max(s, 0.0), sm = std::max(-s, 0.0);
  const double r = alpha * std::abs(t);
  switch (family) {
    case EnergyFamily::RotoTAC:
      return sp + 3 * sm + r;
    case EnergyFamily::RotoTRL:
      return s >= 0 ? std::hypot(s, alpha * t) : 3 * sm + r;
    case EnergyFamily::RotoEL:
      if (s > 0 && r <= 2 * s) return s + r * r / s;
      return -3 * s + 4 * r;
    default:
      throw config_error("truncated_perspective: not a curvature family");
  }
}

template <bool Strict>
double roto_energy(const EdgeField& z, const EnergySpec& spec) {
  const GridShape& g = z.shape;
  const AngleTable angles = AngleTable::make(g.dim(2));
  DualField v = average(z, AveragingMode::Averaged);
  double total = 0;
  std::size_t n = 0;
  for (int i = 0; i < g.dim(0); ++i)
    for (int j = 0; j < g.dim(1); ++j) {
      const double w = spec.weight.at(i, j);
      for (int k = 0; k < g.dim(2); ++k, ++n) {
        const double v0 = v.comp[0][n], v1 = v.comp[1][n], t = v.comp[2][n];
        const double lam = v0 * angles.c[k] + v1 * angles.s[k];
        const double orth = std::abs(v1 * angles.c[k] - v0 * angles.s[k]);
        if constexpr (Strict) {
          if (orth > 1e-9 * (std::hypot(v0, v1) + 1e-30)) return kInf;
          total += w * perspective_value(spec.family, spec.alpha, lam, t);
          if (!std::isfinite(total)) return kInf;
        } else {
          total += w * (truncated_perspective(spec.family, spec.alpha, lam, t) +
                        orth);
        }
      }
    }
  return total;
}

double planar_energy(const EdgeField& z, const EnergySpec& spec) {
  DualField v = average(z, averaging_mode(spec.family));
  const int ax = z.shape.axes();
  double total = 0;
  for (std::size_t n = 0; n < z.shape.node_count(); ++n) {
    double nrm;
    if (spec.family == EnergyFamily::L1) {
      nrm = 0;
      for (int a = 0; a < ax; ++a) nrm += std::abs(v.comp[a][n]);
    } else {
      nrm = 0;
      for (int a = 0; a < ax; ++a) nrm += v.comp[a][n] * v.comp[a][n];
      nrm = std::sqrt(nrm);
    }
    total += spec.weight.v[n] * nrm;
  }
  return total;
}

}  // namespace

double primal_energy(const EdgeField& z, const EnergySpec& spec) {
  spec.validate_grid(z.shape);
  return is_roto(spec.family) ? roto_energy<true>(z, spec)
                              : planar_energy(z, spec);
}

double diagnostic_energy(const EdgeField& z, const EnergySpec& spec) {
  spec.validate_grid(z.shape);
  return is_roto(spec.family) ? roto_energy<false>(z, spec)
                              : planar_energy(z, spec);
}

DualField project_dual(DualField p, const EnergySpec& spec) {
  if (is_roto(spec.family))
    throw config_error("project_dual: use project_dual_roto for curvature families");
  spec.validate_grid(p.shape);
  const int ax = p.shape.axes();
  for (std::size_t n = 0; n < p.shape.node_count(); ++n) {
    const double g = spec.weight.v[n];
    if (g == 0) {
      for (int a = 0; a < ax; ++a) p.comp[a][n] = 0;
      continue;
    }
    if (spec.family == EnergyFamily::L1) {
      for (int a = 0; a < ax; ++a) p.comp[a][n] = clamp(p.comp[a][n], -g, g);
    } else {
      double r2 = 0;
      for (int a = 0; a < ax; ++a) r2 += p.comp[a][n] * p.comp[a][n];
      if (r2 > g * g) {
        double scale = g / std::sqrt(r2);
        for (int a = 0; a < ax; ++a) p.comp[a][n] *= scale;
      }
    }
  }
  return p;
}

DualField project_dual_roto(DualField p, const EnergySpec& spec,
                            const AngleTable& angles) {
  spec.validate_grid(p.shape);
  const GridShape& s = p.shape;
  if (angles.K != s.dim(2))
    throw config_error("project_dual_roto: angle table does not match grid");
  const HalfPlaneSetSpec set{spec.family, spec.alpha};
  std::size_t n = 0;
  for (int i = 0; i < s.dim(0); ++i)
    for (int j = 0; j < s.dim(1); ++j) {
      const double g = spec.weight.at(i, j);
      for (int k = 0; k < s.dim(2); ++k, ++n) {
        if (g == 0) {
          p.comp[0][n] = p.comp[1][n] = p.comp[2][n] = 0;
          continue;
        }
        const double px = p.comp[0][n], py = p.comp[1][n];
        const double tang = px * angles.c[k] + py * angles.s[k];
        std::array<double, 2> ab;
        try {
          ab = project_halfplane_set(tang / g, p.comp[2][n] / g, set);
        } catch (const numeric_error& e) {
          std::ostringstream msg;
          msg << e.what() << " at node (" << i << "," << j << "," << k << ")";
          throw numeric_error(msg.str());
        }
        const double a = g * ab[0], b = g * ab[1];
        p.comp[0][n] = px + (a - tang) * angles.c[k];
        p.comp[1][n] = py + (a - tang) * angles.s[k];
        p.comp[2][n] = b;
      }
    }
  return p;
}

}  // namespace curvex
