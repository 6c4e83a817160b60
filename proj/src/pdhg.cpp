#include "curvex/pdhg.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <ostream>
#include <sstream>

namespace curvex {

EdgeField SolverState::averaged_z() const {
  EdgeField out = z_sum;
  if (steps > 0)
    for (int a = 0; a < out.shape.axes(); ++a)
      for (auto& v : out.comp[a]) v /= double(steps);
  return out;
}

DualField SolverState::averaged_p() const {
  DualField out = p_sum;
  if (steps > 0)
    for (int a = 0; a < out.shape.axes(); ++a)
      for (auto& v : out.comp[a]) v /= double(steps);
  return out;
}

void default_step_sizes(const GridShape& shape, AveragingMode mode, double& tau,
                        double& sigma) {
  const double norm = operator_norm(shape, mode);
  const double s4 = std::pow(double(shape.node_count()), 0.25);
  tau = 0.99 / (norm * s4);
  sigma = s4 / norm;
}

namespace {

double check_mu(const NodeField& mu) {
  double total = 0;
  for (double v : mu.v) total += v;
  return total;
}

double feasibility(const EdgeField& z, const NodeField& mu) {
  NodeField d = divergence_adjoint(z);
  double worst = 0;
  for (std::size_t n = 0; n < d.v.size(); ++n)
    worst = std::max(worst, std::abs(d.v[n] - mu.v[n]));
  return worst;
}

}  // namespace

SolverState solve(const EnergySpec& spec, const NodeField& mu,
                  const SolverConfig& config, const LaplacianSpectrum* spectrum,
                  const SolverState* warm) {
  const GridShape& shape = mu.shape;
  spec.validate_grid(shape);
  if (std::abs(check_mu(mu)) > 1e-9)
    throw config_error("solve: divergence data must have zero total mass");

  std::unique_ptr<LaplacianSpectrum> owned;
  if (!spectrum) {
    owned = std::make_unique<LaplacianSpectrum>(shape);
    spectrum = owned.get();
  }

  const AveragingMode mode = averaging_mode(spec.family);
  const bool roto = is_roto(spec.family);
  const AngleTable angles =
      roto ? AngleTable::make(shape.dim(2)) : AngleTable{};

  double tau = config.tau, sigma = config.sigma;
  if (tau <= 0 || sigma <= 0) default_step_sizes(shape, mode, tau, sigma);

  SolverState st(shape);
  if (warm) {
    st.z = spectrum->project_divergence(warm->z, mu);
    st.p = warm->p;
  } else {
    EdgeField zero(shape);
    st.z = spectrum->project_divergence(zero, mu);
  }
  st.z_extrapolated = st.z;

  const auto t0 = std::chrono::steady_clock::now();
  const int window = 5;  // checkpoints covered by the energy stop window
  std::vector<double> recent_energy;

  for (long long n = 1; n <= config.max_steps; ++n) {
    // dual ascent + projection
    DualField az = average(st.z_extrapolated, mode);
    axpy(st.p, sigma, az);
    st.p = roto ? project_dual_roto(std::move(st.p), spec, angles)
                : project_dual(std::move(st.p), spec);

    // primal descent + re-projection onto the divergence constraint
    EdgeField grad_step = average_adjoint(st.p, mode);
    EdgeField z_new = st.z;
    axpy(z_new, -tau, grad_step);
    z_new = spectrum->project_divergence(z_new, mu);

    // extrapolation: 2 z^{n+1} - z^n
    st.z_extrapolated = z_new;
    axpy(st.z_extrapolated, 1.0, z_new);
    axpy(st.z_extrapolated, -1.0, st.z);
    st.z = std::move(z_new);

    axpy(st.z_sum, 1.0, st.z);
    axpy(st.p_sum, 1.0, st.p);
    st.steps += 1;

    if (n % config.check_every == 0 || n == config.max_steps) {
      CheckpointRecord rec;
      rec.step = n;
      rec.energy = diagnostic_energy(st.z, spec);
      rec.feas = feasibility(st.z, mu);
      rec.gap = gap_surrogate(st, spec, mu, *spectrum).gap;
      rec.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
      if (!std::isfinite(rec.energy) || !std::isfinite(rec.feas)) {
        std::ostringstream msg;
        msg << "solve: non-finite iterate detected at step " << n;
        throw numeric_error(msg.str());
      }
      st.log.push_back(rec);

      if (config.energy_rel_tol > 0) {
        recent_energy.push_back(rec.energy);
        if (int(recent_energy.size()) > window)
          recent_energy.erase(recent_energy.begin());
        if (int(recent_energy.size()) == window &&
            std::abs(recent_energy.back() - recent_energy.front()) <=
                config.energy_rel_tol * (std::abs(rec.energy) + 1e-12) &&
            rec.feas <= config.feas_tol)
          break;
      }
    }
  }
  return st;
}

GapSurrogate gap_surrogate(const SolverState& state, const EnergySpec& spec,
                           const NodeField& mu,
                           const LaplacianSpectrum& spectrum) {
  GapSurrogate out;
  EdgeField z_part = spectrum.project_divergence(EdgeField(mu.shape), mu);
  DualField p_avg = state.averaged_p();
  EdgeField w = average_adjoint(p_avg, averaging_mode(spec.family));
  out.dual_value = dot(z_part, w);
  out.gap = diagnostic_energy(state.averaged_z(), spec) - out.dual_value;

  NodeField dw = divergence_adjoint(w);
  EdgeField range_part = gradient(spectrum.solve_poisson(dw));
  axpy(range_part, -1.0, w);
  out.dual_defect = norm2(range_part);
  return out;
}

void write_log(std::ostream& os, const std::vector<CheckpointRecord>& log) {
  for (const auto& r : log)
    os << r.step << ' ' << r.energy << ' ' << r.feas << ' ' << r.gap << ' '
       << r.wall_ms << '\n';
}

}  // namespace curvex
