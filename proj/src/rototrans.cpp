#include "curvex/rototrans.hpp"

#include <cmath>
#include <fstream>

namespace curvex {

NodeField lifted_dirac(const GridShape& lifted, int i, int j, int k, int sign) {
  if (lifted.mode() != GridMode::Lifted)
    throw config_error("lifted_dirac: grid is not lifted");
  if (!lifted.in_bounds(i, j, k))
    throw config_error("lifted_dirac: index out of range");
  NodeField mu(lifted);
  mu.at(i, j, k) = sign;
  return mu;
}

EdgeField marginalize(const EdgeField& lifted_z) {
  const GridShape& s = lifted_z.shape;
  if (s.mode() != GridMode::Lifted)
    throw config_error("marginalize: field is not lifted");
  GridShape planar = GridShape::planar(s.rows(), s.cols());
  EdgeField out(planar);
  const int K = s.dim(2);
  for (int a = 0; a < 2; ++a) {
    const int d0 = (a == 0) ? s.edge_dim(0) : s.dim(0);
    const int d1 = (a == 1) ? s.edge_dim(1) : s.dim(1);
    for (int i = 0; i < d0; ++i)
      for (int j = 0; j < d1; ++j) {
        double sum = 0;
        for (int k = 0; k < K; ++k) sum += lifted_z.at(a, i, j, k);
        out.comp[a][planar.edge_index(a, i, j)] = sum;
      }
  }
  return out;
}

LiftedSolveResult solve_lifted(const EnergySpec& spec, const DiracSet& endpoints,
                               int K, const SolverConfig& config,
                               const LaplacianSpectrum* spectrum,
                               const SolverState* warm) {
  if (!is_roto(spec.family))
    throw config_error("solve_lifted: spec is not a curvature family");
  GridShape lifted = GridShape::lifted(spec.weight.shape.rows(),
                                       spec.weight.shape.cols(), K);
  NodeField mu = build_mu(lifted, endpoints);

  LiftedSolveResult out{solve(spec, mu, config, spectrum, warm),
                        EdgeField(GridShape::planar(2, 2)),
                        {}};
  out.planar = marginalize(out.state.z);

  DiracSet planar_masses = endpoints;
  for (auto& m : planar_masses) m.third = -1;
  out.curves = trace_curves(out.planar, planar_masses);
  return out;
}

double max_step_turning(const TracedCurve& curve, int K) {
  const double quantum = 2.0 * M_PI / K;
  int run = 0, longest = 0;
  for (std::size_t n = 1; n < curve.nodes.size(); ++n) {
    const auto& a = curve.nodes[n - 1];
    const auto& b = curve.nodes[n];
    const bool angle_move = (a[0] == b[0] && a[1] == b[1] && a[2] != b[2]);
    run = angle_move ? run + 1 : 0;
    longest = std::max(longest, run);
  }
  return longest * quantum;
}

void dump_voxels(const std::string& path, const EdgeField& lifted_z,
                 double threshold) {
  const GridShape& s = lifted_z.shape;
  DualField v = average(lifted_z, AveragingMode::Averaged);
  std::vector<std::array<double, 4>> rows;
  std::size_t n = 0;
  for (int i = 0; i < s.dim(0); ++i)
    for (int j = 0; j < s.dim(1); ++j)
      for (int k = 0; k < s.dim(2); ++k, ++n) {
        double mag = std::sqrt(v.comp[0][n] * v.comp[0][n] +
                               v.comp[1][n] * v.comp[1][n] +
                               v.comp[2][n] * v.comp[2][n]);
        if (mag >= threshold)
          rows.push_back({double(i), double(j), double(k), mag});
      }
  std::ofstream os(path);
  if (!os) throw config_error("dump_voxels: cannot open " + path);
  os << "VOXELS " << rows.size() << "\n";
  for (const auto& r : rows)
    os << int(r[0]) << ' ' << int(r[1]) << ' ' << int(r[2]) << ' ' << r[3]
       << "\n";
}

}  // namespace curvex
