#include "curvex/endpoints.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "curvex/pdhg.hpp"
#include "curvex/rototrans.hpp"

namespace curvex {

namespace {

// The eight neighbor offsets indexed by octant of the (row, col) direction
// angle atan2(dj, di); octant 0 points toward increasing rows.
constexpr int kOct[8][2] = {{1, 0}, {1, 1}, {0, 1},  {-1, 1},
                            {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};

int octant(double di, double dj) {
  double ang = std::atan2(dj, di);  // radians, paired with theta convention
  int s = int(std::lround(ang / (M_PI / 4.0)));
  return ((s % 8) + 8) % 8;
}

std::optional<std::array<double, 2>> orientation_from_avg(const DualField& v,
                                                          int i, int j) {
  const GridShape& s = v.shape;
  double vi = 0, vj = 0;
  int count = 0;
  for (int di = -1; di <= 1; ++di)
    for (int dj = -1; dj <= 1; ++dj) {
      int a = i + di, b = j + dj;
      if (!s.in_bounds(a, b)) continue;
      vi += v.at(0, a, b);
      vj += v.at(1, a, b);
      ++count;
    }
  if (count == 0) return std::nullopt;
  vi /= count;
  vj /= count;
  double mag = std::hypot(vi, vj);
  if (mag < 1e-9) return std::nullopt;
  return std::array<double, 2>{vi / mag, vj / mag};
}

MoveCase move_mass_impl(DiracMass& mass, const DualField& node_avg,
                        const NodeField& g, double gmax) {
  auto orient = orientation_from_avg(node_avg, mass.i, mass.j);
  if (!orient) return MoveCase::NoOrientation;

  // Flow runs from -1 toward +1; the curve shortens by pulling the endpoint
  // back onto it: against the flow for a sink, with it for a source.
  const double sdi = -mass.sign * (*orient)[0];
  const double sdj = -mass.sign * (*orient)[1];
  const int S = octant(sdi, sdj);
  const GridShape& shape = g.shape;

  if (g.at(mass.i, mass.j) > gmax) {
    // Shortening. A mass that has lengthened sits on g <= gmax by
    // construction, so this branch cannot fire for it.
    assert(mass.stage == MassStage::Shortening);
    int ti = mass.i + kOct[S][0], tj = mass.j + kOct[S][1];
    if (!shape.in_bounds(ti, tj)) {
      mass.converged = true;
      return MoveCase::Converged;
    }
    mass.i = ti;
    mass.j = tj;
    return MoveCase::Shorten;
  }

  auto try_case = [&](std::initializer_list<int> sectors) -> bool {
    int best_i = -1, best_j = -1;
    double best_g = 0;
    for (int sec : sectors) {
      int ti = mass.i + kOct[((sec % 8) + 8) % 8][0];
      int tj = mass.j + kOct[((sec % 8) + 8) % 8][1];
      if (!shape.in_bounds(ti, tj)) continue;
      double gv = g.at(ti, tj);
      if (gv > gmax) continue;
      if (mass.visited.count(std::uint64_t(ti) * shape.cols() + tj)) continue;
      bool better = best_i < 0 || gv < best_g ||
                    (gv == best_g && (ti < best_i || (ti == best_i && tj < best_j)));
      if (better) {
        best_i = ti;
        best_j = tj;
        best_g = gv;
      }
    }
    if (best_i < 0) return false;
    if (mass.stage == MassStage::Shortening) {
      mass.stage = MassStage::Lengthening;
      mass.visited.insert(mass.planar_key(shape));
    }
    mass.i = best_i;
    mass.j = best_j;
    mass.visited.insert(mass.planar_key(shape));
    return true;
  };

  if (try_case({S + 3, S + 4, S + 5})) return MoveCase::LengthenCurve;
  if (try_case({S + 2, S + 6})) return MoveCase::LengthenOrtho;
  if (try_case({S + 1, S + 7})) return MoveCase::Shift;
  mass.converged = true;
  return MoveCase::Converged;
}

}  // namespace

DiracSet init_pairs(const NodeField& g, const BilevelConfig& config,
                    int lifted_K) {
  if (g.shape.mode() != GridMode::Planar)
    throw config_error("init_pairs: potential must be planar");
  if (config.n_pairs < 1) throw config_error("init_pairs: n_pairs >= 1");
  if (!(config.gmax > 0 && config.gmax < 1))
    throw config_error("init_pairs: gmax must lie in (0,1)");

  std::vector<std::pair<int, int>> sublevel;
  for (int i = 0; i < g.shape.rows(); ++i)
    for (int j = 0; j < g.shape.cols(); ++j)
      if (g.at(i, j) <= config.gmax) sublevel.push_back({i, j});
  if (sublevel.empty())
    throw config_error("init_pairs: sublevel set {g <= gmax} is empty");

  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::size_t> pick(0, sublevel.size() - 1);
  DiracSet masses;
  for (int n = 0; n < config.n_pairs; ++n) {
    auto [ai, aj] = sublevel[pick(rng)];
    std::vector<std::pair<int, int>> near, near_distinct;
    for (int di = -2; di <= 2; ++di)
      for (int dj = -2; dj <= 2; ++dj) {
        int bi = ai + di, bj = aj + dj;
        if (!g.shape.in_bounds(bi, bj) || g.at(bi, bj) > config.gmax) continue;
        near.push_back({bi, bj});
        if (di != 0 || dj != 0) near_distinct.push_back({bi, bj});
      }
    auto& pool = near_distinct.empty() ? near : near_distinct;
    std::uniform_int_distribution<std::size_t> pickb(0, pool.size() - 1);
    auto [bi, bj] = pool[pickb(rng)];

    DiracMass src;
    src.i = ai;
    src.j = aj;
    src.sign = -1;
    DiracMass snk;
    snk.i = bi;
    snk.j = bj;
    snk.sign = +1;
    if (lifted_K > 0) {
      std::uniform_int_distribution<int> pickk(0, lifted_K - 1);
      src.third = pickk(rng);
      snk.third = pickk(rng);
    }
    masses.push_back(std::move(src));
    masses.push_back(std::move(snk));
  }
  return masses;
}

std::optional<std::array<double, 2>> estimate_orientation(const EdgeField& z,
                                                          int i, int j) {
  return orientation_from_avg(average(z, AveragingMode::Averaged), i, j);
}

MoveCase move_mass(DiracMass& mass, const EdgeField& planar_z,
                   const NodeField& g, double gmax) {
  return move_mass_impl(mass, average(planar_z, AveragingMode::Averaged), g,
                        gmax);
}

void merge_close_opposites(DiracSet& masses) {
  std::vector<bool> dead(masses.size(), false);
  auto order = [&](int lhs, int rhs) {
    return std::tie(masses[lhs].i, masses[lhs].j, lhs) <
           std::tie(masses[rhs].i, masses[rhs].j, rhs);
  };
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> plus, minus;
    for (int m = 0; m < int(masses.size()); ++m) {
      if (dead[m]) continue;
      (masses[m].sign > 0 ? plus : minus).push_back(m);
    }
    std::sort(plus.begin(), plus.end(), order);
    std::sort(minus.begin(), minus.end(), order);
    for (int p : plus) {
      for (int q : minus) {
        if (dead[q]) continue;
        if (std::abs(masses[p].i - masses[q].i) <= 1 &&
            std::abs(masses[p].j - masses[q].j) <= 1) {
          dead[p] = dead[q] = true;
          changed = true;
          break;
        }
      }
    }
  }
  DiracSet kept;
  for (int m = 0; m < int(masses.size()); ++m)
    if (!dead[m]) kept.push_back(std::move(masses[m]));
  masses = std::move(kept);
}

namespace {

struct EdgeRef {
  int axis;
  std::size_t index;
  double dir;  // +1 if the walk follows the edge orientation, else -1
};

// Enumerates the edges incident to node (i,j,k) with their outflow when
// leaving the node, honoring zero padding and the periodic angle axis.
template <typename F>
void for_each_outgoing(const EdgeField& z, int i, int j, int k, F&& f) {
  const GridShape& s = z.shape;
  const int pos[3] = {i, j, k};
  for (int a = 0; a < s.axes(); ++a) {
    // forward edge: stored at the node's own index along a
    if (s.periodic(a) || pos[a] + 1 < s.dim(a)) {
      std::size_t e = s.edge_index(a, i, j, k);
      f(EdgeRef{a, e, +1.0}, z.comp[a][e]);
    }
    // backward edge: stored one slot down (wrapping on the periodic axis)
    int bi = i, bj = j, bk = k;
    bool ok = true;
    int& back = (a == 0) ? bi : (a == 1 ? bj : bk);
    if (back > 0) {
      back -= 1;
    } else if (s.periodic(a)) {
      back = s.dim(a) - 1;
    } else {
      ok = false;
    }
    if (ok) {
      std::size_t e = s.edge_index(a, bi, bj, bk);
      f(EdgeRef{a, e, -1.0}, -z.comp[a][e]);
    }
  }
}

std::array<int, 3> step_node(const GridShape& s, std::array<int, 3> n,
                             const EdgeRef& e) {
  int delta = e.dir > 0 ? 1 : -1;
  n[e.axis] += delta;
  if (s.periodic(e.axis)) {
    if (n[e.axis] < 0) n[e.axis] += s.dim(e.axis);
    if (n[e.axis] >= s.dim(e.axis)) n[e.axis] -= s.dim(e.axis);
  }
  return n;
}

}  // namespace

std::vector<TracedCurve> trace_curves(const EdgeField& z,
                                      const DiracSet& masses) {
  constexpr double kFluxEps = 1e-6;
  const GridShape& s = z.shape;
  EdgeField residual = z;

  // Remaining absorption per sink mass, grouped by node.
  std::map<std::size_t, std::vector<int>> sinks_at;
  std::vector<double> sink_left(masses.size(), 0.0);
  for (int m = 0; m < int(masses.size()); ++m) {
    const auto& dm = masses[m];
    const int k = s.axes() == 3 ? dm.third : 0;
    if (dm.sign > 0) {
      sinks_at[s.node_index(dm.i, dm.j, k)].push_back(m);
      sink_left[m] = 1.0;
    }
  }

  std::vector<TracedCurve> curves;
  const std::size_t max_len = s.node_count() + 1;

  for (int m = 0; m < int(masses.size()); ++m) {
    const auto& dm = masses[m];
    if (dm.sign > 0) continue;
    double supply = 1.0;
    const int k0 = s.axes() == 3 ? dm.third : 0;

    for (int attempt = 0; attempt < 64 && supply > kFluxEps; ++attempt) {
      std::array<int, 3> cur = {dm.i, dm.j, k0};
      std::vector<std::array<int, 3>> nodes = {cur};
      std::vector<EdgeRef> path;
      int sink_mass = -1;
      std::size_t work = 0;
      std::map<std::size_t, std::size_t> seen;  // node id -> index in nodes
      seen[s.node_index(cur[0], cur[1], cur[2])] = 0;

      while (true) {
        if (nodes.size() > 1) {
          auto it = sinks_at.find(s.node_index(cur[0], cur[1], cur[2]));
          if (it != sinks_at.end()) {
            for (int cand : it->second)
              if (sink_left[cand] > kFluxEps) {
                sink_mass = cand;
                break;
              }
            if (sink_mass >= 0) break;
          }
        }
        EdgeRef best{0, 0, 0};
        double best_flow = 0;
        for_each_outgoing(residual, cur[0], cur[1], cur[2],
                          [&](const EdgeRef& e, double flow) {
                            if (flow > best_flow) {
                              best_flow = flow;
                              best = e;
                            }
                          });
        if (best_flow < kFluxEps) break;
        path.push_back(best);
        cur = step_node(s, cur, best);
        std::size_t cur_id = s.node_index(cur[0], cur[1], cur[2]);
        auto hit = seen.find(cur_id);
        if (hit != seen.end()) {
          // Walked into a circulation: peel the loop's bottleneck off the
          // residual and truncate the path back to the first visit.
          std::size_t at = hit->second;
          double loop_min = best_flow;
          for (std::size_t e = at; e < path.size(); ++e)
            loop_min = std::min(loop_min, residual.comp[path[e].axis][path[e].index] *
                                              path[e].dir);
          for (std::size_t e = at; e < path.size(); ++e)
            residual.comp[path[e].axis][path[e].index] -= loop_min * path[e].dir;
          for (std::size_t n = at + 1; n < nodes.size(); ++n)
            seen.erase(s.node_index(nodes[n][0], nodes[n][1], nodes[n][2]));
          nodes.resize(at + 1);
          path.resize(at);
          cur = nodes.back();
        } else {
          seen[cur_id] = nodes.size();
          nodes.push_back(cur);
        }
        if (++work > 50 * max_len)
          throw numeric_error("trace_curves: cycle guard tripped");
      }
      double bottleneck = supply;
      for (const auto& e : path)
        bottleneck =
            std::min(bottleneck, residual.comp[e.axis][e.index] * e.dir);

      if (sink_mass < 0) break;  // dangling flux; leave it in the residual
      double carried = std::min(bottleneck, sink_left[sink_mass]);
      if (carried < kFluxEps) break;
      for (const auto& e : path) residual.comp[e.axis][e.index] -= carried * e.dir;
      sink_left[sink_mass] -= carried;
      supply -= carried;

      TracedCurve c;
      c.nodes = std::move(nodes);
      c.flux = carried;
      c.source = m;
      c.sink = sink_mass;
      curves.push_back(std::move(c));
    }
  }
  return curves;
}

namespace {

std::array<double, 2> curve_direction(const TracedCurve& c) {
  double di = double(c.nodes.back()[0] - c.nodes.front()[0]);
  double dj = double(c.nodes.back()[1] - c.nodes.front()[1]);
  double mag = std::hypot(di, dj);
  if (mag == 0) return {0, 0};
  return {di / mag, dj / mag};
}

}  // namespace

DiracSet postprocess_merge(const std::vector<TracedCurve>& curves,
                           const DiracSet& masses, double overlap_frac,
                           double angle_tol_deg) {
  std::vector<bool> mass_dead(masses.size(), false);
  std::vector<bool> curve_dead(curves.size(), false);
  const double cos_tol = std::cos(angle_tol_deg * M_PI / 180.0);

  std::vector<std::unordered_set<std::uint64_t>> footprint(curves.size());
  for (std::size_t c = 0; c < curves.size(); ++c)
    for (const auto& n : curves[c].nodes)
      footprint[c].insert(std::uint64_t(n[0]) << 32 | std::uint64_t(n[1]));

  auto endpoints_alive = [&](const TracedCurve& c) {
    return c.source >= 0 && c.sink >= 0 && !mass_dead[c.source] &&
           !mass_dead[c.sink];
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t a = 0; a < curves.size() && !changed; ++a) {
      if (curve_dead[a] || !endpoints_alive(curves[a])) continue;
      for (std::size_t b = a + 1; b < curves.size() && !changed; ++b) {
        if (curve_dead[b] || !endpoints_alive(curves[b])) continue;
        if (curves[a].source == curves[b].source ||
            curves[a].sink == curves[b].sink)
          continue;  // same endpoint already; nothing to drop
        std::size_t shared = 0;
        const auto& small_fp =
            footprint[a].size() <= footprint[b].size() ? footprint[a] : footprint[b];
        const auto& big_fp =
            footprint[a].size() <= footprint[b].size() ? footprint[b] : footprint[a];
        for (auto key : small_fp) shared += big_fp.count(key);
        if (double(shared) < overlap_frac * double(small_fp.size())) continue;
        auto da = curve_direction(curves[a]);
        auto db = curve_direction(curves[b]);
        if (da[0] * db[0] + da[1] * db[1] < cos_tol) continue;

        // Keep the widest-separated (-,+) pair, drop the interior pair.
        int srcs[2] = {curves[a].source, curves[b].source};
        int snks[2] = {curves[a].sink, curves[b].sink};
        int best_src = -1, best_snk = -1;
        double best_d = -1;
        for (int u : srcs)
          for (int v : snks) {
            double d = std::hypot(double(masses[u].i - masses[v].i),
                                  double(masses[u].j - masses[v].j));
            if (d > best_d) {
              best_d = d;
              best_src = u;
              best_snk = v;
            }
          }
        for (int u : srcs)
          if (u != best_src) mass_dead[u] = true;
        for (int v : snks)
          if (v != best_snk) mass_dead[v] = true;
        curve_dead[a] = curve_dead[b] = true;
        changed = true;
      }
    }
  }

  DiracSet kept;
  for (std::size_t m = 0; m < masses.size(); ++m)
    if (!mass_dead[m]) kept.push_back(masses[m]);
  return kept;
}

int update_theta(const DiracMass& mass, const EdgeField& lifted_z,
                 double threshold) {
  const GridShape& s = lifted_z.shape;
  if (s.mode() != GridMode::Lifted)
    throw config_error("update_theta: field is not lifted");
  if (mass.third < 0) throw config_error("update_theta: mass has no angle index");
  const int K = s.dim(2);
  const int k = mass.third;
  const double below = lifted_z.at(2, mass.i, mass.j, (k - 1 + K) % K);
  const double above = lifted_z.at(2, mass.i, mass.j, k);
  const double flux = below + above;
  if (std::abs(flux) <= threshold) return k;
  const int dir = flux > 0 ? 1 : -1;
  const int step = mass.sign > 0 ? dir : -dir;
  return ((k + step) % K + K) % K;
}

namespace {

using nlohmann::json;

void write_snapshot(const std::string& dir, int iter, const DiracSet& masses,
                    const std::vector<TracedCurve>* curves) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  char tag[16];
  std::snprintf(tag, sizeof tag, "%04d", iter);

  json jm = json::array();
  for (const auto& m : masses) {
    json rec{{"i", m.i}, {"j", m.j}, {"sign", m.sign},
             {"stage", m.stage == MassStage::Shortening ? "shortening"
                                                        : "lengthening"}};
    if (m.third >= 0) rec["k"] = m.third;
    jm.push_back(rec);
  }
  std::ofstream(dir + "/masses_" + tag + ".json") << jm.dump(1) << "\n";

  if (curves) {
    json jc = json::array();
    for (const auto& c : *curves) {
      json nodes = json::array();
      for (const auto& n : c.nodes) nodes.push_back({n[0], n[1]});
      jc.push_back({{"nodes", nodes}, {"flux", c.flux}});
    }
    std::ofstream(dir + "/curves_" + tag + ".json") << jc.dump(1) << "\n";
  }
}

// Eq-15-style objective used by the optional gradient probe: the flow mass
// weighted by (g - gmax), measured on the planar field.
double probe_objective(const EdgeField& planar_z, const NodeField& g,
                       double gmax) {
  DualField v = average(planar_z, AveragingMode::Averaged);
  double total = 0;
  for (std::size_t n = 0; n < g.v.size(); ++n)
    total += (g.v[n] - gmax) *
             std::hypot(v.comp[0][n], v.comp[1][n]);
  return total;
}

}  // namespace

BilevelResult run_bilevel(const BilevelConfig& config, const EnergySpec& spec) {
  const NodeField& g = spec.weight;
  if (g.shape.mode() != GridMode::Planar)
    throw config_error("run_bilevel: only planar potentials are supported");
  const bool lifted = is_roto(spec.family);
  const GridShape grid =
      lifted ? GridShape::lifted(g.shape.rows(), g.shape.cols(),
                                 config.lifted_angles)
             : g.shape;
  spec.validate_grid(grid);

  LaplacianSpectrum spectrum(grid);
  SolverConfig inner;
  default_step_sizes(grid, averaging_mode(spec.family), inner.tau, inner.sigma);
  inner.max_steps = config.inner_steps;
  inner.check_every = std::max(1, config.inner_steps);

  DiracSet masses = init_pairs(g, config, lifted ? config.lifted_angles : 0);
  merge_close_opposites(masses);

  SolverState state(grid);
  bool warm = false;
  int outer = 0;

  auto solve_current = [&](int steps) {
    SolverConfig c = inner;
    c.max_steps = steps;
    c.check_every = std::max(1, std::min(steps, inner.check_every));
    NodeField mu = build_mu(grid, masses);
    state = solve(spec, mu, c, &spectrum, warm ? &state : nullptr);
    warm = true;
  };

  for (; outer < config.max_outer && !masses.empty(); ++outer) {
    solve_current(config.inner_steps);
    EdgeField planar_z = lifted ? marginalize(state.z) : state.z;
    DualField node_avg = average(planar_z, AveragingMode::Averaged);

    std::vector<TracedCurve> snapshot_curves;
    if (!config.snapshot_dir.empty())
      snapshot_curves = trace_curves(planar_z, [&] {
        DiracSet planar = masses;
        for (auto& m : planar) m.third = lifted ? -1 : m.third;
        return planar;
      }());

    bool moved = false;
    for (auto& m : masses) {
      if (lifted) {
        int nk = update_theta(m, state.z, config.theta_flux_threshold);
        if (nk != m.third) {
          m.third = nk;
          moved = true;
        }
      }
      MoveCase mc = move_mass_impl(m, node_avg, g, config.gmax);
      if (mc == MoveCase::Shorten || mc == MoveCase::LengthenCurve ||
          mc == MoveCase::LengthenOrtho || mc == MoveCase::Shift)
        moved = true;
    }
    std::size_t before = masses.size();
    merge_close_opposites(masses);
    moved = moved || masses.size() != before;

    if (!config.snapshot_dir.empty())
      write_snapshot(config.snapshot_dir, outer, masses, &snapshot_curves);

    if (!moved) break;
  }

  BilevelResult out{EdgeField(grid), {}, {}, outer};
  if (masses.empty()) {
    out.z = EdgeField(grid);
    return out;
  }

  // Re-solve so the field matches the final mass layout, trace, merge pairs
  // that cover the same curve, then the long clean-up solve.
  solve_current(config.inner_steps);
  {
    EdgeField planar_z = lifted ? marginalize(state.z) : state.z;
    DiracSet planar = masses;
    if (lifted)
      for (auto& m : planar) m.third = -1;
    auto curves = trace_curves(planar_z, planar);
    masses = postprocess_merge(curves, masses, config.merge_overlap_frac,
                               config.merge_angle_tol_deg);
  }

  if (config.grad_probe && !masses.empty()) {
    solve_current(config.inner_steps);
    EdgeField planar_z = lifted ? marginalize(state.z) : state.z;
    double best = probe_objective(planar_z, g, config.gmax);
    for (auto& m : masses) {
      int i = m.i, j = m.j;
      double di = (g.at(std::min(i + 1, g.shape.rows() - 1), j) -
                   g.at(std::max(i - 1, 0), j)) *
                  0.5;
      double dj = (g.at(i, std::min(j + 1, g.shape.cols() - 1)) -
                   g.at(i, std::max(j - 1, 0))) *
                  0.5;
      if (std::hypot(di, dj) < 1e-12) continue;
      int s = octant(di, dj);
      int ti = i + kOct[s][0], tj = j + kOct[s][1];
      if (!g.shape.in_bounds(ti, tj)) continue;
      DiracMass saved = m;
      m.i = ti;
      m.j = tj;
      SolverState saved_state = state;
      solve_current(config.inner_steps);
      EdgeField probe_z = lifted ? marginalize(state.z) : state.z;
      double cand = probe_objective(probe_z, g, config.gmax);
      if (cand < best) {
        best = cand;
      } else {
        m = saved;
        state = std::move(saved_state);
      }
    }
  }

  if (!masses.empty()) solve_current(config.post_steps);
  out.z = state.z;
  out.masses = masses;
  {
    EdgeField planar_z = lifted ? marginalize(state.z) : state.z;
    DiracSet planar = masses;
    if (lifted)
      for (auto& m : planar) m.third = -1;
    out.curves = trace_curves(planar_z, planar);
  }
  return out;
}

}  // namespace curvex
