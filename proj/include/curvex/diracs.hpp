#pragma once

#include <cstdint>
#include <unordered_set>
#include <vector>

#include "curvex/grid.hpp"

namespace curvex {

enum class MassStage { Shortening, Lengthening };

/// A signed unit point mass of the divergence constraint; a curve endpoint.
/// `third` is the depth index on volume grids or the angle index on lifted
/// grids (-1 on planar grids). `visited` records every node the mass has
/// occupied while in the lengthening/shifting stage.
struct DiracMass {
  int i = 0, j = 0;
  int sign = +1;
  int third = -1;
  MassStage stage = MassStage::Shortening;
  bool converged = false;
  std::unordered_set<std::uint64_t> visited;

  std::uint64_t planar_key(const GridShape& s) const {
    return std::uint64_t(i) * s.cols() + j;
  }
};

using DiracSet = std::vector<DiracMass>;

inline int total_sign(const DiracSet& masses) {
  int s = 0;
  for (const auto& m : masses) s += m.sign;
  return s;
}

/// Assembles the divergence data mu from the masses. Signs must cancel and
/// every position must be in bounds (third index mandatory on 3-axis grids).
inline NodeField build_mu(const GridShape& shape, const DiracSet& masses) {
  if (total_sign(masses) != 0)
    throw config_error("dirac masses must sum to zero");
  NodeField mu(shape);
  for (const auto& m : masses) {
    const int k = shape.axes() == 3 ? m.third : 0;
    if (shape.axes() == 3 && m.third < 0)
      throw config_error("mass needs a third index on this grid");
    if (!shape.in_bounds(m.i, m.j, k))
      throw config_error("dirac mass out of bounds");
    mu.at(m.i, m.j, k) += m.sign;
  }
  return mu;
}

}  // namespace curvex
