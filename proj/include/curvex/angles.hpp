#pragma once

#include <cmath>
#include <vector>

#include "curvex/errors.hpp"

namespace curvex {

/// Discretization of the orientation circle: theta_k = 2 pi k / K.
///
/// Orientation convention used throughout the lifted machinery: the unit
/// vector theta_k = (cos, sin) pairs cos with the row axis (axis 0) and sin
/// with the column axis (axis 1), so k = 0 points toward increasing rows.
struct AngleTable {
  int K = 0;
  std::vector<double> theta, c, s;

  static AngleTable make(int K) {
    if (K < 4) throw config_error("angle table needs K >= 4");
    AngleTable t;
    t.K = K;
    t.theta.resize(K);
    t.c.resize(K);
    t.s.resize(K);
    for (int k = 0; k < K; ++k) {
      t.theta[k] = 2.0 * M_PI * k / K;
      t.c[k] = std::cos(t.theta[k]);
      t.s[k] = std::sin(t.theta[k]);
    }
    return t;
  }
};

}  // namespace curvex
