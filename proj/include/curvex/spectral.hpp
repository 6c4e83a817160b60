#pragma once

#include <memory>
#include <vector>

#include "curvex/grid.hpp"

namespace curvex {

/// Diagonalization of the grid Laplacian D*D built from the staggered
/// gradient/divergence pair.
///
/// Neumann axes are diagonalized by a DCT-II/DCT-III pair (even symmetry
/// about half-sample boundaries, which is what the zero-flux staggered
/// stencil produces); the periodic angle axis by a real FFT. Per-axis
/// eigenvalues are 4 sin^2(pi k / 2n) resp. 4 sin^2(pi k / n). The single
/// zero eigenvalue (the constant mode) is masked, so solves return the
/// zero-mean solution.
///
/// The spectrum is immutable after construction; concurrent solves on the
/// same spectrum are allowed (each solve works on its own buffers).
class LaplacianSpectrum {
 public:
  explicit LaplacianSpectrum(const GridShape& shape);
  ~LaplacianSpectrum();
  LaplacianSpectrum(const LaplacianSpectrum&) = delete;
  LaplacianSpectrum& operator=(const LaplacianSpectrum&) = delete;

  const GridShape& shape() const { return shape_; }
  const std::vector<double>& eigenvalues() const { return eig_; }

  /// Solves D*D u = rhs for the zero-mean u.
  /// Precondition: sum(rhs) = 0 within 1e-9 * ||rhs||_1, else config_error
  /// naming the residual mass.
  NodeField solve_poisson(const NodeField& rhs) const;

  /// Euclidean projection of z onto {z' : D*z' = mu}, computed as
  /// z + gradient(solve_poisson(mu - D*z)). Idempotent; the correction lies
  /// in the range of the gradient.
  EdgeField project_divergence(const EdgeField& z, const NodeField& mu) const;

 private:
  struct Impl;
  GridShape shape_;
  std::vector<double> eig_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace curvex
