#include "curvex/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <sstream>

#include "curvex/ops.hpp"

namespace curvex {

namespace {

// FFTW's planner is not reentrant; plan creation/destruction is serialized.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  double* ptr = nullptr;
  explicit FftwBuffer(std::size_t n) {
    ptr = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

}  // namespace

struct LaplacianSpectrum::Impl {
  FftwBuffer proto_in, proto_out;
  fftw_plan fwd = nullptr, inv = nullptr;
  double inv_scale = 1.0;  // 1 / (forward+inverse transform gain)

  Impl(const GridShape& s)
      : proto_in(s.node_count()), proto_out(s.node_count()) {
    const int rank = s.axes();
    int dims[3];
    fftw_r2r_kind fk[3], ik[3];
    double gain = 1.0;
    for (int a = 0; a < rank; ++a) {
      dims[a] = s.dim(a);
      if (s.periodic(a)) {
        fk[a] = FFTW_R2HC;
        ik[a] = FFTW_HC2R;
        gain *= s.dim(a);
      } else {
        fk[a] = FFTW_REDFT10;
        ik[a] = FFTW_REDFT01;
        gain *= 2.0 * s.dim(a);
      }
    }
    inv_scale = 1.0 / gain;
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd = fftw_plan_r2r(rank, dims, proto_in.ptr, proto_out.ptr, fk, FFTW_ESTIMATE);
    inv = fftw_plan_r2r(rank, dims, proto_out.ptr, proto_in.ptr, ik, FFTW_ESTIMATE);
    if (!fwd || !inv) throw numeric_error("failed to create FFTW plans");
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
  }
};

LaplacianSpectrum::LaplacianSpectrum(const GridShape& shape)
    : shape_(shape), impl_(std::make_unique<Impl>(shape)) {
  // Per-axis eigenvalue tables, then the tensor sum over nodes.
  std::vector<std::vector<double>> axis_eig(3);
  for (int a = 0; a < shape.axes(); ++a) {
    const int n = shape.dim(a);
    axis_eig[a].resize(n);
    for (int k = 0; k < n; ++k) {
      if (shape.periodic(a)) {
        int f = std::min(k, n - k);  // halfcomplex bin -> frequency
        axis_eig[a][k] = 2.0 - 2.0 * std::cos(2.0 * M_PI * f / n);
      } else {
        axis_eig[a][k] = 2.0 - 2.0 * std::cos(M_PI * k / n);
      }
    }
  }
  eig_.resize(shape.node_count());
  const int d2 = shape.axes() == 3 ? shape.dim(2) : 1;
  std::size_t n = 0;
  for (int i = 0; i < shape.dim(0); ++i)
    for (int j = 0; j < shape.dim(1); ++j)
      for (int k = 0; k < d2; ++k, ++n)
        eig_[n] = axis_eig[0][i] + axis_eig[1][j] +
                  (shape.axes() == 3 ? axis_eig[2][k] : 0.0);
}

LaplacianSpectrum::~LaplacianSpectrum() = default;

NodeField LaplacianSpectrum::solve_poisson(const NodeField& rhs) const {
  if (!(rhs.shape == shape_))
    throw config_error("solve_poisson: rhs shape does not match spectrum");
  double total = 0, abs_total = 0;
  for (double v : rhs.v) {
    total += v;
    abs_total += std::abs(v);
  }
  // The absolute floor absorbs summation roundoff when the residual itself
  // is at machine-noise level (e.g. re-projecting an already feasible field).
  if (std::abs(total) > 1e-9 * abs_total + 1e-12) {
    std::ostringstream msg;
    msg << "solve_poisson: right-hand side carries net mass " << total
        << " (|rhs|_1 = " << abs_total << "); the Neumann/periodic Laplacian "
        << "is only invertible on zero-sum data";
    throw config_error(msg.str());
  }

  const std::size_t n = shape_.node_count();
  FftwBuffer a(n), b(n);
  std::memcpy(a.ptr, rhs.v.data(), n * sizeof(double));
  fftw_execute_r2r(impl_->fwd, a.ptr, b.ptr);
  for (std::size_t m = 0; m < n; ++m)
    b.ptr[m] = eig_[m] > 0 ? b.ptr[m] / eig_[m] : 0.0;
  fftw_execute_r2r(impl_->inv, b.ptr, a.ptr);

  NodeField u(shape_);
  for (std::size_t m = 0; m < n; ++m) u.v[m] = a.ptr[m] * impl_->inv_scale;
  return u;
}

EdgeField LaplacianSpectrum::project_divergence(const EdgeField& z,
                                                const NodeField& mu) const {
  if (!(z.shape == shape_) || !(mu.shape == shape_))
    throw config_error("project_divergence: shape mismatch");
  NodeField r = divergence_adjoint(z);
  for (std::size_t m = 0; m < r.v.size(); ++m) r.v[m] = mu.v[m] - r.v[m];
  NodeField u = solve_poisson(r);
  EdgeField out = z;
  axpy(out, 1.0, gradient(u));
  return out;
}

}  // namespace curvex
