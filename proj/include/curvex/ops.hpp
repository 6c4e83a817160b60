#pragma once

#include <cstdint>

#include "curvex/grid.hpp"

namespace curvex {

/// How edge values are brought back to nodes.
///
/// Forward: component a at a node is the single forward edge leaving it along
/// axis a (zero at the far boundary). Averaged: mean of the two incident
/// edges per axis, with missing boundary edges counting as zero.
enum class AveragingMode { Forward, Averaged };

/// Forward differences per axis onto the staggered edges; the periodic angle
/// axis takes the wrap-around difference.
EdgeField gradient(const NodeField& u);

/// Exact adjoint of gradient. Acts as a (negated) divergence with a
/// vanishing-flux boundary: the output always sums to zero.
NodeField divergence_adjoint(const EdgeField& z);

DualField average(const EdgeField& z, AveragingMode mode);

/// Exact adjoint of average under the canonical inner products.
EdgeField average_adjoint(const DualField& p, AveragingMode mode);

/// Upper estimate of the spectral norm of the node-averaging operator, via
/// power iteration on A*A (relative tolerance 1e-6) with a +1% safety
/// margin. Throws numeric_error if the iteration does not settle.
double operator_norm(const GridShape& shape, AveragingMode mode,
                     double rel_tol = 1e-6, int max_iter = 20000,
                     std::uint64_t seed = 1234);

}  // namespace curvex
