#pragma once

#include "eie/matrix.hpp"

namespace eie {

// Magnitude pruning with a single global threshold. Keeps exactly
// round(target_density * rows * cols) entries: the largest-|w| ones, ties
// broken in favor of the lowest (row, col) position. Rejects non-finite
// weights.
SparsityMask prune_magnitude(const DenseMatrix& w, double target_density);

// Deterministic 1-D k-means over the kept weights:
//   - 16 centers initialized linearly spaced over [min, max] of kept weights
//   - nearest-center assignment, ties to the lower-valued center
//   - at most 50 iterations, stop early when assignments are stable
//   - empty clusters re-seeded to the point farthest from its center
// The converged centers are converted to fixed point, the entry closest to
// zero is forced to exact zero (reserved for padding), and the result is
// sorted ascending. All kept weights identical is a valid degenerate case:
// that value plus zeros.
Codebook build_codebook(const DenseMatrix& w, const SparsityMask& mask,
                        FixedPointFormat fmt = {});

// Assign each kept position the nearest codebook entry (ties -> lowest index).
QuantizedSparseMatrix quantize(const DenseMatrix& w, const SparsityMask& mask,
                               const Codebook& cb);

// Dense matrix with the codebook value at kept positions, exact zero elsewhere.
DenseMatrix dequantize(const QuantizedSparseMatrix& q);

}  // namespace eie
