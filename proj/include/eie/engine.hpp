#pragma once

#include <cstdint>
#include <vector>

#include "eie/csc.hpp"
#include "eie/matrix.hpp"

namespace eie {

// 16-bit fixed-point activation vector.
struct ActivationVector {
    FixedPointFormat fmt;
    std::vector<int16_t> raw;
    size_t saturations = 0;  // conversions clipped by quantize_activations

    size_t size() const { return raw.size(); }

    bool operator==(const ActivationVector& o) const { return fmt == o.fmt && raw == o.raw; }
};

// Real -> fixed point, round-to-nearest-even with saturation.
ActivationVector quantize_activations(const std::vector<double>& x, FixedPointFormat fmt);

// b_i = narrow( sum over kept (i,j) with a_j != 0 of S[I_ij] * a_j )
//
// Products are Q(2f) int32, accumulated per output row in int64, optional
// ReLU on the wide sum, then one round-to-nearest-even saturating narrow to
// Q(f). Columns with a_j == 0 are skipped entirely. Padding entries multiply
// the zero slot and contribute nothing. Output rows are partitioned over PE
// slices, so the OpenMP variant and the serial reference are bit-identical.
ActivationVector spmv_compressed(const InterleavedCsc& e, const Codebook& cb,
                                 const ActivationVector& a, bool apply_relu);

// Serial reference for the kernel above; kept for tests and benchmarks.
ActivationVector spmv_compressed_serial(const InterleavedCsc& e, const Codebook& cb,
                                        const ActivationVector& a, bool apply_relu);

// Brute-force dense oracle with the identical arithmetic contract, summing
// over every column. w values must be representable in Q(f) (e.g. produced by
// dequantize). Throws if the accumulator could overflow.
ActivationVector spmv_dense_oracle(const DenseMatrix& w, const ActivationVector& a,
                                   bool apply_relu, FixedPointFormat fmt);

// Chain of layers; ReLU between layers, optional ReLU after the last.
ActivationVector run_network(const std::vector<std::pair<InterleavedCsc, Codebook>>& layers,
                             const ActivationVector& a0, bool final_relu = false);

// Multiply-accumulate counts implied by the dynamic sparsity support:
// stored entries (kept + padding) of columns with a_j != 0, and kept-only.
uint64_t count_stored_macs(const InterleavedCsc& e, const ActivationVector& a);
uint64_t count_kept_macs(const InterleavedCsc& e, const ActivationVector& a);

}  // namespace eie
