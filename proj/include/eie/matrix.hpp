#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "eie/fixed_point.hpp"

namespace eie {

// Row-major dense weight matrix (rows = output dim, cols = input dim).
struct DenseMatrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> values;  // rows * cols

    DenseMatrix() = default;
    DenseMatrix(size_t r, size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

    double& at(size_t i, size_t j) { return values[i * cols + j]; }
    double at(size_t i, size_t j) const { return values[i * cols + j]; }
    size_t size() const { return rows * cols; }
};

// Boolean keep/drop mask with the same shape as its matrix.
struct SparsityMask {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<uint8_t> kept;  // rows * cols, 0 or 1

    SparsityMask() = default;
    SparsityMask(size_t r, size_t c) : rows(r), cols(c), kept(r * c, 0) {}

    bool is_kept(size_t i, size_t j) const { return kept[i * cols + j] != 0; }
    void set(size_t i, size_t j, bool v) { kept[i * cols + j] = v ? 1 : 0; }

    size_t kept_count() const;
    double density() const {
        const size_t n = rows * cols;
        return n != 0 ? static_cast<double>(kept_count()) / static_cast<double>(n) : 0.0;
    }

    bool operator==(const SparsityMask&) const = default;
};

// 16 shared fixed-point weight values. Entries are kept sorted ascending by
// raw value; at least one entry must be exact zero so that padding entries
// decode to numeric zero (see csc.hpp). zero_slot() is the lowest such index.
struct Codebook {
    static constexpr size_t kEntries = 16;

    std::array<int16_t, kEntries> raw{};  // Q(fmt.fraction_bits)
    FixedPointFormat fmt;

    double value(size_t idx) const { return to_real(raw[idx], fmt); }

    bool has_zero_entry() const;
    uint8_t zero_slot() const;  // throws FormatError if no zero entry

    bool operator==(const Codebook&) const = default;
};

// Pruned + codebook-quantized matrix: a mask plus one 4-bit codebook index
// per kept position (stored row-major over kept positions only).
struct QuantizedSparseMatrix {
    size_t rows = 0;
    size_t cols = 0;
    SparsityMask mask;
    std::vector<uint8_t> index;  // one entry (< 16) per kept position, row-major order
    Codebook codebook;

    bool operator==(const QuantizedSparseMatrix&) const = default;
};

}  // namespace eie
