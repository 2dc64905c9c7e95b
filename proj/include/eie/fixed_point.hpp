#pragma once

#include <cstdint>
#include <limits>

#include "eie/errors.hpp"

namespace eie {

// 16-bit signed two's-complement fixed point with a configurable binary point.
// Values are stored as raw int16_t in Q(fraction_bits); products of two such
// values live in Q(2*fraction_bits) and are accumulated in 64-bit integers.
struct FixedPointFormat {
    int fraction_bits = 8;

    bool operator==(const FixedPointFormat&) const = default;

    double scale() const { return static_cast<double>(int64_t{1} << fraction_bits); }

    void check() const {
        if (fraction_bits < 0 || fraction_bits > 15)
            throw ConfigError("fraction_bits must be in [0, 15]");
    }
};

constexpr int16_t kFixedMax = std::numeric_limits<int16_t>::max();
constexpr int16_t kFixedMin = std::numeric_limits<int16_t>::min();

// Round-to-nearest-even of a real value onto the integer grid.
int64_t round_half_even(double x);

// Real -> raw Q(f), round-to-nearest-even, saturating. `saturated` (optional)
// is set when the value fell outside the representable range.
int16_t quantize_real(double x, FixedPointFormat fmt, bool* saturated = nullptr);

// Raw Q(f) -> real. Exact (power-of-two divisor).
double to_real(int16_t raw, FixedPointFormat fmt);

// Narrow a Q(2f) 64-bit accumulator to a 16-bit Q(f) value: shift out f
// fraction bits with round-to-nearest-even, then saturate. This is the single
// narrowing step applied at the end of every dot product, which keeps the sum
// order-independent (integer adds of exact products commute).
int16_t narrow_accumulator(int64_t acc, FixedPointFormat fmt);

}  // namespace eie
