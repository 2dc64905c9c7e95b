#include "eie/fixed_point.hpp"

#include <cmath>

namespace eie {

int64_t round_half_even(double x) {
    const double fl = std::floor(x);
    const double frac = x - fl;
    auto lo = static_cast<int64_t>(fl);
    if (frac > 0.5) return lo + 1;
    if (frac < 0.5) return lo;
    return (lo % 2 == 0) ? lo : lo + 1;
}

int16_t quantize_real(double x, FixedPointFormat fmt, bool* saturated) {
    fmt.check();
    const int64_t q = round_half_even(x * fmt.scale());
    if (saturated) *saturated = (q > kFixedMax || q < kFixedMin);
    if (q > kFixedMax) return kFixedMax;
    if (q < kFixedMin) return kFixedMin;
    return static_cast<int16_t>(q);
}

double to_real(int16_t raw, FixedPointFormat fmt) {
    return static_cast<double>(raw) / fmt.scale();
}

int16_t narrow_accumulator(int64_t acc, FixedPointFormat fmt) {
    const int f = fmt.fraction_bits;
    int64_t q;
    if (f == 0) {
        q = acc;
    } else {
        q = acc >> f;  // arithmetic shift: floor division
        const int64_t rem = acc - (q << f);
        const int64_t half = int64_t{1} << (f - 1);
        if (rem > half || (rem == half && (q & 1)))
            ++q;
    }
    if (q > kFixedMax) return kFixedMax;
    if (q < kFixedMin) return kFixedMin;
    return static_cast<int16_t>(q);
}

}  // namespace eie
