#include "eie/matrix.hpp"

#include <numeric>

#include "eie/errors.hpp"

namespace eie {

size_t SparsityMask::kept_count() const {
    return std::accumulate(kept.begin(), kept.end(), size_t{0},
                           [](size_t acc, uint8_t k) { return acc + (k != 0); });
}

bool Codebook::has_zero_entry() const {
    for (int16_t r : raw)
        if (r == 0) return true;
    return false;
}

uint8_t Codebook::zero_slot() const {
    for (size_t i = 0; i < kEntries; ++i)
        if (raw[i] == 0) return static_cast<uint8_t>(i);
    throw FormatError("codebook has no zero entry");
}

}  // namespace eie
