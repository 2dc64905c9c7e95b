#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eie/matrix.hpp"

namespace eie {

// Relative-indexed, interleaved CSC.
//
// Row interleaving: with N PEs, PE k owns the global rows {i : i mod N == k};
// its local row r maps to global row r*N + k. Each PE stores its share of
// every column as a stream of (v, z) entries:
//
//   v  4-bit codebook index of the stored value
//   z  4-bit count of local zero rows skipped before this entry
//
// Zero counts reset at every column boundary. When more than 15 local zeros
// precede a kept entry, padding entries (v = zero slot, z = 15) are emitted
// greedily; each padding entry also occupies a row position, so one padding
// entry advances the cursor by 16. Padding decodes to numeric zero and is
// dropped from the mask. col_ptr[j]..col_ptr[j+1] delimits column j; pointers
// are 16 bits wide, so a PE may hold at most 65535 entries.
struct PeSlice {
    std::vector<uint8_t> v;         // 4-bit codebook indices
    std::vector<uint8_t> z;         // 4-bit zero runs
    std::vector<uint32_t> col_ptr;  // cols + 1 monotone pointers, col_ptr[0] == 0

    size_t entry_count() const { return v.size(); }

    bool operator==(const PeSlice&) const = default;
};

struct InterleavedCsc {
    size_t rows = 0;
    size_t cols = 0;
    size_t n_pe = 1;
    uint8_t zero_slot = 0;  // codebook index used by padding entries
    std::vector<PeSlice> slices;

    // Number of global rows owned by PE k.
    size_t local_rows(size_t k) const { return rows > k ? (rows - 1 - k) / n_pe + 1 : 0; }

    size_t total_entries() const;

    bool operator==(const InterleavedCsc&) const = default;
};

struct PaddingStats {
    std::vector<uint64_t> per_pe;
    uint64_t total = 0;
};

struct Violation {
    size_t pe = 0;
    ptrdiff_t column = -1;  // -1 when not column-specific
    ptrdiff_t offset = -1;  // entry offset when applicable
    std::string message;
};

// Encode a quantized matrix into per-PE slices. Throws CapacityError (naming
// the PE) if any PE would exceed the 16-bit pointer range. Wide mode lifts
// that check for in-memory exploration of layers too large for one pointer
// region (the container format always enforces it).
enum class PointerWidth { strict16, wide };

InterleavedCsc encode_interleaved(const QuantizedSparseMatrix& q, size_t n_pe,
                                  PointerWidth width = PointerWidth::strict16);

// Inverse of encode_interleaved. Entries whose index equals the zero slot are
// dropped from the mask: padding is indistinguishable from a kept entry that
// quantized to the zero slot, and both decode to numeric zero. For matrices
// whose indices avoid the zero slot (all generated benchmarks), this is an
// exact inverse. Throws FormatError on malformed input.
QuantizedSparseMatrix decode_interleaved(const InterleavedCsc& e, const Codebook& cb);

// Count of padding entries (zero-slot entries) per PE and total.
PaddingStats padding_stats(const InterleavedCsc& e);

// Structural invariant check. Returns an empty list iff the encoding is
// well-formed; never throws.
std::vector<Violation> validate(const InterleavedCsc& e);

// Byte layout used by the container: one byte per entry, v in the low nibble,
// z in the high nibble.
inline uint8_t pack_entry(uint8_t v, uint8_t z) { return static_cast<uint8_t>((z << 4) | (v & 0x0f)); }
inline uint8_t entry_v(uint8_t b) { return b & 0x0f; }
inline uint8_t entry_z(uint8_t b) { return b >> 4; }

}  // namespace eie
