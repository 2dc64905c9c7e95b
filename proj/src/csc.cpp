#include "eie/csc.hpp"

#include <numeric>

#include "eie/errors.hpp"

namespace eie {

namespace {
constexpr size_t kMaxPeEntries = 65535;  // 16-bit pointer range
}

size_t InterleavedCsc::total_entries() const {
    return std::accumulate(slices.begin(), slices.end(), size_t{0},
                           [](size_t acc, const PeSlice& s) { return acc + s.entry_count(); });
}

InterleavedCsc encode_interleaved(const QuantizedSparseMatrix& q, size_t n_pe,
                                  PointerWidth width) {
    if (n_pe < 1)
        throw std::invalid_argument("encode_interleaved: n_pe must be >= 1");

    InterleavedCsc e;
    e.rows = q.rows;
    e.cols = q.cols;
    e.n_pe = n_pe;
    e.zero_slot = q.codebook.zero_slot();
    e.slices.resize(n_pe);

    // Bucket kept entries by (PE, column) into flat arrays, CSR-style.
    // Row-major passes keep the index rank bookkeeping trivial and deliver
    // local rows in ascending order within each bucket.
    const size_t nbuckets = n_pe * q.cols;
    std::vector<uint64_t> bucket_off(nbuckets + 1, 0);
    for (size_t i = 0; i < q.rows; ++i) {
        const size_t k = i % n_pe;
        const size_t row_off = i * q.cols;
        for (size_t j = 0; j < q.cols; ++j)
            if (q.mask.kept[row_off + j]) ++bucket_off[k * q.cols + j + 1];
    }
    for (size_t b = 0; b < nbuckets; ++b)
        bucket_off[b + 1] += bucket_off[b];

    std::vector<uint32_t> kept_row(bucket_off[nbuckets]);
    std::vector<uint8_t> kept_idx(bucket_off[nbuckets]);
    {
        std::vector<uint64_t> fill(bucket_off.begin(), bucket_off.end() - 1);
        size_t next = 0;
        for (size_t i = 0; i < q.rows; ++i) {
            const size_t k = i % n_pe;
            const auto r = static_cast<uint32_t>(i / n_pe);
            const size_t row_off = i * q.cols;
            for (size_t j = 0; j < q.cols; ++j) {
                if (!q.mask.kept[row_off + j]) continue;
                const uint64_t at = fill[k * q.cols + j]++;
                kept_row[at] = r;
                kept_idx[at] = q.index[next++];
            }
        }
    }

    for (size_t k = 0; k < n_pe; ++k) {
        PeSlice& s = e.slices[k];
        s.col_ptr.assign(q.cols + 1, 0);

        auto push = [&](uint8_t v, uint8_t z) {
            if (width == PointerWidth::strict16 && s.v.size() >= kMaxPeEntries)
                throw CapacityError("encode_interleaved: PE " + std::to_string(k) +
                                    " exceeds 65535 entries (16-bit pointer overflow)");
            s.v.push_back(v);
            s.z.push_back(z);
        };

        for (size_t j = 0; j < q.cols; ++j) {
            size_t cursor = 0;  // next unprocessed local row; resets per column
            for (uint64_t t = bucket_off[k * q.cols + j]; t < bucket_off[k * q.cols + j + 1]; ++t) {
                size_t gap = kept_row[t] - cursor;
                while (gap > 15) {
                    push(e.zero_slot, 15);  // padding also occupies a row position
                    cursor += 16;
                    gap -= 16;
                }
                push(kept_idx[t], static_cast<uint8_t>(gap));
                cursor = kept_row[t] + 1;
            }
            s.col_ptr[j + 1] = static_cast<uint32_t>(s.v.size());
        }
    }
    return e;
}

QuantizedSparseMatrix decode_interleaved(const InterleavedCsc& e, const Codebook& cb) {
    if (e.zero_slot >= Codebook::kEntries || cb.raw[e.zero_slot] != 0)
        throw FormatError("decode_interleaved: zero slot does not hold numeric zero");

    QuantizedSparseMatrix q;
    q.rows = e.rows;
    q.cols = e.cols;
    q.mask = SparsityMask(e.rows, e.cols);
    q.codebook = cb;

    // Index values packed two per byte; presence tracked by the mask.
    std::vector<uint8_t> idx_nibbles(e.rows * e.cols / 2 + 1, 0);
    auto set_idx = [&](size_t t, uint8_t v) {
        uint8_t& b = idx_nibbles[t / 2];
        b = (t & 1) ? static_cast<uint8_t>((b & 0x0f) | (v << 4))
                    : static_cast<uint8_t>((b & 0xf0) | v);
    };
    auto get_idx = [&](size_t t) -> uint8_t {
        return (t & 1) ? (idx_nibbles[t / 2] >> 4) : (idx_nibbles[t / 2] & 0x0f);
    };

    if (e.slices.size() != e.n_pe)
        throw FormatError("decode_interleaved: slice count != n_pe");

    for (size_t k = 0; k < e.n_pe; ++k) {
        const PeSlice& s = e.slices[k];
        const size_t lrows = e.local_rows(k);
        if (s.col_ptr.size() != e.cols + 1 || (e.cols > 0 && s.col_ptr[0] != 0))
            throw FormatError("decode_interleaved: bad pointer array in PE " + std::to_string(k));
        if (s.v.size() != s.z.size() || s.col_ptr.back() != s.v.size())
            throw FormatError("decode_interleaved: entry/pointer mismatch in PE " + std::to_string(k));

        for (size_t j = 0; j < e.cols; ++j) {
            if (s.col_ptr[j] > s.col_ptr[j + 1])
                throw FormatError("decode_interleaved: non-monotone pointers in PE " + std::to_string(k));
            size_t cursor = 0;
            for (size_t t = s.col_ptr[j]; t < s.col_ptr[j + 1]; ++t) {
                if (s.v[t] > 15 || s.z[t] > 15)
                    throw FormatError("decode_interleaved: entry out of nibble range in PE " + std::to_string(k));
                cursor += s.z[t];
                if (cursor >= lrows)
                    throw FormatError("decode_interleaved: zero run exceeds local rows in PE " +
                                      std::to_string(k) + ", column " + std::to_string(j));
                if (s.v[t] != e.zero_slot) {  // padding is dropped from the mask
                    const size_t i = cursor * e.n_pe + k;
                    q.mask.kept[i * e.cols + j] = 1;
                    set_idx(i * e.cols + j, s.v[t]);
                }
                ++cursor;
            }
        }
    }

    q.index.reserve(q.mask.kept_count());
    for (size_t t = 0; t < q.mask.kept.size(); ++t)
        if (q.mask.kept[t]) q.index.push_back(get_idx(t));
    return q;
}

PaddingStats padding_stats(const InterleavedCsc& e) {
    PaddingStats p;
    p.per_pe.resize(e.slices.size(), 0);
    for (size_t k = 0; k < e.slices.size(); ++k) {
        for (uint8_t v : e.slices[k].v)
            if (v == e.zero_slot) ++p.per_pe[k];
        p.total += p.per_pe[k];
    }
    return p;
}

std::vector<Violation> validate(const InterleavedCsc& e) {
    std::vector<Violation> out;
    auto add = [&](size_t pe, ptrdiff_t col, ptrdiff_t off, std::string msg) {
        out.push_back({pe, col, off, std::move(msg)});
    };

    if (e.n_pe < 1) {
        add(0, -1, -1, "n_pe must be >= 1");
        return out;
    }
    if (e.slices.size() != e.n_pe) {
        add(0, -1, -1, "slice count does not match n_pe");
        return out;
    }
    if (e.zero_slot >= Codebook::kEntries)
        add(0, -1, -1, "zero slot out of range");

    for (size_t k = 0; k < e.n_pe; ++k) {
        const PeSlice& s = e.slices[k];
        if (s.col_ptr.size() != e.cols + 1) {
            add(k, -1, -1, "pointer array must have cols + 1 entries");
            continue;
        }
        if (s.col_ptr[0] != 0)
            add(k, 0, -1, "first pointer must be 0");
        if (s.v.size() != s.z.size())
            add(k, -1, -1, "v and z lengths differ");
        if (s.col_ptr.back() != s.v.size())
            add(k, static_cast<ptrdiff_t>(e.cols), -1, "last pointer must equal entry count");
        if (s.v.size() > kMaxPeEntries)
            add(k, -1, -1, "entry count exceeds 16-bit pointer range");

        for (size_t j = 0; j < e.cols; ++j) {
            if (s.col_ptr[j] > s.col_ptr[j + 1]) {
                add(k, static_cast<ptrdiff_t>(j), -1, "non-monotone column pointer");
                continue;
            }
            size_t cursor = 0;
            for (size_t t = s.col_ptr[j]; t < s.col_ptr[j + 1] && t < s.v.size(); ++t) {
                if (s.v[t] > 15)
                    add(k, static_cast<ptrdiff_t>(j), static_cast<ptrdiff_t>(t), "v out of nibble range");
                if (s.z[t] > 15)
                    add(k, static_cast<ptrdiff_t>(j), static_cast<ptrdiff_t>(t), "z out of nibble range");
                cursor += s.z[t];
                if (cursor >= e.local_rows(k)) {
                    add(k, static_cast<ptrdiff_t>(j), static_cast<ptrdiff_t>(t),
                        "zero run exceeds local rows");
                    break;
                }
                ++cursor;
            }
        }
    }
    return out;
}

}  // namespace eie
