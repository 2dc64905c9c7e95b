#include "eie/engine.hpp"

#include <cmath>
#include <limits>

#include "eie/errors.hpp"

namespace eie {

ActivationVector quantize_activations(const std::vector<double>& x, FixedPointFormat fmt) {
    fmt.check();
    for (double v : x)
        if (!std::isfinite(v))
            throw std::invalid_argument("quantize_activations: non-finite input");

    ActivationVector a;
    a.fmt = fmt;
    a.raw.resize(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        bool sat = false;
        a.raw[i] = quantize_real(x[i], fmt, &sat);
        if (sat) ++a.saturations;
    }
    return a;
}

namespace {

void check_spmv_args(const InterleavedCsc& e, const Codebook& cb, const ActivationVector& a) {
    if (a.size() != e.cols)
        throw std::invalid_argument("spmv: activation length does not match matrix columns");
    if (!(a.fmt == cb.fmt))
        throw std::invalid_argument("spmv: activation and codebook fixed-point formats differ");
}

// Accumulate one PE slice into its output rows.
void pe_accumulate(const InterleavedCsc& e, const Codebook& cb, const ActivationVector& a,
                   size_t k, std::vector<int64_t>& acc) {
    const PeSlice& s = e.slices[k];
    acc.assign(e.local_rows(k), 0);
    for (size_t j = 0; j < e.cols; ++j) {
        const int32_t aj = a.raw[j];
        if (aj == 0) continue;  // dynamic sparsity: skip zero activations
        size_t cursor = 0;
        for (size_t t = s.col_ptr[j]; t < s.col_ptr[j + 1]; ++t) {
            cursor += s.z[t];
            acc[cursor] += static_cast<int64_t>(static_cast<int32_t>(cb.raw[s.v[t]]) * aj);
            ++cursor;
        }
    }
}

void pe_writeback(const InterleavedCsc& e, size_t k, const std::vector<int64_t>& acc,
                  bool apply_relu, FixedPointFormat fmt, std::vector<int16_t>& out) {
    for (size_t r = 0; r < acc.size(); ++r) {
        int64_t wide = acc[r];
        if (apply_relu && wide < 0) wide = 0;
        out[r * e.n_pe + k] = narrow_accumulator(wide, fmt);
    }
}

}  // namespace

ActivationVector spmv_compressed_serial(const InterleavedCsc& e, const Codebook& cb,
                                        const ActivationVector& a, bool apply_relu) {
    check_spmv_args(e, cb, a);
    ActivationVector b;
    b.fmt = cb.fmt;
    b.raw.assign(e.rows, 0);

    std::vector<int64_t> acc;
    for (size_t k = 0; k < e.n_pe; ++k) {
        pe_accumulate(e, cb, a, k, acc);
        pe_writeback(e, k, acc, apply_relu, cb.fmt, b.raw);
    }
    return b;
}

ActivationVector spmv_compressed(const InterleavedCsc& e, const Codebook& cb,
                                 const ActivationVector& a, bool apply_relu) {
    check_spmv_args(e, cb, a);
    ActivationVector b;
    b.fmt = cb.fmt;
    b.raw.assign(e.rows, 0);

    // Each PE owns a disjoint set of output rows, so the loop is free of
    // shared writes and the result is independent of the thread count.
    const auto n = static_cast<ptrdiff_t>(e.n_pe);
#pragma omp parallel
    {
        std::vector<int64_t> acc;
#pragma omp for schedule(dynamic)
        for (ptrdiff_t k = 0; k < n; ++k) {
            pe_accumulate(e, cb, a, static_cast<size_t>(k), acc);
            pe_writeback(e, static_cast<size_t>(k), acc, apply_relu, cb.fmt, b.raw);
        }
    }
    return b;
}

ActivationVector spmv_dense_oracle(const DenseMatrix& w, const ActivationVector& a,
                                   bool apply_relu, FixedPointFormat fmt) {
    fmt.check();
    if (a.size() != w.cols)
        throw std::invalid_argument("spmv_dense_oracle: dimension mismatch");
    if (!(a.fmt == fmt))
        throw std::invalid_argument("spmv_dense_oracle: format mismatch");
    // Worst-case |sum| <= cols * 2^30 must stay below 2^63.
    if (w.cols > (uint64_t{1} << 32))
        throw std::overflow_error("spmv_dense_oracle: accumulator overflow bound violated");

    ActivationVector b;
    b.fmt = fmt;
    b.raw.assign(w.rows, 0);

    const auto rows = static_cast<ptrdiff_t>(w.rows);
#pragma omp parallel for schedule(static)
    for (ptrdiff_t i = 0; i < rows; ++i) {
        int64_t acc = 0;
        const double* row = w.values.data() + static_cast<size_t>(i) * w.cols;
        for (size_t j = 0; j < w.cols; ++j) {
            const int32_t wr = quantize_real(row[j], fmt);
            acc += static_cast<int64_t>(wr * static_cast<int32_t>(a.raw[j]));
        }
        if (apply_relu && acc < 0) acc = 0;
        b.raw[i] = narrow_accumulator(acc, fmt);
    }
    return b;
}

ActivationVector run_network(const std::vector<std::pair<InterleavedCsc, Codebook>>& layers,
                             const ActivationVector& a0, bool final_relu) {
    if (layers.empty())
        throw std::invalid_argument("run_network: no layers");
    ActivationVector a = a0;
    for (size_t l = 0; l < layers.size(); ++l) {
        const bool relu = (l + 1 < layers.size()) ? true : final_relu;
        a = spmv_compressed(layers[l].first, layers[l].second, a, relu);
    }
    return a;
}

uint64_t count_stored_macs(const InterleavedCsc& e, const ActivationVector& a) {
    uint64_t n = 0;
    for (const PeSlice& s : e.slices)
        for (size_t j = 0; j < e.cols; ++j)
            if (a.raw[j] != 0) n += s.col_ptr[j + 1] - s.col_ptr[j];
    return n;
}

uint64_t count_kept_macs(const InterleavedCsc& e, const ActivationVector& a) {
    uint64_t n = 0;
    for (const PeSlice& s : e.slices)
        for (size_t j = 0; j < e.cols; ++j) {
            if (a.raw[j] == 0) continue;
            for (size_t t = s.col_ptr[j]; t < s.col_ptr[j + 1]; ++t)
                if (s.v[t] != e.zero_slot) ++n;
        }
    return n;
}

}  // namespace eie
