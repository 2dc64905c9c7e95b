#include "eie/compress.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "eie/errors.hpp"

namespace eie {

SparsityMask prune_magnitude(const DenseMatrix& w, double target_density) {
    if (w.rows < 1 || w.cols < 1)
        throw std::invalid_argument("prune_magnitude: empty matrix");
    if (!(target_density > 0.0 && target_density <= 1.0))
        throw std::invalid_argument("prune_magnitude: density must be in (0, 1]");
    for (double v : w.values)
        if (!std::isfinite(v))
            throw std::invalid_argument("prune_magnitude: non-finite weight");

    const size_t n = w.size();
    const auto keep = static_cast<size_t>(std::llround(target_density * static_cast<double>(n)));

    SparsityMask mask(w.rows, w.cols);
    if (keep >= n) {
        std::fill(mask.kept.begin(), mask.kept.end(), uint8_t{1});
        return mask;
    }
    if (keep == 0)
        return mask;

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    auto larger = [&](size_t a, size_t b) {
        const double ma = std::fabs(w.values[a]);
        const double mb = std::fabs(w.values[b]);
        if (ma != mb) return ma > mb;
        return a < b;  // tie: lowest (i, j) first
    };
    std::nth_element(order.begin(), order.begin() + keep, order.end(), larger);
    for (size_t t = 0; t < keep; ++t)
        mask.kept[order[t]] = 1;
    return mask;
}

namespace {

// One k-means pass: assign each point to its nearest center (ties to the
// lower-valued center; centers are kept sorted ascending so lower value means
// lower index). Returns true if any assignment changed.
bool assign_points(const std::vector<double>& pts, const std::vector<double>& centers,
                   std::vector<int>& assign) {
    bool changed = false;
    const int k = static_cast<int>(centers.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        int best = 0;
        double best_d = std::fabs(pts[i] - centers[0]);
        for (int c = 1; c < k; ++c) {
            const double d = std::fabs(pts[i] - centers[c]);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        if (assign[i] != best) {
            assign[i] = best;
            changed = true;
        }
    }
    return changed;
}

}  // namespace

Codebook build_codebook(const DenseMatrix& w, const SparsityMask& mask, FixedPointFormat fmt) {
    fmt.check();
    if (w.rows != mask.rows || w.cols != mask.cols)
        throw std::invalid_argument("build_codebook: shape mismatch");

    std::vector<double> pts;
    pts.reserve(mask.kept_count());
    for (size_t t = 0; t < w.size(); ++t)
        if (mask.kept[t]) pts.push_back(w.values[t]);
    if (pts.empty())
        throw std::invalid_argument("build_codebook: mask keeps no entries");

    const auto [mn_it, mx_it] = std::minmax_element(pts.begin(), pts.end());
    const double mn = *mn_it, mx = *mx_it;

    constexpr int k = static_cast<int>(Codebook::kEntries);
    std::vector<double> centers(k);

    if (mn == mx) {
        // Degenerate: a single distinct kept value.
        std::fill(centers.begin(), centers.end(), 0.0);
        centers.back() = mn;
    } else {
        for (int c = 0; c < k; ++c)
            centers[c] = mn + (mx - mn) * c / (k - 1);

        std::vector<int> assign(pts.size(), -1);
        std::vector<double> sum(k);
        std::vector<size_t> cnt(k);
        for (int iter = 0; iter < 50; ++iter) {
            const bool changed = assign_points(pts, centers, assign);
            if (!changed && iter > 0) break;

            std::fill(sum.begin(), sum.end(), 0.0);
            std::fill(cnt.begin(), cnt.end(), size_t{0});
            for (size_t i = 0; i < pts.size(); ++i) {
                sum[assign[i]] += pts[i];
                ++cnt[assign[i]];
            }
            for (int c = 0; c < k; ++c)
                if (cnt[c]) centers[c] = sum[c] / static_cast<double>(cnt[c]);

            // Re-seed empty clusters, one at a time, to the point farthest
            // from its current center (ties: lowest point index).
            for (int c = 0; c < k; ++c) {
                if (cnt[c]) continue;
                size_t far_i = 0;
                double far_d = -1.0;
                for (size_t i = 0; i < pts.size(); ++i) {
                    if (cnt[assign[i]] <= 1) continue;  // don't orphan a singleton
                    const double d = std::fabs(pts[i] - centers[assign[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far_i = i;
                    }
                }
                if (far_d < 0.0) break;  // fewer distinct points than clusters
                --cnt[assign[far_i]];
                centers[c] = pts[far_i];
                assign[far_i] = c;
                cnt[c] = 1;
            }
            std::sort(centers.begin(), centers.end());
        }
    }

    Codebook cb;
    cb.fmt = fmt;
    for (int c = 0; c < k; ++c)
        cb.raw[c] = quantize_real(centers[c], fmt);

    // Pin the entry nearest zero to exact zero so padding always decodes to 0.
    if (!cb.has_zero_entry()) {
        size_t best = 0;
        for (size_t c = 1; c < Codebook::kEntries; ++c)
            if (std::abs(static_cast<int>(cb.raw[c])) < std::abs(static_cast<int>(cb.raw[best])))
                best = c;
        cb.raw[best] = 0;
    }
    std::sort(cb.raw.begin(), cb.raw.end());
    return cb;
}

QuantizedSparseMatrix quantize(const DenseMatrix& w, const SparsityMask& mask, const Codebook& cb) {
    if (w.rows != mask.rows || w.cols != mask.cols)
        throw std::invalid_argument("quantize: shape mismatch");

    QuantizedSparseMatrix q;
    q.rows = w.rows;
    q.cols = w.cols;
    q.mask = mask;
    q.codebook = cb;
    q.index.reserve(mask.kept_count());

    for (size_t t = 0; t < w.size(); ++t) {
        if (!mask.kept[t]) continue;
        const double x = w.values[t];
        size_t best = 0;
        double best_d = std::fabs(x - cb.value(0));
        for (size_t c = 1; c < Codebook::kEntries; ++c) {
            const double d = std::fabs(x - cb.value(c));
            if (d < best_d) {  // tie keeps the lower index
                best_d = d;
                best = c;
            }
        }
        q.index.push_back(static_cast<uint8_t>(best));
    }
    return q;
}

DenseMatrix dequantize(const QuantizedSparseMatrix& q) {
    DenseMatrix w(q.rows, q.cols);
    size_t next = 0;
    for (size_t t = 0; t < w.size(); ++t)
        if (q.mask.kept[t]) w.values[t] = q.codebook.value(q.index[next++]);
    return w;
}

}  // namespace eie
