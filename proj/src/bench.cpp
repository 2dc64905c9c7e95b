#include "eie/bench.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <sstream>

#include <omp.h>

#include "eie/csc.hpp"
#include "eie/errors.hpp"

namespace eie {

BenchmarkSpec preset(const std::string& name) {
    // name, in_dim, out_dim, weight density, activation density
    static const BenchmarkSpec kPresets[] = {
        {"Alex-6", 9216, 4096, 0.09, 0.351, 1},
        {"Alex-7", 4096, 4096, 0.09, 0.353, 1},
        {"Alex-8", 4096, 1000, 0.25, 0.375, 1},
        {"VGG-6", 25088, 4096, 0.04, 0.183, 1},
        {"VGG-7", 4096, 4096, 0.04, 0.375, 1},
        {"VGG-8", 4096, 1000, 0.23, 0.411, 1},
        {"NT-We", 4096, 600, 0.10, 1.0, 1},
        {"NT-Wd", 600, 8791, 0.11, 1.0, 1},
        {"NT-LSTM", 1201, 2400, 0.10, 1.0, 1},
    };
    for (const auto& p : kPresets)
        if (p.name == name) return p;
    throw std::invalid_argument("unknown benchmark preset: " + name);
}

std::vector<std::string> preset_names() {
    return {"Alex-6", "Alex-7", "Alex-8", "VGG-6", "VGG-7", "VGG-8", "NT-We", "NT-Wd", "NT-LSTM"};
}

namespace {

// Plain draws on top of mt19937_64; library distributions are
// implementation-defined, these keep generated bytes stable everywhere.
struct Draw {
    std::mt19937_64 gen;
    explicit Draw(uint64_t seed) : gen(seed) {}

    bool bernoulli(double p) {
        return static_cast<double>(gen() >> 11) * 0x1.0p-53 < p;
    }
    uint64_t below(uint64_t n) { return gen() % n; }
};

}  // namespace

std::pair<QuantizedSparseMatrix, ActivationVector> generate_synthetic(const BenchmarkSpec& spec,
                                                                      FixedPointFormat fmt) {
    fmt.check();
    if (spec.in_dim < 1 || spec.out_dim < 1)
        throw std::invalid_argument("generate_synthetic: dimensions must be >= 1");
    if (!(spec.weight_density > 0 && spec.weight_density <= 1) ||
        !(spec.activation_density > 0 && spec.activation_density <= 1))
        throw std::invalid_argument("generate_synthetic: densities must be in (0, 1]");

    Draw draw(spec.seed);

    QuantizedSparseMatrix q;
    q.rows = spec.out_dim;
    q.cols = spec.in_dim;
    q.mask = SparsityMask(q.rows, q.cols);

    // Slot 0 is the zero slot; slots 1..15 hold +/-{1..8}/8 (exact in Q(f>=3)).
    q.codebook.fmt = fmt;
    q.codebook.raw[0] = 0;
    for (int s = 1; s <= 15; ++s) {
        const int v = s <= 8 ? -(9 - s) : s - 8;  // -8..-1, 1..7 eighths
        q.codebook.raw[s] = static_cast<int16_t>((v << fmt.fraction_bits) / 8);
    }

    for (size_t t = 0; t < q.mask.kept.size(); ++t) {
        if (!draw.bernoulli(spec.weight_density)) continue;
        q.mask.kept[t] = 1;
        q.index.push_back(static_cast<uint8_t>(1 + draw.below(15)));
    }

    ActivationVector a;
    a.fmt = fmt;
    a.raw.assign(spec.in_dim, 0);
    const auto one = static_cast<int64_t>(fmt.scale());
    for (size_t j = 0; j < spec.in_dim; ++j) {
        if (!draw.bernoulli(spec.activation_density)) continue;
        int16_t r = 0;
        while (r == 0) r = static_cast<int16_t>(static_cast<int64_t>(draw.below(2 * one + 1)) - one);
        a.raw[j] = r;  // uniform in [-1, 1], nonzero
    }
    return {std::move(q), std::move(a)};
}

SweepAxis sweep_axis_from_string(const std::string& s) {
    if (s == "fifo" || s == "fifo_depth") return SweepAxis::fifo_depth;
    if (s == "pes" || s == "n_pe") return SweepAxis::n_pe;
    if (s == "sram" || s == "sram_width") return SweepAxis::sram_width;
    throw std::invalid_argument("unknown sweep axis: " + s);
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::fifo_depth: return "fifo_depth";
        case SweepAxis::n_pe: return "n_pe";
        case SweepAxis::sram_width: return "sram_width";
    }
    return "?";
}

int sweep_thread_cap() {
    int cap = omp_get_max_threads();
    if (const char* env = std::getenv("EIE_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) cap = std::min(cap, n);
    }
    return cap;
}

SweepResult sweep(const BenchmarkSpec& spec, const SimConfig& base_cfg, SweepAxis axis,
                  const std::vector<size_t>& values, const EnergyTable& table) {
    if (values.empty())
        throw std::invalid_argument("sweep: no axis values");
    base_cfg.check();
    table.check();

    SweepResult res;
    res.axis = axis;
    res.spec = spec;
    res.base_cfg = base_cfg;
    res.points.resize(values.size());

    const auto [q, a] = generate_synthetic(spec);

    // The encoding only depends on n_pe; reuse it on the other axes.
    InterleavedCsc shared_enc;
    if (axis != SweepAxis::n_pe)
        shared_enc = encode_interleaved(q, base_cfg.n_pe, PointerWidth::wide);

    std::vector<ActivationVector> outputs(values.size());

    const auto n = static_cast<ptrdiff_t>(values.size());
#pragma omp parallel for schedule(dynamic) num_threads(sweep_thread_cap())
    for (ptrdiff_t i = 0; i < n; ++i) {
        SweepPoint& pt = res.points[i];
        pt.value = values[i];
        try {
            SimConfig cfg = base_cfg;
            const InterleavedCsc* enc = &shared_enc;
            InterleavedCsc own_enc;
            switch (axis) {
                case SweepAxis::fifo_depth: cfg.fifo_depth = pt.value; break;
                case SweepAxis::sram_width: cfg.sram_width_bits = pt.value; break;
                case SweepAxis::n_pe:
                    cfg.n_pe = pt.value;
                    own_enc = encode_interleaved(q, pt.value, PointerWidth::wide);
                    enc = &own_enc;
                    break;
            }
            auto [b, stats] = simulate(*enc, q.codebook, a, cfg, false);
            pt.stats = stats;
            pt.cycles = stats.total_cycles;
            pt.seconds = stats.seconds(cfg);
            pt.efficiency = load_efficiency(stats).aggregate;
            pt.padding = padding_stats(*enc).total;
            pt.energy_j = estimate_energy(stats, cfg, table).total_j;
            outputs[i] = std::move(b);
        } catch (const std::exception& ex) {
            pt.error = ex.what();
        }
    }

    // Timing knobs must never change values: compare everything against the
    // first successful point.
    const ActivationVector* ref = nullptr;
    for (size_t i = 0; i < res.points.size(); ++i) {
        if (res.points[i].error) continue;
        if (!ref)
            ref = &outputs[i];
        else if (!(outputs[i] == *ref))
            res.points[i].error = "functional output differs across sweep points";
    }
    return res;
}

std::string SweepResult::to_csv() const {
    std::ostringstream os;
    os << "# benchmark=" << spec.name << " seed=" << spec.seed << " axis=" << to_string(axis)
       << "\n";
    os << to_string(axis) << ",total_cycles,seconds,efficiency,padding,macs,padding_macs,"
       << "energy_j,error\n";
    for (const SweepPoint& p : points) {
        char buf[128];
        if (p.error) {
            os << p.value << ",,,,,,,," << *p.error << "\n";
            continue;
        }
        std::snprintf(buf, sizeof buf, ",%llu,%.9g,%.6f,%llu,%llu,%llu,%.9g,\n",
                      static_cast<unsigned long long>(p.cycles), p.seconds, p.efficiency,
                      static_cast<unsigned long long>(p.padding),
                      static_cast<unsigned long long>(p.stats.mac_count),
                      static_cast<unsigned long long>(p.stats.padding_mac_count), p.energy_j);
        os << p.value << buf;
    }
    return os.str();
}

std::string compare_runs(const std::vector<SweepResult>& results) {
    if (results.empty())
        throw std::invalid_argument("compare_runs: no results");
    for (const SweepResult& r : results)
        if (r.axis != results.front().axis)
            throw std::invalid_argument("compare_runs: axis mismatch");

    std::ostringstream os;
    os << "benchmark," << to_string(results.front().axis) << ",seconds,speedup\n";
    for (const SweepResult& r : results) {
        double base = 0;
        for (const SweepPoint& p : r.points) {
            if (p.error) continue;
            if (base == 0) base = p.seconds;
            char buf[96];
            std::snprintf(buf, sizeof buf, "%.9g,%.4f\n", p.seconds,
                          p.seconds > 0 ? base / p.seconds : 1.0);
            os << r.spec.name << "," << p.value << "," << buf;
        }
    }
    return os.str();
}

}  // namespace eie
