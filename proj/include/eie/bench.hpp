#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eie/cyclesim.hpp"
#include "eie/energy.hpp"

namespace eie {

// Layer shape and sparsity statistics for a synthetic benchmark. The matrix
// is out_dim x in_dim.
struct BenchmarkSpec {
    std::string name;
    size_t in_dim = 0;
    size_t out_dim = 0;
    double weight_density = 1.0;
    double activation_density = 1.0;
    uint64_t seed = 1;
};

// Named presets with the layer statistics of well-known compressed models.
BenchmarkSpec preset(const std::string& name);
std::vector<std::string> preset_names();

// Seeded synthetic layer matching the spec's statistics: Bernoulli weight
// mask, uniform codebook indices over the nonzero slots, Bernoulli activation
// support with uniform nonzero values in [-1, 1]. Magnitudes are bounded so
// a Q(2f) 64-bit accumulator cannot overflow even at 25088 columns. The draw
// sequence is fixed (no library distributions), so outputs are byte-stable.
std::pair<QuantizedSparseMatrix, ActivationVector> generate_synthetic(const BenchmarkSpec& spec,
                                                                      FixedPointFormat fmt = {});

enum class SweepAxis { fifo_depth, n_pe, sram_width };

SweepAxis sweep_axis_from_string(const std::string& s);
std::string to_string(SweepAxis axis);

struct SweepPoint {
    size_t value = 0;
    std::optional<std::string> error;  // set when this point failed
    double efficiency = 1.0;
    uint64_t cycles = 0;
    double seconds = 0;
    uint64_t padding = 0;
    double energy_j = 0;
    SimStats stats;
};

struct SweepResult {
    SweepAxis axis = SweepAxis::fifo_depth;
    BenchmarkSpec spec;
    SimConfig base_cfg;
    std::vector<SweepPoint> points;  // ordered by the requested axis values

    std::string to_csv() const;
};

// Run simulate + estimate_energy per axis value. The functional output must
// be identical across points (checked; a mismatch is an error annotation).
// Points run concurrently; EIE_THREADS caps the worker count.
SweepResult sweep(const BenchmarkSpec& spec, const SimConfig& base_cfg, SweepAxis axis,
                  const std::vector<size_t>& values, const EnergyTable& table = {});

// Join sweeps into one table with speedups normalized to each sweep's first
// point. All results must share the same axis.
std::string compare_runs(const std::vector<SweepResult>& results);

// Worker cap for sweep parallelism: min(omp max threads, $EIE_THREADS).
int sweep_thread_cap();

}  // namespace eie
