#pragma once

#include <map>
#include <string>

#include "eie/cyclesim.hpp"

namespace eie {

// Per-event energies in picojoules (45nm-class defaults). SRAM and DRAM read
// costs for widths other than 32 bits scale linearly from the 32-bit value
// unless an explicit per-width entry is supplied; the linear scaling is a
// placeholder, not a memory model.
struct EnergyTable {
    double int_add_pj = 0.1;
    double float_add_pj = 0.9;
    double int_mult_pj = 3.1;
    double float_mult_pj = 3.7;
    double sram_read_32b_pj = 5.0;
    double dram_read_32b_pj = 640.0;

    // Explicit width (bits) -> pJ overrides. When non-empty, a lookup for a
    // width without an entry is a configuration error instead of scaling.
    std::map<size_t, double> sram_read_pj;

    double sram_read(size_t width_bits) const;
    double dram_read(size_t width_bits) const;  // always linear from 32b

    void check() const;

    // Accepts keys: int_add, float_add, int_mult, float_mult, sram_read_32b,
    // dram_read_32b, and sram_read_<W>b width entries. Values are pJ.
    static EnergyTable from_json_text(const std::string& text);
    static EnergyTable from_file(const std::string& path);
};

struct EnergyReport {
    double weight_fetch_j = 0;   // sparse-matrix SRAM rows
    double pointer_fetch_j = 0;  // pointer-pair reads, priced as 32-bit reads
    double activation_j = 0;     // register-file + activation SRAM traffic
    double arithmetic_j = 0;     // one multiply + one add per MAC
    double total_j = 0;
    double per_inference_j = 0;
    double dram_weight_fetch_j = 0;  // counterfactual: same weight volume from DRAM

    std::string to_json() const;
    std::string to_csv() const;
};

// Event counts x per-event costs. Register-file accesses are priced as 32-bit
// SRAM reads (the table carries no register-file entry).
EnergyReport estimate_energy(const SimStats& s, const SimConfig& cfg, const EnergyTable& t);

// Multiplicative savings of compressed SRAM-resident inference over dense
// DRAM-resident inference: a fixed 120x system-level SRAM-vs-DRAM factor,
// 1/weight_density from pruning, 32/bits from weight narrowing and
// 1/activation_density from skipping zero activations.
struct SavingsBreakdown {
    double sram_vs_dram = 120.0;
    double pruning = 1.0;
    double weight_width = 1.0;
    double act_sparsity = 1.0;
    double product = 120.0;
};

SavingsBreakdown savings_decomposition(double weight_density, double act_density,
                                       unsigned bits_per_weight);

}  // namespace eie
