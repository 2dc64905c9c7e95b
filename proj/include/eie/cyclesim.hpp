#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eie/engine.hpp"

namespace eie {

struct SimConfig {
    size_t n_pe = 64;
    size_t fifo_depth = 8;
    size_t sram_width_bits = 64;   // sparse-matrix SRAM row width; 8 entries at 64 bits
    size_t broadcast_latency = 2;  // pipeline fill cycles before the first broadcast lands
    double clock_mhz = 800.0;
    size_t reg_file_entries = 64;  // destination registers per PE; more rows => batching

    void check() const;
};

struct SimStats {
    uint64_t total_cycles = 0;
    std::vector<uint64_t> busy_cycles;    // per PE: cycles that retired an entry
    std::vector<uint64_t> bubble_cycles;  // per PE: total - busy
    uint64_t broadcast_stall_cycles = 0;  // broadcast blocked by a full queue
    uint64_t ptr_sram_reads = 0;          // pointer-pair fetches (two banks, one cycle)
    uint64_t spmat_sram_row_reads = 0;    // distinct SRAM rows touched by column spans
    uint64_t act_regfile_reads = 0;
    uint64_t act_regfile_writes = 0;
    uint64_t act_sram_reads = 0;
    uint64_t act_sram_writes = 0;
    uint64_t mac_count = 0;          // entries retired (kept + padding)
    uint64_t padding_mac_count = 0;  // zero-slot entries retired
    uint64_t input_nonzeros_broadcast = 0;
    uint64_t n_batches = 1;

    double seconds(const SimConfig& cfg) const {
        return static_cast<double>(total_cycles) / (cfg.clock_mhz * 1e6);
    }
};

struct LoadEfficiency {
    std::vector<double> per_pe;
    double aggregate = 1.0;
};

// Functional stand-in for the leading non-zero detection tree: smallest
// index >= from with a nonzero activation (tree timing is folded into
// SimConfig::broadcast_latency).
std::optional<std::pair<size_t, int16_t>> lnzd_scan(const ActivationVector& a, size_t from);

// Cycle-accurate model of the PE array.
//
// Per cycle, in deterministic order:
//   1. Each PE's arithmetic unit: if idle and the decoded-column buffer holds
//      a column from an earlier cycle, start it; retire one (v, z) entry per
//      cycle (MAC into the addressed accumulator, bypass skipping the
//      register read on back-to-back same-row updates).
//   2. Each PE's pointer unit: if the decoded-column buffer is free and the
//      activation queue has a visible head, pop it and read the pointer pair
//      (one cycle, banked). Empty column slices retire right there; others
//      are handed to the buffer for the arithmetic unit.
//   3. The control unit: from cycle broadcast_latency on, broadcast one
//      nonzero activation per cycle to every queue, stalling (counted) while
//      any queue is full. Broadcasts become visible the following cycle.
//
// The run ends when input is exhausted, queues and buffers are empty and
// arithmetic is idle; three trailing cycles flush the pipeline before the
// ReLU + narrowing write-back. A PE's busy cycles are the cycles that retired
// an entry; everything else is starvation bubble.
//
// When a PE owns more rows than reg_file_entries, the output is computed in
// ceil(rows / reg_file_entries) batches: each batch re-streams the input
// against that batch's row slice (entries are walked exactly once overall,
// with zero runs re-encoded per slice), partials stay in the register file
// and the activation SRAM is written once per batch.
//
// The output equals spmv_compressed bit-exactly: config fields change timing
// and traffic statistics, never values.
std::pair<ActivationVector, SimStats> simulate(const InterleavedCsc& e, const Codebook& cb,
                                               const ActivationVector& a, const SimConfig& cfg,
                                               bool apply_relu);

// 1 - bubble/total per PE and aggregated; a run with no MACs is efficiency 1
// by convention.
LoadEfficiency load_efficiency(const SimStats& s);

// Perfect-balance lower bound: stored entries over nonzero-activation columns
// divided by n_pe, at one MAC per PE per cycle.
double theoretical_cycles(const InterleavedCsc& e, const ActivationVector& a, const SimConfig& cfg);
double theoretical_seconds(const InterleavedCsc& e, const ActivationVector& a, const SimConfig& cfg);

// Stats serialization. The CSV is one header-comment line echoing the config,
// a column-name row and one data row; bubble cycles get one column per PE.
std::string stats_to_csv(const SimStats& s, const SimConfig& cfg);
std::string stats_to_json(const SimStats& s, const SimConfig& cfg);

}  // namespace eie
