#include "eie/cyclesim.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "eie/errors.hpp"

#include <cstdio>

#include <json.hpp>

namespace eie {

namespace {

// The arithmetic path is 4 stages deep; the retire cycle is the first, three
// more flush the last result before write-back.
constexpr uint64_t kPipelineDrain = 3;

struct QueueItem {
    uint32_t col;
    int16_t a_raw;
    uint64_t pushed_cycle;
};

struct DecodedColumn {
    int16_t a_raw;
    uint32_t begin;  // entry span in the active slice
    uint32_t end;
    uint64_t buffered_cycle;
};

struct PeState {
    std::deque<QueueItem> fifo;
    std::optional<DecodedColumn> buffer;  // pointer unit -> arithmetic unit
    bool streaming = false;
    DecodedColumn cur{};
    uint32_t next_entry = 0;
    size_t cursor = 0;  // running local-row sum within the current column
    std::vector<int64_t> acc;
    // bypass bookkeeping
    uint64_t last_mac_cycle = 0;
    size_t last_dest = SIZE_MAX;

    uint64_t busy = 0;
};

size_t distinct_sram_rows(size_t begin, size_t end, size_t entries_per_row) {
    if (begin >= end) return 0;
    return (end - 1) / entries_per_row - begin / entries_per_row + 1;
}

// Restrict each PE's slice to local rows [lo, hi), rebasing positions to lo
// and re-encoding zero runs (padding re-emitted greedily per slice).
std::vector<PeSlice> batch_slices(const InterleavedCsc& e, size_t lo, size_t hi) {
    std::vector<PeSlice> out(e.n_pe);
    for (size_t k = 0; k < e.n_pe; ++k) {
        const PeSlice& s = e.slices[k];
        PeSlice& d = out[k];
        d.col_ptr.assign(e.cols + 1, 0);
        for (size_t j = 0; j < e.cols; ++j) {
            size_t cursor = 0;
            size_t sub_cursor = 0;
            for (size_t t = s.col_ptr[j]; t < s.col_ptr[j + 1]; ++t) {
                cursor += s.z[t];
                const size_t pos = cursor++;
                if (s.v[t] == e.zero_slot || pos < lo || pos >= hi) continue;
                size_t gap = (pos - lo) - sub_cursor;
                while (gap > 15) {
                    d.v.push_back(e.zero_slot);
                    d.z.push_back(15);
                    sub_cursor += 16;
                    gap -= 16;
                }
                d.v.push_back(s.v[t]);
                d.z.push_back(static_cast<uint8_t>(gap));
                sub_cursor = (pos - lo) + 1;
            }
            d.col_ptr[j + 1] = static_cast<uint32_t>(d.v.size());
        }
    }
    return out;
}

}  // namespace

void SimConfig::check() const {
    if (n_pe < 1) throw ConfigError("SimConfig: n_pe must be >= 1");
    if (fifo_depth < 1) throw ConfigError("SimConfig: fifo_depth must be >= 1");
    if (sram_width_bits < 8 || sram_width_bits % 8 != 0)
        throw ConfigError("SimConfig: sram_width_bits must be a positive multiple of 8");
    if (broadcast_latency < 1) throw ConfigError("SimConfig: broadcast_latency must be >= 1");
    if (clock_mhz <= 0) throw ConfigError("SimConfig: clock_mhz must be positive");
    if (reg_file_entries < 1) throw ConfigError("SimConfig: reg_file_entries must be >= 1");
}

std::optional<std::pair<size_t, int16_t>> lnzd_scan(const ActivationVector& a, size_t from) {
    for (size_t j = from; j < a.size(); ++j)
        if (a.raw[j] != 0) return std::make_pair(j, a.raw[j]);
    return std::nullopt;
}

std::pair<ActivationVector, SimStats> simulate(const InterleavedCsc& e, const Codebook& cb,
                                               const ActivationVector& a, const SimConfig& cfg,
                                               bool apply_relu) {
    cfg.check();
    if (cfg.n_pe != e.n_pe)
        throw ConfigError("simulate: SimConfig::n_pe must match the encoded matrix");
    if (a.size() != e.cols)
        throw std::invalid_argument("simulate: activation length does not match matrix columns");
    if (!(a.fmt == cb.fmt))
        throw std::invalid_argument("simulate: activation and codebook formats differ");

    const size_t entries_per_row = cfg.sram_width_bits / 8;
    const size_t max_local_rows = e.local_rows(0);
    const size_t n_batches = std::max<size_t>(1, (max_local_rows + cfg.reg_file_entries - 1) /
                                                     cfg.reg_file_entries);
    const bool source_in_regfile = a.size() <= cfg.n_pe * cfg.reg_file_entries;

    SimStats st;
    st.busy_cycles.assign(e.n_pe, 0);
    st.bubble_cycles.assign(e.n_pe, 0);
    st.n_batches = n_batches;

    ActivationVector b;
    b.fmt = cb.fmt;
    b.raw.assign(e.rows, 0);

    std::vector<PeState> pes(e.n_pe);
    uint64_t cycle = 0;
    bool any_mac_ever = false;

    for (size_t batch = 0; batch < n_batches; ++batch) {
        const size_t lo = batch * cfg.reg_file_entries;
        const size_t hi = std::min(max_local_rows, lo + cfg.reg_file_entries);

        // Single-batch runs walk the stored stream as-is, padding included.
        const std::vector<PeSlice>* slices = &e.slices;
        std::vector<PeSlice> scratch;
        if (n_batches > 1) {
            scratch = batch_slices(e, lo, hi);
            slices = &scratch;
        }

        for (size_t k = 0; k < e.n_pe; ++k) {
            PeState& pe = pes[k];
            const size_t lrows = e.local_rows(k);
            pe.acc.assign(lrows > lo ? std::min(hi, lrows) - lo : 0, 0);
            pe.streaming = false;
            pe.buffer.reset();
            pe.last_dest = SIZE_MAX;
            pe.last_mac_cycle = 0;
        }

        std::optional<std::pair<size_t, int16_t>> next_nz = lnzd_scan(a, 0);
        const uint64_t first_inject = cycle + cfg.broadcast_latency;
        bool batch_mac = false;

        while (true) {
            // Batch done: input exhausted, queues and buffers drained, ALUs idle.
            bool pe_work = false;
            for (const PeState& pe : pes)
                if (pe.streaming || pe.buffer || !pe.fifo.empty()) {
                    pe_work = true;
                    break;
                }
            if (!next_nz && !pe_work) break;

            ++cycle;

            for (size_t k = 0; k < e.n_pe; ++k) {
                PeState& pe = pes[k];
                const PeSlice& s = (*slices)[k];

                // Arithmetic unit: take a buffered column, retire one entry.
                if (!pe.streaming && pe.buffer && pe.buffer->buffered_cycle < cycle) {
                    pe.cur = *pe.buffer;
                    pe.buffer.reset();
                    pe.streaming = true;
                    pe.next_entry = pe.cur.begin;
                    pe.cursor = 0;
                }
                if (pe.streaming) {
                    const uint32_t t = pe.next_entry++;
                    pe.cursor += s.z[t];
                    const size_t dest = pe.cursor++;
                    pe.acc[dest] += static_cast<int64_t>(static_cast<int32_t>(cb.raw[s.v[t]]) *
                                                         static_cast<int32_t>(pe.cur.a_raw));
                    ++st.mac_count;
                    batch_mac = true;
                    if (s.v[t] == e.zero_slot) ++st.padding_mac_count;
                    if (!(pe.last_mac_cycle + 1 == cycle && pe.last_dest == dest))
                        ++st.act_regfile_reads;  // bypass skips the read-back
                    ++st.act_regfile_writes;
                    pe.last_mac_cycle = cycle;
                    pe.last_dest = dest;
                    ++pe.busy;
                    if (pe.next_entry == pe.cur.end) pe.streaming = false;
                }

                // Pointer unit: pop one visible queue head per cycle.
                if (!pe.buffer && !pe.fifo.empty() && pe.fifo.front().pushed_cycle < cycle) {
                    const QueueItem item = pe.fifo.front();
                    pe.fifo.pop_front();
                    ++st.ptr_sram_reads;
                    const uint32_t begin = s.col_ptr[item.col];
                    const uint32_t end = s.col_ptr[item.col + 1];
                    if (begin != end) {
                        st.spmat_sram_row_reads += distinct_sram_rows(begin, end, entries_per_row);
                        pe.buffer = DecodedColumn{item.a_raw, begin, end, cycle};
                    }
                }
            }

            // Control unit: broadcast one nonzero per cycle once the pipeline
            // has filled, unless some queue is full. An activation keeps its
            // queue slot until its column has fully streamed, so in-flight
            // columns count toward occupancy.
            if (next_nz && cycle >= first_inject) {
                bool space = true;
                for (const PeState& pe : pes) {
                    const size_t occupancy = pe.fifo.size() + (pe.buffer ? 1 : 0) +
                                             (pe.streaming ? 1 : 0);
                    if (occupancy >= cfg.fifo_depth) {
                        space = false;
                        break;
                    }
                }
                if (space) {
                    for (PeState& pe : pes)
                        pe.fifo.push_back({static_cast<uint32_t>(next_nz->first), next_nz->second, cycle});
                    ++st.input_nonzeros_broadcast;
                    if (source_in_regfile)
                        ++st.act_regfile_reads;
                    else
                        ++st.act_sram_reads;
                    next_nz = lnzd_scan(a, next_nz->first + 1);
                } else {
                    ++st.broadcast_stall_cycles;
                }
            }
        }

        if (batch_mac) {
            cycle += kPipelineDrain;
            any_mac_ever = true;
        }

        // Write-back: ReLU + narrow each live accumulator of this batch.
        for (size_t k = 0; k < e.n_pe; ++k) {
            PeState& pe = pes[k];
            for (size_t r = 0; r < pe.acc.size(); ++r) {
                int64_t wide = pe.acc[r];
                if (apply_relu && wide < 0) wide = 0;
                b.raw[(lo + r) * e.n_pe + k] = narrow_accumulator(wide, cb.fmt);
            }
            if (n_batches > 1)
                st.act_sram_writes += pe.acc.size();
            else
                st.act_regfile_writes += pe.acc.size();
        }
    }

    (void)any_mac_ever;
    st.total_cycles = cycle;
    for (size_t k = 0; k < e.n_pe; ++k) {
        st.busy_cycles[k] = pes[k].busy;
        st.bubble_cycles[k] = st.total_cycles - pes[k].busy;
    }
    return {std::move(b), std::move(st)};
}

LoadEfficiency load_efficiency(const SimStats& s) {
    LoadEfficiency le;
    const size_t n = s.busy_cycles.size();
    le.per_pe.assign(n, 1.0);
    if (s.mac_count == 0 || s.total_cycles == 0) return le;  // zero work: 1 by convention

    uint64_t total_bubble = 0;
    for (size_t k = 0; k < n; ++k) {
        le.per_pe[k] = 1.0 - static_cast<double>(s.bubble_cycles[k]) /
                                 static_cast<double>(s.total_cycles);
        total_bubble += s.bubble_cycles[k];
    }
    le.aggregate = 1.0 - static_cast<double>(total_bubble) /
                             (static_cast<double>(s.total_cycles) * static_cast<double>(n));
    return le;
}

double theoretical_cycles(const InterleavedCsc& e, const ActivationVector& a, const SimConfig& cfg) {
    cfg.check();
    if (a.size() != e.cols)
        throw std::invalid_argument("theoretical_cycles: dimension mismatch");
    return static_cast<double>(count_stored_macs(e, a)) / static_cast<double>(cfg.n_pe);
}

double theoretical_seconds(const InterleavedCsc& e, const ActivationVector& a, const SimConfig& cfg) {
    return theoretical_cycles(e, a, cfg) / (cfg.clock_mhz * 1e6);
}

std::string stats_to_csv(const SimStats& s, const SimConfig& cfg) {
    std::ostringstream os;
    os << "# n_pe=" << cfg.n_pe << " fifo_depth=" << cfg.fifo_depth
       << " sram_width_bits=" << cfg.sram_width_bits
       << " broadcast_latency=" << cfg.broadcast_latency << " clock_mhz=" << cfg.clock_mhz
       << " reg_file_entries=" << cfg.reg_file_entries << "\n";
    os << "total_cycles";
    for (size_t k = 0; k < s.bubble_cycles.size(); ++k) os << ",bubble_cycles_pe_" << k;
    os << ",ptr_reads,spmat_row_reads,act_accesses,macs,padding_macs,efficiency,seconds\n";

    const LoadEfficiency le = load_efficiency(s);
    const uint64_t act = s.act_regfile_reads + s.act_regfile_writes + s.act_sram_reads +
                         s.act_sram_writes;
    os << s.total_cycles;
    for (uint64_t bc : s.bubble_cycles) os << "," << bc;
    os << "," << s.ptr_sram_reads << "," << s.spmat_sram_row_reads << "," << act << ","
       << s.mac_count << "," << s.padding_mac_count;
    char buf[64];
    std::snprintf(buf, sizeof buf, ",%.6f,%.9g", le.aggregate, s.seconds(cfg));
    os << buf << "\n";
    return os.str();
}

std::string stats_to_json(const SimStats& s, const SimConfig& cfg) {
    const LoadEfficiency le = load_efficiency(s);
    nlohmann::json j{
        {"config",
         {{"n_pe", cfg.n_pe},
          {"fifo_depth", cfg.fifo_depth},
          {"sram_width_bits", cfg.sram_width_bits},
          {"broadcast_latency", cfg.broadcast_latency},
          {"clock_mhz", cfg.clock_mhz},
          {"reg_file_entries", cfg.reg_file_entries}}},
        {"total_cycles", s.total_cycles},
        {"busy_cycles", s.busy_cycles},
        {"bubble_cycles", s.bubble_cycles},
        {"broadcast_stall_cycles", s.broadcast_stall_cycles},
        {"ptr_sram_reads", s.ptr_sram_reads},
        {"spmat_sram_row_reads", s.spmat_sram_row_reads},
        {"act_regfile_reads", s.act_regfile_reads},
        {"act_regfile_writes", s.act_regfile_writes},
        {"act_sram_reads", s.act_sram_reads},
        {"act_sram_writes", s.act_sram_writes},
        {"mac_count", s.mac_count},
        {"padding_mac_count", s.padding_mac_count},
        {"input_nonzeros_broadcast", s.input_nonzeros_broadcast},
        {"n_batches", s.n_batches},
        {"efficiency", le.aggregate},
        {"seconds", s.seconds(cfg)},
    };
    return j.dump(2);
}

}  // namespace eie
