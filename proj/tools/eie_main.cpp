// eie: compress fully-connected layers into the EIEC sparse format, run them
// through the fixed-point engine or the cycle-accurate PE-array simulator,
// and reproduce the design-space studies (FIFO depth, PE scaling, SRAM
// width, padding, energy).

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eie/bench.hpp"
#include "eie/compress.hpp"
#include "eie/container.hpp"
#include "eie/cyclesim.hpp"
#include "eie/energy.hpp"
#include "eie/errors.hpp"
#include "eie/io.hpp"

using namespace eie;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFormat = 2;
constexpr int kExitVerify = 3;

struct VerifyFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void print_codebook(const Codebook& cb) {
    std::printf("codebook (Q%d.%d):", 16 - cb.fmt.fraction_bits, cb.fmt.fraction_bits);
    for (size_t i = 0; i < Codebook::kEntries; ++i)
        std::printf(" %g", cb.value(i));
    std::printf("  [zero slot %u]\n", cb.zero_slot());
}

int cmd_compress(const std::string& input, double density, const std::string& output,
                 size_t n_pe, int fraction_bits) {
    FixedPointFormat fmt{fraction_bits};
    fmt.check();

    const DenseMatrix w = read_matrix_market(input);
    const SparsityMask mask = prune_magnitude(w, density);
    const Codebook cb = build_codebook(w, mask, fmt);
    QuantizedSparseMatrix q = quantize(w, mask, cb);

    // Canonicalize: weights that quantized to the zero slot fold into the
    // mask (they are numerically zero), so containers round-trip bit-exactly.
    q = decode_interleaved(encode_interleaved(q, 1, PointerWidth::wide), cb);

    const InterleavedCsc enc = encode_interleaved(q, n_pe);
    write_eiec({enc, cb}, output);

    const PaddingStats pad = padding_stats(enc);
    std::printf("%s: %zux%zu, density %.4f (target %.4f), %zu PEs, %zu stored entries, "
                "%llu padding\n",
                output.c_str(), q.rows, q.cols, q.mask.density(), density, n_pe,
                enc.total_entries(), static_cast<unsigned long long>(pad.total));
    print_codebook(cb);
    return kExitOk;
}

void emit_output(const ActivationVector& b, const std::string& output, bool raw) {
    if (output.empty()) {
        for (int16_t r : b.raw) std::printf("%.10g\n", to_real(r, b.fmt));
    } else if (raw) {
        write_activations_raw(b, output);
    } else {
        write_activations_text(b, output);
    }
}

int cmd_run(const std::string& model, const std::string& activations, bool relu,
            const std::string& output, bool raw) {
    const Model m = read_eiec(model);
    const ActivationVector a = read_activations(activations, m.codebook.fmt);
    const ActivationVector b = spmv_compressed(m.enc, m.codebook, a, relu);
    emit_output(b, output, raw);
    return kExitOk;
}

int cmd_simulate(const std::string& model, const std::string& activations, size_t pes,
                 size_t fifo_depth, size_t sram_width, bool relu, const std::string& stats_csv,
                 const std::string& stats_json, const std::string& output, bool raw) {
    Model m = read_eiec(model);
    const ActivationVector a = read_activations(activations, m.codebook.fmt);

    if (pes != 0 && pes != m.enc.n_pe) {
        // Re-partition the stored matrix across the requested PE count.
        const QuantizedSparseMatrix q = decode_interleaved(m.enc, m.codebook);
        m.enc = encode_interleaved(q, pes, PointerWidth::wide);
    }

    SimConfig cfg;
    cfg.n_pe = m.enc.n_pe;
    cfg.fifo_depth = fifo_depth;
    cfg.sram_width_bits = sram_width;

    const auto [b, st] = simulate(m.enc, m.codebook, a, cfg, relu);
    emit_output(b, output, raw);

    if (!stats_csv.empty()) write_file_atomic(stats_csv, stats_to_csv(st, cfg));
    if (!stats_json.empty()) write_file_atomic(stats_json, stats_to_json(st, cfg));

    const LoadEfficiency le = load_efficiency(st);
    std::fprintf(stderr,
                 "simulated %llu cycles (%.6g s at %g MHz), efficiency %.4f, %llu MACs "
                 "(%llu padding), %llu broadcast stalls\n",
                 static_cast<unsigned long long>(st.total_cycles), st.seconds(cfg), cfg.clock_mhz,
                 le.aggregate, static_cast<unsigned long long>(st.mac_count),
                 static_cast<unsigned long long>(st.padding_mac_count),
                 static_cast<unsigned long long>(st.broadcast_stall_cycles));
    return kExitOk;
}

int cmd_bench(const std::string& name, uint64_t seed, const std::string& outdir, size_t n_pe,
              int fraction_bits, bool list) {
    if (list) {
        for (const auto& n : preset_names()) {
            const BenchmarkSpec s = preset(n);
            std::printf("%-8s %6zu x %-6zu weights %4.1f%%  activations %5.1f%%\n", s.name.c_str(),
                        s.out_dim, s.in_dim, 100 * s.weight_density, 100 * s.activation_density);
        }
        return kExitOk;
    }
    BenchmarkSpec spec = preset(name);
    spec.seed = seed;
    const auto [q, a] = generate_synthetic(spec, FixedPointFormat{fraction_bits});
    const InterleavedCsc enc = encode_interleaved(q, n_pe);

    const std::string base = outdir + "/" + name + "-seed" + std::to_string(seed);
    write_eiec({enc, q.codebook}, base + ".eiec");
    write_activations_raw(a, base + ".act");
    std::printf("%s.eiec: %zux%zu, %zu PEs, %zu stored entries, %llu padding\n", base.c_str(),
                q.rows, q.cols, n_pe, enc.total_entries(),
                static_cast<unsigned long long>(padding_stats(enc).total));
    std::printf("%s.act: %zu activations (%zu nonzero)\n", base.c_str(), a.size(),
                a.size() - static_cast<size_t>(std::count(a.raw.begin(), a.raw.end(), 0)));
    return kExitOk;
}

int cmd_sweep(const std::string& name, uint64_t seed, const std::string& axis_name,
              const std::vector<size_t>& values, size_t n_pe, size_t fifo_depth,
              size_t sram_width, const std::string& csv, const std::string& energy_table_path,
              const std::string& compare_csv) {
    BenchmarkSpec spec = preset(name);
    spec.seed = seed;

    SimConfig cfg;
    cfg.n_pe = n_pe;
    cfg.fifo_depth = fifo_depth;
    cfg.sram_width_bits = sram_width;

    EnergyTable table;
    if (!energy_table_path.empty()) table = EnergyTable::from_file(energy_table_path);

    const SweepResult res = sweep(spec, cfg, sweep_axis_from_string(axis_name), values, table);
    const std::string text = res.to_csv();
    if (csv.empty())
        std::fputs(text.c_str(), stdout);
    else
        write_file_atomic(csv, text);
    if (!compare_csv.empty()) write_file_atomic(compare_csv, compare_runs({res}));

    for (const SweepPoint& p : res.points)
        if (p.error) {
            std::fprintf(stderr, "point %zu failed: %s\n", p.value, p.error->c_str());
            return kExitFormat;
        }
    return kExitOk;
}

int cmd_verify(const std::string& model) {
    Model m;
    try {
        m = read_eiec(model);  // checks magic, CRC and structural invariants
    } catch (const FormatError& ex) {
        throw VerifyFailure(ex.what());
    }

    const QuantizedSparseMatrix q = decode_interleaved(m.enc, m.codebook);
    const InterleavedCsc re = encode_interleaved(q, m.enc.n_pe,
                                                 PointerWidth::wide);
    if (!(re == m.enc))
        throw VerifyFailure("round-trip re-encoding differs from the stored encoding");
    if (serialize_eiec({re, m.codebook}) != serialize_eiec(m))
        throw VerifyFailure("round-trip serialization differs");

    std::printf("%s: ok (%zux%zu, %zu PEs, %zu entries, %llu padding, CRC + invariants + "
                "round-trip verified)\n",
                model.c_str(), m.enc.rows, m.enc.cols, m.enc.n_pe, m.enc.total_entries(),
                static_cast<unsigned long long>(padding_stats(m.enc).total));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"compressed sparse M x V toolkit and PE-array simulator"};
    app.require_subcommand(1);

    // compress
    std::string in_path, out_path;
    double density = 0.1;
    size_t pes = 64;
    int fraction_bits = 8;
    auto* compress = app.add_subcommand("compress", "prune + weight-share a dense matrix into EIEC");
    compress->add_option("--input,-i", in_path, "Matrix Market input")->required();
    compress->add_option("--density,-d", density, "target kept fraction (0, 1]")->required();
    compress->add_option("--output,-o", out_path, "EIEC output path")->required();
    compress->add_option("--pes,-n", pes, "PE count", true);
    compress->add_option("--fraction-bits,-f", fraction_bits, "fixed-point fraction bits", true);

    // run
    std::string model_path, act_path, out_act;
    bool relu = false, raw_out = false;
    auto* run = app.add_subcommand("run", "functional fixed-point inference");
    run->add_option("--model,-m", model_path, "EIEC model")->required();
    run->add_option("--activations,-a", act_path, "activation file (text or raw)")->required();
    run->add_flag("--relu", relu, "apply ReLU to the output");
    run->add_option("--output,-o", out_act, "write output activations here (default stdout)");
    run->add_flag("--raw-output", raw_out, "write raw 16-bit output");

    // simulate
    std::string stats_csv, stats_json;
    size_t sim_pes = 0, fifo_depth = 8, sram_width = 64;
    auto* sim = app.add_subcommand("simulate", "cycle-accurate PE-array simulation");
    sim->add_option("--model,-m", model_path, "EIEC model")->required();
    sim->add_option("--activations,-a", act_path, "activation file (text or raw)")->required();
    sim->add_option("--pes,-n", sim_pes, "re-partition across this many PEs");
    sim->add_option("--fifo-depth", fifo_depth, "activation queue depth", true);
    sim->add_option("--sram-width", sram_width, "sparse-matrix SRAM width in bits", true);
    sim->add_flag("--relu", relu, "apply ReLU to the output");
    sim->add_option("--stats", stats_csv, "write stats CSV here");
    sim->add_option("--json", stats_json, "write stats JSON here");
    sim->add_option("--output,-o", out_act, "write output activations here (default stdout)");
    sim->add_flag("--raw-output", raw_out, "write raw 16-bit output");

    // bench
    std::string preset_name = "Alex-6", outdir = ".";
    uint64_t seed = 1;
    bool list = false;
    auto* bench = app.add_subcommand("bench", "materialize a synthetic benchmark preset");
    bench->add_option("--preset,-p", preset_name, "preset name", true);
    bench->add_option("--seed,-s", seed, "generator seed", true);
    bench->add_option("--outdir,-O", outdir, "output directory", true);
    bench->add_option("--pes,-n", pes, "PE count", true);
    bench->add_option("--fraction-bits,-f", fraction_bits, "fixed-point fraction bits", true);
    bench->add_flag("--list", list, "list presets and exit");

    // sweep
    std::string axis = "fifo", sweep_csv, energy_table_path, compare_csv;
    std::vector<size_t> values;
    auto* sweep_cmd = app.add_subcommand("sweep", "design-space sweep on a preset");
    sweep_cmd->add_option("--preset,-p", preset_name, "preset name", true);
    sweep_cmd->add_option("--seed,-s", seed, "generator seed", true);
    sweep_cmd->add_option("--axis", axis, "fifo | pes | sram", true);
    sweep_cmd->add_option("--values", values, "axis values")->required()->delimiter(',');
    sweep_cmd->add_option("--pes,-n", pes, "base PE count", true);
    sweep_cmd->add_option("--fifo-depth", fifo_depth, "base queue depth", true);
    sweep_cmd->add_option("--sram-width", sram_width, "base SRAM width (bits)", true);
    sweep_cmd->add_option("--csv", sweep_csv, "write sweep CSV here (default stdout)");
    sweep_cmd->add_option("--compare", compare_csv, "write speedup table here");
    sweep_cmd->add_option("--energy-table", energy_table_path, "energy table JSON override");

    // verify
    auto* verify = app.add_subcommand("verify", "check a container's CRC, invariants and round-trip");
    verify->add_option("--model,-m", model_path, "EIEC model")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (compress->parsed())
            return cmd_compress(in_path, density, out_path, pes, fraction_bits);
        if (run->parsed())
            return cmd_run(model_path, act_path, relu, out_act, raw_out);
        if (sim->parsed())
            return cmd_simulate(model_path, act_path, sim_pes, fifo_depth, sram_width, relu,
                                stats_csv, stats_json, out_act, raw_out);
        if (bench->parsed())
            return cmd_bench(preset_name, seed, outdir, pes, fraction_bits, list);
        if (sweep_cmd->parsed())
            return cmd_sweep(preset_name, seed, axis, values, pes, fifo_depth, sram_width,
                             sweep_csv, energy_table_path, compare_csv);
        if (verify->parsed())
            return cmd_verify(model_path);
    } catch (const VerifyFailure& ex) {
        std::fprintf(stderr, "verification failed: %s\n", ex.what());
        return kExitVerify;
    } catch (const FormatError& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return kExitFormat;
    } catch (const CapacityError& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return kExitFormat;
    } catch (const ConfigError& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return kExitUsage;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return kExitUsage;
    }
    return kExitUsage;
}
