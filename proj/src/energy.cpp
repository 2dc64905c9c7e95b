#include "eie/energy.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "eie/errors.hpp"

namespace eie {

void EnergyTable::check() const {
    for (double v : {int_add_pj, float_add_pj, int_mult_pj, float_mult_pj, sram_read_32b_pj,
                     dram_read_32b_pj})
        if (!(v > 0)) throw ConfigError("EnergyTable: all energies must be positive");
    for (const auto& [w, v] : sram_read_pj)
        if (!(v > 0) || w == 0) throw ConfigError("EnergyTable: bad sram_read width entry");
}

double EnergyTable::sram_read(size_t width_bits) const {
    if (!sram_read_pj.empty()) {
        auto it = sram_read_pj.find(width_bits);
        if (it == sram_read_pj.end())
            throw ConfigError("EnergyTable: no sram_read entry for width " +
                              std::to_string(width_bits) + " bits");
        return it->second;
    }
    return sram_read_32b_pj * static_cast<double>(width_bits) / 32.0;
}

double EnergyTable::dram_read(size_t width_bits) const {
    return dram_read_32b_pj * static_cast<double>(width_bits) / 32.0;
}

EnergyTable EnergyTable::from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    EnergyTable t;
    for (const auto& [key, val] : j.items()) {
        const double pj = val.get<double>();
        if (key == "int_add")
            t.int_add_pj = pj;
        else if (key == "float_add")
            t.float_add_pj = pj;
        else if (key == "int_mult")
            t.int_mult_pj = pj;
        else if (key == "float_mult")
            t.float_mult_pj = pj;
        else if (key == "sram_read_32b")
            t.sram_read_32b_pj = pj;
        else if (key == "dram_read_32b")
            t.dram_read_32b_pj = pj;
        else if (key.starts_with("sram_read_") && key.ends_with("b")) {
            const std::string w = key.substr(10, key.size() - 11);
            t.sram_read_pj[std::stoul(w)] = pj;
        } else {
            throw ConfigError("EnergyTable: unknown event '" + key + "'");
        }
    }
    t.check();
    return t;
}

EnergyTable EnergyTable::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("EnergyTable: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

EnergyReport estimate_energy(const SimStats& s, const SimConfig& cfg, const EnergyTable& t) {
    t.check();
    constexpr double kPj = 1e-12;

    EnergyReport r;
    r.weight_fetch_j = static_cast<double>(s.spmat_sram_row_reads) *
                       t.sram_read(cfg.sram_width_bits) * kPj;
    r.pointer_fetch_j = static_cast<double>(s.ptr_sram_reads) * t.sram_read(32) * kPj;
    const uint64_t act_accesses = s.act_regfile_reads + s.act_regfile_writes + s.act_sram_reads +
                                  s.act_sram_writes;
    r.activation_j = static_cast<double>(act_accesses) * t.sram_read(32) * kPj;
    r.arithmetic_j = static_cast<double>(s.mac_count) * (t.int_mult_pj + t.int_add_pj) * kPj;
    r.total_j = r.weight_fetch_j + r.pointer_fetch_j + r.activation_j + r.arithmetic_j;
    r.per_inference_j = r.total_j;
    r.dram_weight_fetch_j = static_cast<double>(s.spmat_sram_row_reads) *
                            t.dram_read(cfg.sram_width_bits) * kPj;
    return r;
}

std::string EnergyReport::to_json() const {
    nlohmann::json j{
        {"weight_fetch_j", weight_fetch_j},   {"pointer_fetch_j", pointer_fetch_j},
        {"activation_j", activation_j},       {"arithmetic_j", arithmetic_j},
        {"total_j", total_j},                 {"per_inference_j", per_inference_j},
        {"dram_weight_fetch_j", dram_weight_fetch_j},
    };
    return j.dump(2);
}

std::string EnergyReport::to_csv() const {
    std::ostringstream os;
    os << "weight_fetch_j,pointer_fetch_j,activation_j,arithmetic_j,total_j,per_inference_j,"
          "dram_weight_fetch_j\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", weight_fetch_j,
                  pointer_fetch_j, activation_j, arithmetic_j, total_j, per_inference_j,
                  dram_weight_fetch_j);
    os << buf;
    return os.str();
}

SavingsBreakdown savings_decomposition(double weight_density, double act_density,
                                       unsigned bits_per_weight) {
    if (!(weight_density > 0 && weight_density <= 1))
        throw std::invalid_argument("savings_decomposition: weight density must be in (0, 1]");
    if (!(act_density > 0 && act_density <= 1))
        throw std::invalid_argument("savings_decomposition: activation density must be in (0, 1]");
    if (bits_per_weight < 1 || bits_per_weight > 32)
        throw std::invalid_argument("savings_decomposition: bits per weight must be in [1, 32]");

    SavingsBreakdown b;
    b.pruning = 1.0 / weight_density;
    b.weight_width = 32.0 / bits_per_weight;
    b.act_sparsity = 1.0 / act_density;
    b.product = b.sram_vs_dram * b.pruning * b.weight_width * b.act_sparsity;
    return b;
}

}  // namespace eie
