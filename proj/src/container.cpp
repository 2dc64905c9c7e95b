#include "eie/container.hpp"

#include <fstream>
#include <sstream>

#include "eie/errors.hpp"
#include "eie/io.hpp"

namespace eie {

namespace {

void put_u16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

struct Reader {
    const std::string& s;
    size_t pos = 0;

    void need(size_t n) const {
        if (pos + n > s.size()) throw FormatError("EIEC: truncated container");
    }
    uint8_t u8() {
        need(1);
        return static_cast<uint8_t>(s[pos++]);
    }
    uint16_t u16() {
        need(2);
        const auto v = static_cast<uint16_t>(static_cast<uint8_t>(s[pos]) |
                                             (static_cast<uint8_t>(s[pos + 1]) << 8));
        pos += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int b = 0; b < 4; ++b) v |= static_cast<uint32_t>(static_cast<uint8_t>(s[pos + b])) << (8 * b);
        pos += 4;
        return v;
    }
};

}  // namespace

std::string serialize_eiec(const Model& m) {
    for (size_t k = 0; k < m.enc.slices.size(); ++k)
        if (m.enc.slices[k].entry_count() > 65535)
            throw CapacityError("EIEC: PE " + std::to_string(k) +
                                " exceeds 65535 entries (16-bit pointer overflow)");
    const auto violations = validate(m.enc);
    if (!violations.empty())
        throw FormatError("EIEC: refusing to serialize invalid encoding: " +
                          violations.front().message);
    if (!m.codebook.has_zero_entry() || m.codebook.raw[m.enc.zero_slot] != 0)
        throw FormatError("EIEC: zero slot must hold numeric zero");

    std::string out = "EIEC";
    put_u16(out, kEiecVersion);
    put_u32(out, static_cast<uint32_t>(m.enc.rows));
    put_u32(out, static_cast<uint32_t>(m.enc.cols));
    put_u32(out, static_cast<uint32_t>(m.enc.n_pe));
    put_u16(out, static_cast<uint16_t>(m.codebook.fmt.fraction_bits));
    for (int16_t r : m.codebook.raw) put_u16(out, static_cast<uint16_t>(r));

    for (const PeSlice& s : m.enc.slices) {
        for (uint32_t p : s.col_ptr) put_u16(out, static_cast<uint16_t>(p));
        for (size_t t = 0; t < s.v.size(); ++t)
            out.push_back(static_cast<char>(pack_entry(s.v[t], s.z[t])));
    }
    put_u32(out, crc32(reinterpret_cast<const uint8_t*>(out.data()), out.size()));
    return out;
}

Model parse_eiec(const std::string& bytes) {
    if (bytes.size() < 8 || bytes.compare(0, 4, "EIEC") != 0)
        throw FormatError("EIEC: bad magic");
    const uint32_t stored_crc =
        crc32(reinterpret_cast<const uint8_t*>(bytes.data()), bytes.size() - 4);
    Reader payload_end{bytes, bytes.size() - 4};
    if (payload_end.u32() != stored_crc) throw FormatError("EIEC: CRC mismatch");

    Reader r{bytes, 4};
    const uint16_t version = r.u16();
    if (version != kEiecVersion)
        throw FormatError("EIEC: unsupported version " + std::to_string(version));

    Model m;
    m.enc.rows = r.u32();
    m.enc.cols = r.u32();
    m.enc.n_pe = r.u32();
    if (m.enc.n_pe < 1) throw FormatError("EIEC: n_pe must be >= 1");
    m.codebook.fmt.fraction_bits = r.u16();
    m.codebook.fmt.check();
    for (size_t i = 0; i < Codebook::kEntries; ++i)
        m.codebook.raw[i] = static_cast<int16_t>(r.u16());
    m.enc.zero_slot = m.codebook.zero_slot();  // throws if absent

    m.enc.slices.resize(m.enc.n_pe);
    for (PeSlice& s : m.enc.slices) {
        s.col_ptr.resize(m.enc.cols + 1);
        for (uint32_t& p : s.col_ptr) p = r.u16();
        const size_t n = s.col_ptr.back();
        s.v.resize(n);
        s.z.resize(n);
        for (size_t t = 0; t < n; ++t) {
            const uint8_t b = r.u8();
            s.v[t] = entry_v(b);
            s.z[t] = entry_z(b);
        }
    }
    if (r.pos != bytes.size() - 4) throw FormatError("EIEC: trailing bytes");

    const auto violations = validate(m.enc);
    if (!violations.empty())
        throw FormatError("EIEC: invalid encoding: PE " +
                          std::to_string(violations.front().pe) + ": " +
                          violations.front().message);
    return m;
}

void write_eiec(const Model& m, const std::string& path) {
    write_file_atomic(path, serialize_eiec(m));
}

Model read_eiec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open model file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_eiec(ss.str());
}

}  // namespace eie
