#include "eie/io.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eie/errors.hpp"

namespace eie {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

DenseMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open matrix file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw FormatError(path + ": empty file");
    std::istringstream banner(lower(line));
    std::string magic, object, format, field, symmetry;
    banner >> magic >> object >> format >> field >> symmetry;
    if (magic != "%%matrixmarket" || object != "matrix")
        throw FormatError(path + ": not a Matrix Market matrix");
    if (format != "array" && format != "coordinate")
        throw FormatError(path + ": unsupported format '" + format + "'");
    if (field != "real" && field != "integer" && field != "double" && field != "pattern")
        throw FormatError(path + ": unsupported field '" + field + "'");
    if (symmetry != "general")
        throw FormatError(path + ": only general symmetry is supported");
    if (format == "array" && field == "pattern")
        throw FormatError(path + ": array format cannot be pattern");

    // Skip comments.
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') break;
    }

    std::istringstream sizes(line);
    size_t rows = 0, cols = 0, nnz = 0;
    if (!(sizes >> rows >> cols)) throw FormatError(path + ": bad size line");
    if (format == "coordinate" && !(sizes >> nnz))
        throw FormatError(path + ": coordinate size line needs nnz");
    if (rows < 1 || cols < 1) throw FormatError(path + ": dimensions must be >= 1");

    DenseMatrix w(rows, cols);
    if (format == "array") {
        // Column-major dense values.
        for (size_t j = 0; j < cols; ++j)
            for (size_t i = 0; i < rows; ++i) {
                double v;
                if (!(in >> v)) throw FormatError(path + ": truncated array data");
                w.at(i, j) = v;
            }
    } else {
        for (size_t t = 0; t < nnz; ++t) {
            size_t i, j;
            if (!(in >> i >> j)) throw FormatError(path + ": truncated coordinate data");
            double v = 1.0;
            if (field != "pattern" && !(in >> v))
                throw FormatError(path + ": truncated coordinate data");
            if (i < 1 || i > rows || j < 1 || j > cols)
                throw FormatError(path + ": coordinate out of range");
            w.at(i - 1, j - 1) = v;
        }
    }
    return w;
}

void write_matrix_market(const DenseMatrix& w, const std::string& path) {
    std::ostringstream os;
    os << "%%MatrixMarket matrix array real general\n";
    os << w.rows << " " << w.cols << "\n";
    char buf[48];
    for (size_t j = 0; j < w.cols; ++j)
        for (size_t i = 0; i < w.rows; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g\n", w.at(i, j));
            os << buf;
        }
    write_file_atomic(path, os.str());
}

ActivationVector read_activations(const std::string& path, FixedPointFormat fmt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open activation file: " + path);

    std::string first;
    std::getline(in, first);
    if (first.starts_with("EIEA1 ")) {
        std::istringstream hdr(first.substr(6));
        size_t length = 0;
        int fbits = -1;
        if (!(hdr >> length >> fbits)) throw FormatError(path + ": bad raw activation header");
        ActivationVector a;
        a.fmt.fraction_bits = fbits;
        a.fmt.check();
        a.raw.resize(length);
        std::vector<uint8_t> bytes(length * 2);
        in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (static_cast<size_t>(in.gcount()) != bytes.size())
            throw FormatError(path + ": truncated raw activation payload");
        for (size_t i = 0; i < length; ++i)
            a.raw[i] = static_cast<int16_t>(static_cast<uint16_t>(bytes[2 * i]) |
                                            (static_cast<uint16_t>(bytes[2 * i + 1]) << 8));
        return a;
    }

    // Text: one value per line.
    std::vector<double> vals;
    std::string line = first;
    do {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double v;
        if (ls >> v) vals.push_back(v);
    } while (std::getline(in, line));
    return quantize_activations(vals, fmt);
}

void write_activations_text(const ActivationVector& a, const std::string& path) {
    std::ostringstream os;
    char buf[48];
    for (int16_t r : a.raw) {
        std::snprintf(buf, sizeof buf, "%.10g\n", to_real(r, a.fmt));
        os << buf;
    }
    write_file_atomic(path, os.str());
}

void write_activations_raw(const ActivationVector& a, const std::string& path) {
    std::ostringstream os;
    os << "EIEA1 " << a.raw.size() << " " << a.fmt.fraction_bits << "\n";
    for (int16_t r : a.raw) {
        const auto u = static_cast<uint16_t>(r);
        os.put(static_cast<char>(u & 0xff));
        os.put(static_cast<char>(u >> 8));
    }
    write_file_atomic(path, os.str());
}

void write_file_atomic(const std::string& path, const std::string& bytes) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot write " + tmp);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw FormatError("short write to " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

uint32_t crc32(const uint8_t* data, size_t len, uint32_t seed) {
    static const std::array<uint32_t, 256> table = [] {
        std::array<uint32_t, 256> t{};
        for (uint32_t i = 0; i < 256; ++i) {
            uint32_t c = i;
            for (int b = 0; b < 8; ++b) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    uint32_t c = seed ^ 0xffffffffu;
    for (size_t i = 0; i < len; ++i) c = table[(c ^ data[i]) & 0xffu] ^ (c >> 8);
    return c ^ 0xffffffffu;
}

}  // namespace eie
