#include <gtest/gtest.h>

#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "eie/container.hpp"
#include "eie/errors.hpp"
#include "eie/io.hpp"

using namespace eie;
namespace fs = std::filesystem;

namespace {

class IoTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("eie-io-" + std::to_string(::getpid()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    static void write_text(const std::string& p, const std::string& text) {
        std::ofstream out(p, std::ios::binary);
        out << text;
    }

    fs::path dir_;
};

Codebook identity_codebook() {
    Codebook cb;
    cb.fmt = FixedPointFormat{8};
    for (size_t c = 0; c < Codebook::kEntries; ++c)
        cb.raw[c] = static_cast<int16_t>(c << 8);
    return cb;
}

QuantizedSparseMatrix random_q(size_t rows, size_t cols, double density, uint64_t seed) {
    std::mt19937_64 gen(seed);
    QuantizedSparseMatrix q;
    q.rows = rows;
    q.cols = cols;
    q.mask = SparsityMask(rows, cols);
    q.codebook = identity_codebook();
    for (size_t t = 0; t < rows * cols; ++t) {
        if (static_cast<double>(gen() >> 11) * 0x1.0p-53 >= density) continue;
        q.mask.kept[t] = 1;
        q.index.push_back(static_cast<uint8_t>(1 + gen() % 15));
    }
    return q;
}

}  // namespace

TEST_F(IoTest, MatrixMarketArray) {
    write_text(path("a.mtx"),
               "%%MatrixMarket matrix array real general\n"
               "% comment\n"
               "2 3\n"
               "1.5\n-2\n0\n4\n0.25\n-0.125\n");
    const DenseMatrix w = read_matrix_market(path("a.mtx"));
    ASSERT_EQ(w.rows, 2u);
    ASSERT_EQ(w.cols, 3u);
    // column-major input order
    EXPECT_DOUBLE_EQ(w.at(0, 0), 1.5);
    EXPECT_DOUBLE_EQ(w.at(1, 0), -2.0);
    EXPECT_DOUBLE_EQ(w.at(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(w.at(1, 1), 4.0);
    EXPECT_DOUBLE_EQ(w.at(0, 2), 0.25);
    EXPECT_DOUBLE_EQ(w.at(1, 2), -0.125);
}

TEST_F(IoTest, MatrixMarketCoordinate) {
    write_text(path("c.mtx"),
               "%%MatrixMarket matrix coordinate real general\n"
               "3 3 2\n"
               "1 2 0.5\n"
               "3 1 -1\n");
    const DenseMatrix w = read_matrix_market(path("c.mtx"));
    EXPECT_DOUBLE_EQ(w.at(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(w.at(2, 0), -1.0);
    EXPECT_DOUBLE_EQ(w.at(1, 1), 0.0);
}

TEST_F(IoTest, MatrixMarketErrors) {
    write_text(path("bad1.mtx"), "%%MatrixMarket matrix array complex general\n1 1\n0 0\n");
    EXPECT_THROW(read_matrix_market(path("bad1.mtx")), FormatError);
    write_text(path("bad2.mtx"), "%%MatrixMarket matrix array real symmetric\n1 1\n0\n");
    EXPECT_THROW(read_matrix_market(path("bad2.mtx")), FormatError);
    write_text(path("bad3.mtx"), "%%MatrixMarket matrix array real general\n2 2\n1\n");
    EXPECT_THROW(read_matrix_market(path("bad3.mtx")), FormatError);
    write_text(path("bad4.mtx"), "%%MatrixMarket matrix coordinate real general\n2 2 1\n5 1 1\n");
    EXPECT_THROW(read_matrix_market(path("bad4.mtx")), FormatError);
    EXPECT_THROW(read_matrix_market(path("missing.mtx")), FormatError);
}

TEST_F(IoTest, MatrixMarketWriteReadRoundTrip) {
    DenseMatrix w(3, 2);
    w.at(0, 0) = 0.1;
    w.at(2, 1) = -7.25;
    write_matrix_market(w, path("w.mtx"));
    const DenseMatrix back = read_matrix_market(path("w.mtx"));
    EXPECT_EQ(back.values, w.values);
}

TEST_F(IoTest, ActivationTextRoundTrip) {
    const auto a = quantize_activations({0.0, 1.0, -0.5, 0.125, 100.0}, FixedPointFormat{8});
    write_activations_text(a, path("a.txt"));
    const ActivationVector back = read_activations(path("a.txt"), a.fmt);
    EXPECT_EQ(back.raw, a.raw);  // Q8.8 values print exactly
}

TEST_F(IoTest, ActivationRawRoundTrip) {
    ActivationVector a;
    a.fmt = FixedPointFormat{6};
    a.raw = {0, 1, -1, 32767, -32768, 12345};
    write_activations_raw(a, path("a.bin"));
    const ActivationVector back = read_activations(path("a.bin"), FixedPointFormat{8});
    EXPECT_EQ(back.raw, a.raw);
    EXPECT_EQ(back.fmt.fraction_bits, 6);  // header wins over the caller hint
}

TEST_F(IoTest, ActivationTextCommentsAndErrors) {
    write_text(path("c.txt"), "# header\n1.0\n# mid\n0.5 # trailing\n");
    const ActivationVector a = read_activations(path("c.txt"), FixedPointFormat{8});
    EXPECT_EQ(a.raw, (std::vector<int16_t>{256, 128}));
    write_text(path("trunc.bin"), "EIEA1 4 8\nAB");
    EXPECT_THROW(read_activations(path("trunc.bin"), FixedPointFormat{8}), FormatError);
}

TEST_F(IoTest, AtomicWriteLeavesNoTemp) {
    write_file_atomic(path("out.txt"), "hello");
    EXPECT_TRUE(fs::exists(path("out.txt")));
    EXPECT_FALSE(fs::exists(path("out.txt.tmp")));
}

TEST(Crc32, KnownVector) {
    const char* s = "123456789";
    EXPECT_EQ(crc32(reinterpret_cast<const uint8_t*>(s), 9), 0xCBF43926u);
    EXPECT_EQ(crc32(nullptr, 0), 0u);
}

TEST_F(IoTest, ContainerRoundTripIdentity) {
    const QuantizedSparseMatrix q = random_q(37, 29, 0.2, 77);
    const Model m{encode_interleaved(q, 4), q.codebook};
    write_eiec(m, path("m.eiec"));
    const Model back = read_eiec(path("m.eiec"));
    EXPECT_EQ(back.enc, m.enc);
    EXPECT_EQ(back.codebook, m.codebook);
}

TEST_F(IoTest, ContainerGoldenBytes) {
    // 2x1 matrix, 1 PE, single entry (index 3, row 1): layout checked byte by
    // byte against the documented format.
    QuantizedSparseMatrix q;
    q.rows = 2;
    q.cols = 1;
    q.mask = SparsityMask(2, 1);
    q.mask.set(1, 0, true);
    q.index = {3};
    q.codebook = identity_codebook();
    const std::string bytes = serialize_eiec({encode_interleaved(q, 1), q.codebook});

    std::string expect = "EIEC";
    auto u16 = [&](uint16_t v) {
        expect.push_back(static_cast<char>(v & 0xff));
        expect.push_back(static_cast<char>(v >> 8));
    };
    auto u32 = [&](uint32_t v) {
        for (int b = 0; b < 4; ++b) expect.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
    };
    u16(1);          // version
    u32(2);          // rows
    u32(1);          // cols
    u32(1);          // n_pe
    u16(8);          // fraction bits
    for (int c = 0; c < 16; ++c) u16(static_cast<uint16_t>(c << 8));  // codebook
    u16(0);          // col_ptr[0]
    u16(1);          // col_ptr[1]
    expect.push_back(static_cast<char>(0x13));  // z=1 high nibble, v=3 low nibble
    u32(crc32(reinterpret_cast<const uint8_t*>(expect.data()), expect.size()));
    EXPECT_EQ(bytes, expect);
}

TEST_F(IoTest, ContainerRejectsCorruption) {
    const QuantizedSparseMatrix q = random_q(16, 16, 0.3, 99);
    const Model m{encode_interleaved(q, 2), q.codebook};
    const std::string good = serialize_eiec(m);

    for (size_t flip : {size_t{0}, size_t{9}, good.size() / 2, good.size() - 1}) {
        std::string bad = good;
        bad[flip] = static_cast<char>(bad[flip] ^ 0x40);
        EXPECT_THROW(parse_eiec(bad), FormatError) << "flipped byte " << flip;
    }
    EXPECT_THROW(parse_eiec(good.substr(0, good.size() - 3)), FormatError);
    EXPECT_THROW(parse_eiec("EIE"), FormatError);
}

TEST_F(IoTest, ContainerRefusesWidePointers) {
    QuantizedSparseMatrix q;
    q.rows = 1;
    q.cols = 65600;
    q.mask = SparsityMask(1, 65600);
    std::fill(q.mask.kept.begin(), q.mask.kept.end(), uint8_t{1});
    q.index.assign(65600, 1);
    q.codebook = identity_codebook();
    const InterleavedCsc e = encode_interleaved(q, 1, PointerWidth::wide);
    EXPECT_THROW(serialize_eiec({e, q.codebook}), CapacityError);
}

TEST_F(IoTest, ContainerRejectsMissingZeroEntry) {
    QuantizedSparseMatrix q = random_q(8, 8, 0.3, 13);
    InterleavedCsc e = encode_interleaved(q, 1);
    Codebook cb = q.codebook;
    for (auto& r : cb.raw) r = static_cast<int16_t>(r + (r == 0 ? 7 : 0));  // no zero left
    EXPECT_THROW(serialize_eiec({e, cb}), FormatError);
}
