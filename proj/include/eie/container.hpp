#pragma once

#include <string>

#include "eie/csc.hpp"

namespace eie {

// EIEC container: a compressed model ready for the engine or the simulator.
//
//   magic   "EIEC"
//   u16     version (1)
//   u32     rows, cols, n_pe
//   u16     fraction_bits
//   i16[16] codebook raw values
//   per PE: u16[cols + 1] column pointers, then col_ptr[cols] packed v/z
//           bytes (v low nibble, z high nibble)
//   u32     CRC-32 of everything above
//
// All integers little-endian. A container parses successfully iff the CRC
// matches and csc_codec validation passes.
struct Model {
    InterleavedCsc enc;
    Codebook codebook;
};

constexpr uint16_t kEiecVersion = 1;

std::string serialize_eiec(const Model& m);
Model parse_eiec(const std::string& bytes);

void write_eiec(const Model& m, const std::string& path);
Model read_eiec(const std::string& path);

}  // namespace eie
