#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eie/engine.hpp"
#include "eie/matrix.hpp"

namespace eie {

// Matrix Market reader: "array" (dense, column-major) and "coordinate"
// (1-based i j value triplets) formats, real or integer fields, general
// symmetry. Pattern files get 1.0 at every listed position.
DenseMatrix read_matrix_market(const std::string& path);
void write_matrix_market(const DenseMatrix& w, const std::string& path);

// Activation files.
//
// Text: one decimal value per line ('#' starts a comment); values are reals,
// converted with round-to-nearest-even on read. Raw: a one-line header
// "EIEA1 <length> <fraction_bits>\n" followed by length little-endian int16
// raw values. read_activations sniffs the header to pick the format.
ActivationVector read_activations(const std::string& path, FixedPointFormat fmt);
void write_activations_text(const ActivationVector& a, const std::string& path);
void write_activations_raw(const ActivationVector& a, const std::string& path);

// Atomic file write: temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::string& bytes);

// CRC-32 (IEEE 802.3, reflected 0xEDB88320).
uint32_t crc32(const uint8_t* data, size_t len, uint32_t seed = 0);

}  // namespace eie
