#pragma once

#include <stdexcept>
#include <string>

namespace eie {

// Malformed file or in-memory structure (bad magic, CRC, pointer layout, ...).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// A hardware-format limit was exceeded (16-bit pointers, batching limits).
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid configuration (bad SimConfig field, missing energy-table entry).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace eie
