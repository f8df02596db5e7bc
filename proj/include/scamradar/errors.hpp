#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scamradar {

// Malformed textual input (addresses, hashes, decimal amounts).
struct ParseError : std::runtime_error {
    ParseError(std::string msg, std::size_t byte_offset)
        : std::runtime_error(std::move(msg)), offset(byte_offset) {}
    std::size_t offset;
};

// Amount arithmetic violation: decimals mismatch or out-of-range result.
struct AmountError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AmmError : std::runtime_error {
    enum class Kind {
        InvalidLiquidity,
        RatioMismatch,
        InsufficientLp,
        NoLiquidity,
        DustSwap,
        InvalidInput,
    };
    AmmError(Kind k, std::string msg) : std::runtime_error(std::move(msg)), kind(k) {}
    Kind kind;
};

// File-level ingest failure; carries the 1-based line and the offending field.
struct IngestError : std::runtime_error {
    IngestError(std::string msg, std::size_t line_no, std::string field_name)
        : std::runtime_error(std::move(msg)), line(line_no), field(std::move(field_name)) {}
    std::size_t line;
    std::string field;
};

struct DuplicateRecord : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateDataset : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingPrice : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace scamradar
