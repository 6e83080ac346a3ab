#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lni {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or argument values.
struct ConfigError : Error {
    using Error::Error;
};

/// File could not be read or written.
struct IoError : Error {
    using Error::Error;
};

/// A text input failed to parse; `line` is 1-based.
struct ParseError : Error {
    ParseError(const std::string& what, std::size_t line_no)
        : Error(what + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
    std::size_t line;
};

/// A binary model file is malformed; `offset` is the byte position of the problem.
struct FormatError : Error {
    FormatError(const std::string& what, std::uint64_t at)
        : Error(what + " (offset " + std::to_string(at) + ")"), offset(at) {}
    std::uint64_t offset;
};

/// Training produced a non-finite loss or parameter.
struct TrainingDiverged : Error {
    TrainingDiverged(const std::string& what, std::size_t at_epoch)
        : Error(what + " (epoch " + std::to_string(at_epoch) + ")"), epoch(at_epoch) {}
    std::size_t epoch;
};

/// A part of the Enhanced Bitmap ran out of 16-bit offset tokens.
struct CapacityError : Error {
    using Error::Error;
};

}  // namespace lni
