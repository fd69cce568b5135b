// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qflow {

/// Base class for every error raised by the toolchain.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// QASM text could not be parsed or failed semantic checks.
class ParseError : public Error {
  public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                message),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

/// A binary circuit stream was malformed.
class DecodeError : public Error {
  public:
    DecodeError(const std::string& message, std::size_t offset)
        : Error(message + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

  private:
    std::size_t offset_;
};

/// Invalid circuit structure detected outside the parser (flattening, validation).
class CircuitError : public Error {
  public:
    using Error::Error;
};

/// Unknown gate, bad parameter count, or unsupported basis.
class GateError : public Error {
  public:
    using Error::Error;
};

/// Device configuration failed schema or invariant validation.
class DeviceError : public Error {
  public:
    using Error::Error;
};

/// Transpilation could not produce a compliant circuit.
class TranspileError : public Error {
  public:
    using Error::Error;
};

/// A simulator backend rejected the circuit (cap exceeded, non-Clifford gate, ...).
class BackendError : public Error {
  public:
    using Error::Error;
};

}  // namespace qflow
