#pragma once

#include <stdexcept>
#include <string>

namespace legodo {

/// Malformed or inconsistent input data (datasets, trajectories, configs).
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Parse failure pinned to a file location.
class ParseError : public DataError {
  public:
    ParseError(const std::string& file, std::size_t line,
               const std::string& reason)
        : DataError(file + ":" + std::to_string(line) + ": " + reason),
          file_(file),
          line_(line) {}

    const std::string& file() const { return file_; }
    std::size_t line() const { return line_; }

  private:
    std::string file_;
    std::size_t line_;
};

/// Unrecoverable numerical breakdown (non-finite state, divergent solve).
class NumericalError : public std::runtime_error {
  public:
    explicit NumericalError(const std::string& msg)
        : std::runtime_error(msg) {}
};

}  // namespace legodo
