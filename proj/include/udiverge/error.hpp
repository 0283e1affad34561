#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace udiverge {

// Structural errors in an input document; carries the 1-based line number
// when one is known (0 otherwise).
class parse_error : public std::runtime_error {
  public:
    explicit parse_error(const std::string& msg, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}

    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

// Well-formed input that violates a semantic constraint (duplicate ids,
// out-of-range links, failed pairing, missing translations, ...).
class validation_error : public std::runtime_error {
  public:
    explicit validation_error(const std::string& msg, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}

    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

} // namespace udiverge
