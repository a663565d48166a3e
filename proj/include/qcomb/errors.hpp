#pragma once

#include <stdexcept>
#include <string>

namespace qcomb {

/// Argument outside an operation's domain (negative gain, out-of-range index, ...).
class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// The model is well-formed but the requested quantity is undefined for it,
/// e.g. an SNR when the mean signal or every noise term vanishes.
class DegenerateModel : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Lookup outside the tabulated range of a data table.
class ExtrapolationError : public std::out_of_range {
  public:
    using std::out_of_range::out_of_range;
};

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string &what, std::size_t line)
        : std::runtime_error(what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

}  // namespace qcomb
