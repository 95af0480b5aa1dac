#pragma once

#include <stdexcept>
#include <string>

namespace causalkit {

// Codes for malformed input documents. The CLI maps DataFormatError to a
// dedicated exit status, so parsers must throw this (not invalid_argument)
// for anything that originates in a file the user handed us.
enum class DataErrorCode {
    syntax,
    unknown_field,
    unknown_kind,
    arity_mismatch,
    cycle,
    ragged_line,
    non_numeric,
    empty_file,
    bad_value,
    io_failure,
};

class DataFormatError : public std::runtime_error {
  public:
    DataFormatError(DataErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    DataErrorCode code() const { return code_; }

  private:
    DataErrorCode code_;
};

// Numeric or feasibility failures: singular systems, enumeration bounds,
// continuous noise where an exact query was requested.
class NumericError : public std::runtime_error {
  public:
    explicit NumericError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace causalkit
