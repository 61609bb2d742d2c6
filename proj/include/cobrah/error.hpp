#ifndef COBRAH_ERROR_HPP
#define COBRAH_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cobrah {

enum class ErrorCode {
    EmptyHistory,
    InvalidMean,
    InvalidProbability,
    RadiusUndefined,
    InsufficientData,
    InvalidRadius,
    CapacityExceedsArms,
    ConfigError,
    InvalidBound,
    TooLarge,
    GapDegenerate,
    ParseError,
    OrderError,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::EmptyHistory: return "EmptyHistory";
    case ErrorCode::InvalidMean: return "InvalidMean";
    case ErrorCode::InvalidProbability: return "InvalidProbability";
    case ErrorCode::RadiusUndefined: return "RadiusUndefined";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidRadius: return "InvalidRadius";
    case ErrorCode::CapacityExceedsArms: return "CapacityExceedsArms";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvalidBound: return "InvalidBound";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::GapDegenerate: return "GapDegenerate";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::OrderError: return "OrderError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind rather than the message text.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

/// Raised by the CSV readers; `line()` is 1-based and counts the header.
class ParseError : public Error {
  public:
    ParseError(std::size_t line, const std::string& what)
        : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

}  // namespace cobrah

#endif
