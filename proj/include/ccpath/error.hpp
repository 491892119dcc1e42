#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ccpath {

enum class ErrorKind {
    InvalidArgument,
    DimensionMismatch,
    ConstantColumn,
    RankDeficient,
    SupportTooLarge,
    EmptyList,
    NotStandardized,
    DegenerateSSE,
    AllExcluded,
    TooManySurvivors,
    Separation,
    TooLargeForBruteForce,
    InvalidDesign,
    Parse,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every library failure is reported through this type; `kind()` lets callers
/// (the CLI in particular) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// Input/usage problems as opposed to numerical breakdowns.
    bool is_input_error() const noexcept;

private:
    ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) throw Error(kind, message);
}

}  // namespace ccpath
