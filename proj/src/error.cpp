#include "ccpath/error.hpp"

namespace ccpath {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::ConstantColumn: return "ConstantColumn";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::SupportTooLarge: return "SupportTooLarge";
        case ErrorKind::EmptyList: return "EmptyList";
        case ErrorKind::NotStandardized: return "NotStandardized";
        case ErrorKind::DegenerateSSE: return "DegenerateSSE";
        case ErrorKind::AllExcluded: return "AllExcluded";
        case ErrorKind::TooManySurvivors: return "TooManySurvivors";
        case ErrorKind::Separation: return "Separation";
        case ErrorKind::TooLargeForBruteForce: return "TooLargeForBruteForce";
        case ErrorKind::InvalidDesign: return "InvalidDesign";
        case ErrorKind::Parse: return "Parse";
    }
    return "Unknown";
}

bool Error::is_input_error() const noexcept {
    switch (kind_) {
        case ErrorKind::InvalidArgument:
        case ErrorKind::DimensionMismatch:
        case ErrorKind::ConstantColumn:
        case ErrorKind::TooLargeForBruteForce:
        case ErrorKind::InvalidDesign:
        case ErrorKind::Parse:
        case ErrorKind::EmptyList:
            return true;
        default:
            return false;
    }
}

}  // namespace ccpath
