#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ccpath/model.hpp"

namespace ccpath::cli {

/// Comma-separated text with a header row. Cells are kept as strings.
struct CsvText {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Position of `name` in the header, or -1.
    Index column(const std::string& name) const;
};

CsvText read_csv(const std::string& path);

/// Numeric design read from a CSV: one response column plus predictors.
struct DataTable {
    Vector y;
    Matrix X;
    std::string response;
    std::vector<std::string> predictors;
};

/// The response is `response`, or the first column when empty. Every other
/// column is a predictor.
DataTable read_data(const std::string& path, const std::string& response);

/// Reorders the predictor columns of `table` to follow `names`.
Matrix align_columns(const DataTable& table, const std::vector<std::string>& names);

double parse_number(const std::string& text, const std::string& where);

/// Shortest form that still round-trips: 17 significant digits.
std::string format_number(double v);

/// name,coef rows with the intercept first.
void write_coefficients(const std::string& path, const std::vector<std::string>& names,
                        const OriginalCoefficients& coef);
/// Inverse of write_coefficients.
std::pair<std::vector<std::string>, OriginalCoefficients> read_coefficients(const std::string& path);

inline constexpr const char* kInterceptName = "(intercept)";

/// Flat `key = value` lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_key_values(const std::string& path);

void write_text(const std::string& path, const std::string& text);

}  // namespace ccpath::cli
