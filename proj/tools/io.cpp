#include "io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ccpath::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::Parse, "cannot open '" + path + "'");
    return in;
}

}  // namespace

Index CsvText::column(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == name) return static_cast<Index>(j);
    return -1;
}

CsvText read_csv(const std::string& path) {
    std::ifstream in = open_input(path);
    CsvText out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto cells = split_line(line);
        if (out.header.empty()) {
            out.header = std::move(cells);
            continue;
        }
        require(cells.size() == out.header.size(), ErrorKind::Parse,
                path + ":" + std::to_string(line_no) + ": expected " + std::to_string(out.header.size()) +
                    " fields, found " + std::to_string(cells.size()));
        out.rows.push_back(std::move(cells));
    }
    require(!out.header.empty(), ErrorKind::Parse, "'" + path + "' has no header row");
    return out;
}

double parse_number(const std::string& text, const std::string& where) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    require(ec == std::errc() && ptr == last && first != last, ErrorKind::Parse,
            where + ": '" + text + "' is not a number");
    require(std::isfinite(v), ErrorKind::Parse, where + ": non-finite value");
    return v;
}

DataTable read_data(const std::string& path, const std::string& response) {
    const CsvText csv = read_csv(path);
    const Index ycol = response.empty() ? 0 : csv.column(response);
    require(ycol >= 0, ErrorKind::InvalidArgument, "response column '" + response + "' not in '" + path + "'");
    require(csv.header.size() >= 2, ErrorKind::InvalidArgument, "'" + path + "' has no predictor columns");
    require(!csv.rows.empty(), ErrorKind::Parse, "'" + path + "' has no data rows");

    DataTable t;
    t.response = csv.header[static_cast<std::size_t>(ycol)];
    for (std::size_t j = 0; j < csv.header.size(); ++j)
        if (static_cast<Index>(j) != ycol) t.predictors.push_back(csv.header[j]);
    const auto n = static_cast<Index>(csv.rows.size());
    const auto p = static_cast<Index>(t.predictors.size());
    t.y.resize(n);
    t.X.resize(n, p);
    for (Index i = 0; i < n; ++i) {
        const auto& row = csv.rows[static_cast<std::size_t>(i)];
        Index k = 0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            const double v = parse_number(row[j], path + " row " + std::to_string(i + 1) + " '" + csv.header[j] + "'");
            if (static_cast<Index>(j) == ycol)
                t.y[i] = v;
            else
                t.X(i, k++) = v;
        }
    }
    return t;
}

Matrix align_columns(const DataTable& table, const std::vector<std::string>& names) {
    Matrix out(table.X.rows(), static_cast<Index>(names.size()));
    for (std::size_t k = 0; k < names.size(); ++k) {
        Index found = -1;
        for (std::size_t j = 0; j < table.predictors.size(); ++j)
            if (table.predictors[j] == names[k]) found = static_cast<Index>(j);
        require(found >= 0, ErrorKind::InvalidArgument, "column '" + names[k] + "' missing");
        out.col(static_cast<Index>(k)) = table.X.col(found);
    }
    return out;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_coefficients(const std::string& path, const std::vector<std::string>& names,
                        const OriginalCoefficients& coef) {
    require(static_cast<Index>(names.size()) == coef.coef.size(), ErrorKind::DimensionMismatch,
            "coefficient names and values differ in length");
    std::ostringstream out;
    out << "name,coef\n" << kInterceptName << ',' << format_number(coef.intercept) << '\n';
    for (std::size_t j = 0; j < names.size(); ++j)
        out << names[j] << ',' << format_number(coef.coef[static_cast<Index>(j)]) << '\n';
    write_text(path, out.str());
}

std::pair<std::vector<std::string>, OriginalCoefficients> read_coefficients(const std::string& path) {
    const CsvText csv = read_csv(path);
    require(csv.header.size() == 2, ErrorKind::Parse, "'" + path + "' must have two columns (name,coef)");
    std::vector<std::string> names;
    std::vector<double> values;
    double intercept = 0.0;
    for (const auto& row : csv.rows) {
        const double v = parse_number(row[1], path + " '" + row[0] + "'");
        if (row[0] == kInterceptName)
            intercept = v;
        else {
            names.push_back(row[0]);
            values.push_back(v);
        }
    }
    OriginalCoefficients c;
    c.coef = Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
    c.intercept = intercept;
    return {names, c};
}

std::vector<std::pair<std::string, std::string>> read_key_values(const std::string& path) {
    std::ifstream in = open_input(path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos, ErrorKind::Parse,
                path + ":" + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        require(!key.empty(), ErrorKind::Parse, path + ":" + std::to_string(line_no) + ": empty key");
        out.emplace_back(std::move(key), trim(line.substr(eq + 1)));
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorKind::InvalidArgument, "cannot write '" + path + "'");
    out << text;
    require(out.good(), ErrorKind::InvalidArgument, "write to '" + path + "' failed");
}

}  // namespace ccpath::cli
