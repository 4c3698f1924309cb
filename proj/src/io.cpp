#include "hdcov/io.hpp"

#include "hdcov/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <vector>

namespace hdcov {
namespace {

std::vector<std::string> fields(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        std::string f = line.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
        const auto b = f.find_first_not_of(" \t\r\"");
        const auto e = f.find_last_not_of(" \t\r\"");
        out.push_back(b == std::string::npos ? std::string() : f.substr(b, e - b + 1));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::optional<double> number(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = first + s.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace

SampleMatrix load_sample_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");

    std::vector<double> values;
    std::size_t cols = 0, rows = 0, line_no = 0;
    std::optional<char> sep;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (!sep) sep = line.find('\t') != std::string::npos ? '\t' : ',';
        const auto cells = fields(line, *sep);
        std::vector<double> row;
        row.reserve(cells.size());
        bool numeric = true;
        std::size_t bad = 0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto v = number(cells[c]);
            if (!v) {
                numeric = false;
                bad = c;
                break;
            }
            row.push_back(*v);
        }
        if (!numeric) {
            if (rows == 0 && cols == 0) {
                cols = cells.size();  // header
                continue;
            }
            throw ParseError(path + ":" + std::to_string(line_no) + ": non-numeric value '" + cells[bad] +
                             "' at row " + std::to_string(line_no) + ", column " + std::to_string(bad + 1));
        }
        if (cols == 0) cols = row.size();
        if (row.size() != cols)
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                             " fields, found " + std::to_string(row.size()));
        values.insert(values.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows == 0) throw ParseError(path + ": no numeric rows");
    return SampleMatrix(static_cast<Index>(rows), static_cast<Index>(cols), values);
}

}  // namespace hdcov
