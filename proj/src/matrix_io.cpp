#include "eblp/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "eblp/errors.hpp"

namespace eblp {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    if (line.find(delimiter) != std::string::npos) {
        std::string field;
        std::istringstream is(line);
        while (std::getline(is, field, delimiter)) fields.push_back(trim(field));
        if (!line.empty() && line.back() == delimiter) fields.emplace_back();
    } else {
        std::istringstream is(line);
        std::string field;
        while (is >> field) fields.push_back(field);
    }
    return fields;
}

}  // namespace

double parse_double(const std::string& token) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = first + token.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || token.empty()) {
        throw ParseError("not a number: '" + token + "'");
    }
    return value;
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw NumericError("cannot format value");
    return std::string(buf, ptr);
}

TextMatrix read_matrix(std::istream& in, const TextMatrixOptions& opts) {
    std::vector<std::vector<double>> rows;
    std::vector<std::vector<double>> seen;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string content = trim(line);
        if (content.empty() || content.front() == '#') continue;
        const auto fields = split_fields(content, opts.delimiter);
        if (rows.empty()) {
            width = fields.size();
        } else if (fields.size() != width) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(width) + " fields, found " +
                             std::to_string(fields.size()));
        }
        std::vector<double> row(width, 0.0);
        std::vector<double> mask(width, 1.0);
        for (std::size_t j = 0; j < width; ++j) {
            if (fields[j] == opts.na_token) {
                mask[j] = 0.0;
                continue;
            }
            try {
                row[j] = parse_double(fields[j]);
            } catch (const ParseError& e) {
                throw ParseError("line " + std::to_string(line_no) + ", field " +
                                 std::to_string(j + 1) + ": " + e.what());
            }
            if (!std::isfinite(row[j])) {
                throw ParseError("line " + std::to_string(line_no) + ": non-finite value");
            }
        }
        rows.push_back(std::move(row));
        seen.push_back(std::move(mask));
    }
    TextMatrix out;
    out.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
    out.observed.resize(out.values.rows(), out.values.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            out.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
            out.observed(static_cast<Index>(i), static_cast<Index>(j)) = seen[i][j];
        }
    }
    return out;
}

TextMatrix read_matrix_file(const std::filesystem::path& path, const TextMatrixOptions& opts) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return read_matrix(in, opts);
}

void write_matrix(std::ostream& out, const Matrix& values, const TextMatrixOptions& opts,
                  const Matrix* observed) {
    std::string line;
    for (Index i = 0; i < values.rows(); ++i) {
        line.clear();
        for (Index j = 0; j < values.cols(); ++j) {
            if (j > 0) line += opts.delimiter;
            if (observed && (*observed)(i, j) == 0.0) {
                line += opts.na_token;
            } else {
                line += format_double(values(i, j));
            }
        }
        line += '\n';
        out << line;
    }
}

void write_matrix_file(const std::filesystem::path& path, const Matrix& values,
                       const TextMatrixOptions& opts, const Matrix* observed) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    write_matrix(out, values, opts, observed);
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace eblp
