#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "eblp/linalg.hpp"

namespace eblp {

/// Delimited-text matrix: one sample per line, comma or whitespace separated,
/// '#' starts a comment line. Missing entries are written as a token (NA).
struct TextMatrix {
    Matrix values;    // missing entries hold 0
    Matrix observed;  // 1 where a number was present, 0 for the missing token
};

struct TextMatrixOptions {
    std::string na_token = "NA";
    char delimiter = ',';
};

TextMatrix read_matrix(std::istream& in, const TextMatrixOptions& opts = {});
TextMatrix read_matrix_file(const std::filesystem::path& path, const TextMatrixOptions& opts = {});

/// Writes `values`; where `observed` is given and zero the NA token is written instead.
void write_matrix(std::ostream& out, const Matrix& values, const TextMatrixOptions& opts = {},
                  const Matrix* observed = nullptr);
void write_matrix_file(const std::filesystem::path& path, const Matrix& values,
                       const TextMatrixOptions& opts = {}, const Matrix* observed = nullptr);

/// Shortest round-trip, locale-independent decimal representation.
std::string format_double(double value);

/// Strict locale-independent parse of a whole token; throws ParseError.
double parse_double(const std::string& token);

}  // namespace eblp
