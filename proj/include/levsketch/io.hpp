#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "levsketch/matrix.hpp"

namespace levsketch {

enum class MatrixFormat { MatrixMarket, Csv, Binary };

std::string_view to_string(MatrixFormat format);
MatrixFormat parse_matrix_format(std::string_view s);
/// .mtx -> MatrixMarket, .csv -> Csv, .bin/.levs -> Binary.
MatrixFormat format_from_extension(const std::string& path);

// Matrix Market: array and coordinate layouts, real/integer/pattern fields,
// general or symmetric. Coordinate duplicates are summed. Parse failures
// report the 1-based line and column of the offending token.
DenseMatrix read_matrix_market(std::istream& in);
DenseMatrix read_csv(std::istream& in);
// "LEVS", version byte 1, little-endian u64 rows, u64 cols, row-major f64.
DenseMatrix read_binary(std::istream& in);

void write_matrix_market(std::ostream& out, const DenseMatrix& a);
void write_csv(std::ostream& out, const DenseMatrix& a);
void write_binary(std::ostream& out, const DenseMatrix& a);

DenseMatrix load_matrix(const std::string& path, MatrixFormat format);
void save_matrix(const std::string& path, const DenseMatrix& a, MatrixFormat format);

}  // namespace levsketch
