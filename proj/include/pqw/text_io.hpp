#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "pqw/graph_model.hpp"

namespace pqw {

// 17 significant digits, '.' decimal separator, independent of locale.
std::string format_double(double value);

// Truncates and rewrites; creates parent directories. Throws Error on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

// Row-major little-endian float64 dump of a square or rectangular matrix.
void write_matrix_binary(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_binary(const std::filesystem::path& path, Eigen::Index rows,
                          Eigen::Index cols);
// CSV with one matrix row per line.
std::string matrix_to_csv(const Matrix& m);

}  // namespace pqw
