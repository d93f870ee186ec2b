#pragma once

#include "idl/types.hpp"

#include <filesystem>

namespace idl {

/// On-disk matrix encodings.
///
/// CSV: one matrix row per line, comma separated, no header.
/// RAWF64: the magic "CDL1", rows and cols as little-endian uint64, then
/// rows*cols little-endian IEEE-754 doubles in column-major order.
enum class MatrixFormat { Csv, RawF64 };

/// ".csv" selects CSV; anything else is RAWF64.
MatrixFormat format_from_path(const std::filesystem::path& path);

Matrix load_matrix(const std::filesystem::path& path, MatrixFormat format);
Matrix load_matrix(const std::filesystem::path& path);

void save_matrix(const Matrix& m, const std::filesystem::path& path, MatrixFormat format);
void save_matrix(const Matrix& m, const std::filesystem::path& path);

} // namespace idl
