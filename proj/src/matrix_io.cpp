#include "idl/matrix_io.hpp"

#include "idl/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <string_view>

namespace idl {
namespace {

constexpr std::array<char, 4> kMagic = {'C', 'D', 'L', '1'};

template <typename T>
T to_little_endian(T value) {
  if constexpr (std::endian::native == std::endian::little) {
    return value;
  } else {
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    std::reverse(bytes.begin(), bytes.end());
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
  }
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

Matrix parse_csv(std::istream& in, const std::string& name) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty())
      continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = body.find(',', start);
      const std::string_view field =
          trim(body.substr(start, comma == std::string_view::npos ? body.size() - start : comma - start));
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
        throw ValidationError(name + ":" + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "'");
      if (!std::isfinite(value))
        throw ValidationError(name + ":" + std::to_string(line_no) + ": non-finite entry '" + std::string(field) + "'");
      row.push_back(value);
      if (comma == std::string_view::npos)
        break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ValidationError(name + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(rows.front().size()) + " fields, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw ValidationError(name + ": empty matrix");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c)
      m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return m;
}

Matrix parse_raw(std::istream& in, const std::string& name) {
  std::array<char, 4> magic{};
  std::uint64_t dims[2] = {0, 0};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw ValidationError(name + ": missing CDL1 header");
  if (!in.read(reinterpret_cast<char*>(dims), sizeof(dims)))
    throw ValidationError(name + ": truncated header");
  const std::uint64_t rows = to_little_endian(dims[0]);
  const std::uint64_t cols = to_little_endian(dims[1]);
  if (rows == 0 || cols == 0)
    throw ValidationError(name + ": empty matrix");

  in.seekg(0, std::ios::end);
  const auto payload = static_cast<std::uint64_t>(in.tellg()) - (kMagic.size() + sizeof(dims));
  if (cols > payload / sizeof(double) / rows || payload != rows * cols * sizeof(double))
    throw ValidationError(name + ": header declares " + std::to_string(rows) + "x" + std::to_string(cols) +
                          " but payload has " + std::to_string(payload) + " bytes");
  in.seekg(static_cast<std::streamoff>(kMagic.size() + sizeof(dims)));

  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  if (!in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(payload)))
    throw IoError(name + ": read failed");
  if constexpr (std::endian::native != std::endian::little) {
    for (Index i = 0; i < m.size(); ++i)
      m.data()[i] = to_little_endian(m.data()[i]);
  }
  if (!m.allFinite())
    throw ValidationError(name + ": non-finite entry");
  return m;
}

} // namespace

MatrixFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? MatrixFormat::Csv : MatrixFormat::RawF64;
}

Matrix load_matrix(const std::filesystem::path& path, MatrixFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  return format == MatrixFormat::Csv ? parse_csv(in, path.string()) : parse_raw(in, path.string());
}

Matrix load_matrix(const std::filesystem::path& path) { return load_matrix(path, format_from_path(path)); }

void save_matrix(const Matrix& m, const std::filesystem::path& path, MatrixFormat format) {
  if (m.size() == 0)
    throw ValidationError("refusing to save an empty matrix");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot open " + path.string() + " for writing");

  if (format == MatrixFormat::Csv) {
    char buf[32];
    std::string line;
    for (Index r = 0; r < m.rows(); ++r) {
      line.clear();
      for (Index c = 0; c < m.cols(); ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
        if (c > 0)
          line += ',';
        line += buf;
      }
      line += '\n';
      out << line;
    }
  } else {
    const std::uint64_t dims[2] = {to_little_endian(static_cast<std::uint64_t>(m.rows())),
                                   to_little_endian(static_cast<std::uint64_t>(m.cols()))};
    out.write(kMagic.data(), kMagic.size());
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    if constexpr (std::endian::native == std::endian::little) {
      out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
    } else {
      for (Index i = 0; i < m.size(); ++i) {
        const double v = to_little_endian(m.data()[i]);
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
      }
    }
  }
  if (!out.flush())
    throw IoError("write failed for " + path.string());
}

void save_matrix(const Matrix& m, const std::filesystem::path& path) { save_matrix(m, path, format_from_path(path)); }

} // namespace idl
