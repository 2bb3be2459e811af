#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ssnmf/types.hpp"

namespace ssnmf {

static_assert(std::endian::native == std::endian::little,
              "matrix files are little-endian; big-endian hosts are unsupported");

// A hyperspectral cube: pixel (x, y) is column y * width + x of data.
struct HsiCube {
  Index width = 0;
  Index height = 0;
  Matrix data;  // bands x (width * height)
};

struct Sidecar {
  Index width = 0;
  Index height = 0;
  Index bands = 0;
};

namespace detail {

constexpr char kMatrixMagic[6] = {'S', 'S', 'N', 'M', 'F', '1'};
constexpr std::size_t kHeaderBytes = 14;  // magic + two uint32

inline std::uint32_t load_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void store_u32le(unsigned char* p, std::uint32_t v) {
  p[0] = static_cast<unsigned char>(v);
  p[1] = static_cast<unsigned char>(v >> 8);
  p[2] = static_cast<unsigned char>(v >> 16);
  p[3] = static_cast<unsigned char>(v >> 24);
}

}  // namespace detail

// Binary matrix file: 6-byte magic "SSNMF1", uint32le rows, uint32le cols,
// then rows*cols IEEE binary64 little-endian values in column-major order.
inline void write_matrix(const std::string& path, const Matrix& x) {
  if (x.rows() < 1 || x.cols() < 1) throw ParameterError("matrix is empty");
  require_finite(x, "matrix");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");

  unsigned char header[detail::kHeaderBytes];
  std::memcpy(header, detail::kMatrixMagic, 6);
  detail::store_u32le(header + 6, static_cast<std::uint32_t>(x.rows()));
  detail::store_u32le(header + 10, static_cast<std::uint32_t>(x.cols()));
  out.write(reinterpret_cast<const char*>(header), detail::kHeaderBytes);
  out.write(reinterpret_cast<const char*>(x.data()),
            static_cast<std::streamsize>(sizeof(double) * x.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline Matrix read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());

  if (bytes.size() < 6 || std::memcmp(bytes.data(), detail::kMatrixMagic, 6) != 0)
    throw FormatError("bad magic, expected SSNMF1", 0);
  if (bytes.size() < detail::kHeaderBytes)
    throw FormatError("truncated header", bytes.size());

  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint64_t rows = detail::load_u32le(raw + 6);
  const std::uint64_t cols = detail::load_u32le(raw + 10);
  if (rows == 0 || cols == 0) throw FormatError("zero dimension", 6);
  if (rows * cols > (std::numeric_limits<std::size_t>::max() - detail::kHeaderBytes) / 8)
    throw FormatError("dimensions overflow the payload size", 6);

  const std::size_t expected = detail::kHeaderBytes + 8 * rows * cols;
  if (bytes.size() != expected)
    throw FormatError("payload has " + std::to_string(bytes.size() - detail::kHeaderBytes) +
                          " bytes, expected " + std::to_string(8 * rows * cols),
                      std::min(bytes.size(), expected));

  Matrix x(static_cast<Index>(rows), static_cast<Index>(cols));
  std::memcpy(x.data(), bytes.data() + detail::kHeaderBytes, 8 * rows * cols);
  for (Index idx = 0; idx < x.size(); ++idx) {
    if (!std::isfinite(x.data()[idx]))
      throw FormatError("non-finite value",
                        detail::kHeaderBytes + 8 * static_cast<std::size_t>(idx));
  }
  return x;
}

// Rectangular numeric CSV, no quoting, '.' decimal separator. Row i of the
// file becomes row i of the matrix.
inline Matrix read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;

    std::vector<double> row;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      const std::string cell = line.substr(pos, comma == std::string::npos
                                                    ? std::string::npos
                                                    : comma - pos);
      char* end = nullptr;
      const double value = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(value))
        throw ParseError("cell '" + cell + "' is not a finite number", line_no);
      row.push_back(value);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("row has " + std::to_string(row.size()) + " cells, expected " +
                           std::to_string(rows.front().size()),
                       line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("file holds no data", 1);

  Matrix x(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j)
      x(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return x;
}

struct ClipResult {
  HsiCube cube;
  IndexSet removed;
};

// Zeroes out, for every band, the pixels holding that band's k largest
// values (ties to the smaller pixel index); the removed set is the union
// over bands. The pixel grid is preserved.
inline ClipResult clip_extremes(const HsiCube& cube, Index k) {
  const Index n = cube.data.cols();
  if (k < 1 || k > n) throw ParameterError("k must satisfy 1 <= k <= n");
  require_finite(cube.data, "cube");

  std::vector<char> hit(static_cast<std::size_t>(n), 0);
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index band = 0; band < cube.data.rows(); ++band) {
    for (Index j = 0; j < n; ++j) order[static_cast<std::size_t>(j)] = j;
    auto rank = [&](Index a, Index b) {
      const double va = cube.data(band, a), vb = cube.data(band, b);
      if (va != vb) return va > vb;
      return a < b;
    };
    std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), rank);
    for (Index t = 0; t < k; ++t) hit[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])] = 1;
  }

  ClipResult res;
  res.cube = cube;
  for (Index j = 0; j < n; ++j) {
    if (hit[static_cast<std::size_t>(j)]) {
      res.cube.data.col(j).setZero();
      res.removed.push_back(j);
    }
  }
  return res;
}

// One 8-bit binary PGM per row of H, each row scaled by its own maximum.
// Files are named endmember_01.pgm, endmember_02.pgm, ...
inline void write_abundance_maps(const Matrix& h, Index width, Index height,
                                 const std::string& dir) {
  if (width < 1 || height < 1) throw ParameterError("image size must be positive");
  if (h.cols() != width * height)
    throw DimensionError("H has " + std::to_string(h.cols()) +
                         " columns, expected width * height");
  require_finite(h, "H");
  if ((h.array() < 0.0).any()) throw InputError("H has negative entries");

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);

  for (Index k = 0; k < h.rows(); ++k) {
    char name[48];
    std::snprintf(name, sizeof(name), "endmember_%02lld.pgm",
                  static_cast<long long>(k + 1));
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");

    out << "P5\n" << width << " " << height << "\n255\n";
    const double row_max = h.row(k).maxCoeff();
    std::vector<unsigned char> pixels(static_cast<std::size_t>(h.cols()), 0);
    if (row_max > 0.0) {
      for (Index j = 0; j < h.cols(); ++j) {
        const long v = std::lround(255.0 * h(k, j) / row_max);
        pixels[static_cast<std::size_t>(j)] =
            static_cast<unsigned char>(std::clamp(v, 0L, 255L));
      }
    }
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
    if (!out) throw IoError("write to '" + path + "' failed");
  }
}

inline Sidecar read_sidecar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("sidecar is not valid JSON: ") + e.what(), 0);
  }
  if (!j.contains("width") || !j.contains("height") || !j.contains("bands"))
    throw FormatError("sidecar must define width, height and bands", 0);
  Sidecar s;
  s.width = j.at("width").get<Index>();
  s.height = j.at("height").get<Index>();
  s.bands = j.at("bands").get<Index>();
  if (s.width < 1 || s.height < 1 || s.bands < 1)
    throw FormatError("sidecar dimensions must be positive", 0);
  return s;
}

inline void write_sidecar(const std::string& path, const Sidecar& s) {
  nlohmann::json j{{"width", s.width}, {"height", s.height}, {"bands", s.bands}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
}

inline HsiCube make_cube(Matrix data, Index width, Index height) {
  if (data.cols() != width * height)
    throw DimensionError("matrix has " + std::to_string(data.cols()) +
                         " columns, expected width * height = " +
                         std::to_string(width * height));
  return HsiCube{width, height, std::move(data)};
}

}  // namespace ssnmf
