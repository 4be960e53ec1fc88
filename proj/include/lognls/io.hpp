#pragma once

// Plain-text and binary artifacts: CSV tables with 17 significant digits and
// a little-endian field dump (u32 dim, u32 n, f64 extent, then re/im pairs)
// with a JSON sidecar describing the grid.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lognls/error.hpp"
#include "lognls/grid.hpp"

namespace lognls::io {

namespace fs = std::filesystem;

inline std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header)
      : path_(path), columns_(header.size()) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    out_.open(path);
    require(out_.good(), ErrorKind::InvalidArgument, "cannot open " + path.string());
    out_ << std::setprecision(17);
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  void row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

  void row(const std::vector<double>& values) {
    require(values.size() == columns_, ErrorKind::InvalidArgument,
            "row width differs from header in " + path_.string());
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
    out_ << '\n';
  }

  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  std::size_t columns_;
  std::ofstream out_;
};

/// Parses a CSV written by CsvWriter: header plus numeric rows.
inline std::pair<std::vector<std::string>, std::vector<std::vector<double>>> read_csv(
    const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::InvalidArgument, "cannot open " + path.string());
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::string line;
  if (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> r;
    while (std::getline(ss, cell, ',')) r.push_back(std::stod(cell));
    rows.push_back(std::move(r));
  }
  return {header, rows};
}

namespace detail {

template <class T>
void put_le(std::ofstream& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(std::ifstream& in) {
  unsigned char b[sizeof(T)];
  in.read(reinterpret_cast<char*>(b), sizeof(T));
  require(in.good(), ErrorKind::InvalidArgument, "truncated field file");
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace detail

inline void write_field(const fs::path& path, const Field& u, const nlohmann::json& meta = {}) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::InvalidArgument, "cannot open " + path.string());
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(u.grid.dim));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(u.grid.n));
  detail::put_le<double>(out, u.grid.extent);
  for (const auto& z : u.values) {
    detail::put_le<double>(out, z.real());
    detail::put_le<double>(out, z.imag());
  }
  nlohmann::json side = meta;
  side["format"] = "lognls-field-v1";
  side["dim"] = u.grid.dim;
  side["n"] = u.grid.n;
  side["extent"] = u.grid.extent;
  side["layout"] = "row-major, axis 0 slowest, nodes -L/2 + k L / n";
  std::ofstream js(fs::path(path).concat(".json"));
  js << side.dump(2) << '\n';
}

inline Field read_field(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::InvalidArgument, "cannot open " + path.string());
  Grid g;
  g.dim = static_cast<int>(detail::get_le<std::uint32_t>(in));
  g.n = static_cast<int>(detail::get_le<std::uint32_t>(in));
  g.extent = detail::get_le<double>(in);
  g.validate();
  Field u(g);
  for (auto& z : u.values) {
    const double re = detail::get_le<double>(in);
    const double im = detail::get_le<double>(in);
    z = cdouble(re, im);
  }
  return u;
}

inline void write_json(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  require(out.good(), ErrorKind::InvalidArgument, "cannot open " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace lognls::io
