#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cachepart/error.hpp"

namespace cachepart::csv {

// Floats carry 9 significant digits; non-finite values are spelled inf, -inf and nan.
inline std::string format(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  class Row {
   public:
    Row& operator<<(const std::string& s) {
      cells_.push_back(s);
      return *this;
    }
    Row& operator<<(const char* s) { return *this << std::string(s); }
    Row& operator<<(double v) { return *this << format(v); }
    Row& operator<<(int v) { return *this << std::to_string(v); }
    Row& operator<<(std::size_t v) { return *this << std::to_string(v); }
    Row& operator<<(bool v) { return *this << std::string(v ? "1" : "0"); }
    Row& operator<<(const std::vector<double>& vs) {
      for (double v : vs) *this << v;
      return *this;
    }
    std::vector<std::string> cells_;
  };

  void add(const Row& row) {
    require(row.cells_.size() == header_.size(), Errc::invalid_argument,
            "row has " + std::to_string(row.cells_.size()) + " cells, header has " +
                std::to_string(header_.size()));
    rows_.push_back(row.cells_);
  }

  std::string str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Numbered column names: prefix_1 .. prefix_n.
inline std::vector<std::string> numbered(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(prefix + "_" + std::to_string(i));
  return out;
}

// Writes through a temporary in the same directory, then renames over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) fail(Errc::io_error, "cannot create " + path.parent_path().string());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(Errc::io_error, "cannot write " + tmp.string());
    f << text;
    if (!f) fail(Errc::io_error, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(Errc::io_error, "cannot rename to " + path.string());
}

}  // namespace cachepart::csv
