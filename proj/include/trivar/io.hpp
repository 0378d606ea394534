#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "trivar/types.hpp"

namespace trivar {

/// A three-channel record read from CSV.
struct Dataset {
  std::vector<double> time;
  std::vector<Vec3> channels;
  std::array<std::string, 3> names{"x", "y", "z"};
  double dt = 1.0;

  std::size_t size() const { return channels.size(); }
};

struct CsvOptions {
  std::string time_column = "t";
  std::optional<std::array<std::string, 3>> columns;  // defaults to x,y,z
  std::optional<double> dt;  // overrides the spacing of the time column; required without one
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline bool skip_line(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

inline std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace detail

/// Comma-separated text with a header row; blank lines and lines starting
/// with '#' are ignored. `source` names the input in diagnostics.
inline Dataset read_csv(std::istream& in, const CsvOptions& opt = {},
                        const std::string& source = "input") {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::skip_line(line)) continue;
    for (auto f : detail::split_fields(line)) header.emplace_back(f);
    break;
  }
  if (header.empty()) throw InputError(source + ": no data rows");

  auto find_column = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  };

  const auto time_col = find_column(opt.time_column);
  std::array<std::size_t, 3> chan_col{};
  Dataset ds;
  if (opt.columns) {
    for (int c = 0; c < 3; ++c) {
      const auto idx = find_column((*opt.columns)[c]);
      if (!idx)
        throw InputError(source + ": line " + std::to_string(line_no) + ": column '" +
                         (*opt.columns)[c] + "' not found in header");
      chan_col[c] = *idx;
      ds.names[c] = (*opt.columns)[c];
    }
  } else {
    std::vector<std::size_t> data_cols;
    for (std::size_t i = 0; i < header.size(); ++i)
      if (!time_col || i != *time_col) data_cols.push_back(i);
    if (data_cols.size() < 3)
      throw InputError(source + ": line " + std::to_string(line_no) + ": need 3 channels, found " +
                       std::to_string(data_cols.size()) + " column(s) besides '" +
                       opt.time_column + "'");
    const std::array<std::string, 3> want{"x", "y", "z"};
    bool named = true;
    for (int c = 0; c < 3; ++c) {
      const auto idx = find_column(want[c]);
      if (!idx) named = false;
      else chan_col[c] = *idx;
    }
    if (!named)
      for (int c = 0; c < 3; ++c) chan_col[c] = data_cols[c];
    for (int c = 0; c < 3; ++c) ds.names[c] = header[chan_col[c]];
  }
  if (!time_col && !opt.dt)
    throw InputError(source + ": no '" + opt.time_column + "' column and no sample interval given");

  while (std::getline(in, line)) {
    ++line_no;
    if (detail::skip_line(line)) continue;
    const auto fields = detail::split_fields(line);
    if (fields.size() != header.size())
      throw InputError(source + ": line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    auto value = [&](std::size_t col) {
      const auto v = detail::parse_double(fields[col]);
      if (!v || !std::isfinite(*v))
        throw InputError(source + ": line " + std::to_string(line_no) + ", column " +
                         std::to_string(col + 1) + " ('" + header[col] + "'): invalid number '" +
                         std::string(fields[col]) + "'");
      return *v;
    };
    Vec3 v{value(chan_col[0]), value(chan_col[1]), value(chan_col[2])};
    ds.channels.push_back(v);
    if (time_col) ds.time.push_back(value(*time_col));
  }
  if (ds.channels.empty()) throw InputError(source + ": no data rows");

  if (time_col && ds.time.size() >= 2) {
    const double step = ds.time[1] - ds.time[0];
    if (!(step > 0.0)) throw InputError(source + ": time column is not strictly increasing at data row 2");
    for (std::size_t i = 1; i < ds.time.size(); ++i) {
      const double d = ds.time[i] - ds.time[i - 1];
      if (std::abs(d - step) > 1e-6 * step)
        throw InputError(source + ": non-uniform sampling at data row " + std::to_string(i + 1) +
                         " (spacing " + std::to_string(d) + ", expected " + std::to_string(step) + ")");
    }
    ds.dt = step;
  }
  if (opt.dt) {
    if (!(*opt.dt > 0.0) || !std::isfinite(*opt.dt)) throw InputError("sample interval must be positive");
    ds.dt = *opt.dt;
  }
  if (!time_col) {
    ds.time.resize(ds.channels.size());
    for (std::size_t i = 0; i < ds.time.size(); ++i) ds.time[i] = static_cast<double>(i) * ds.dt;
  }
  return ds;
}

inline Dataset read_csv_file(const std::string& path, const CsvOptions& opt = {}) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  return read_csv(in, opt, path);
}

/// Shortest text that round-trips the double; locale independent.
inline std::string format_number(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  template <typename... Ts>
  void row(const Ts&... values) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(values), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(unsigned v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }

  std::ostream& out_;
};

}  // namespace trivar
