#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dsadlc/errors.hpp"

// Minimal CSV helpers for the dataset schema: UTF-8, comma separated, '.'
// decimal point, mandatory header row, no quoting (none of the carried
// fields may contain a comma).

namespace dsadlc::csv {

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline double parse_double(std::string_view s, const std::string& context) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw SchemaError("bad numeric value '" + std::string(s) + "' in " + context);
  }
  return v;
}

inline std::int64_t parse_int(std::string_view s, const std::string& context) {
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw SchemaError("bad integer value '" + std::string(s) + "' in " + context);
  }
  return v;
}

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
  }

  int require_column(const std::string& name, const std::string& file) const {
    const int c = column(name);
    if (c < 0) throw SchemaError("missing column '" + name + "' in " + file);
    return c;
  }
};

inline Table read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    const auto parts = split(line);
    if (first) {
      if (line.empty()) throw SchemaError("missing header row in " + path);
      for (auto p : parts) t.header.emplace_back(p);
      first = false;
      continue;
    }
    std::vector<std::string> row;
    row.reserve(parts.size());
    for (auto p : parts) row.emplace_back(p);
    if (row.size() != t.header.size()) {
      throw SchemaError("row with " + std::to_string(row.size()) +
                        " fields, expected " + std::to_string(t.header.size()) +
                        " in " + path);
    }
    t.rows.push_back(std::move(row));
  }
  if (first) throw SchemaError("missing header row in " + path);
  return t;
}

class Writer {
 public:
  explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open " + path + " for writing");
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

  void close() {
    out_.flush();
    if (!out_) throw IoError("write failure on " + path_);
    out_.close();
  }

 private:
  std::string path_;
  std::ofstream out_;
};

}  // namespace dsadlc::csv
