#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace monodromy {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fixed formatting keeps reruns byte-identical.
inline std::string csv_field(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}
inline std::string csv_field(const std::string& s) { return s; }
inline std::string csv_field(const char* s) { return s; }
template <class T>
  requires std::is_integral_v<T>
std::string csv_field(T x) {
  return std::to_string(x);
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  template <class... Ts>
  void add(const Ts&... fields) {
    if (sizeof...(Ts) != header_.size()) throw std::logic_error("csv row width does not match header");
    rows_.push_back({csv_field(fields)...});
  }

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  void write(std::ostream& out) const {
    write_line(out, header_);
    for (const auto& r : rows_) write_line(out, r);
  }

  std::string str() const {
    std::ostringstream out;
    write(out);
    return out.str();
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw OutputError("cannot open for writing: " + path);
    write(out);
    if (!out) throw OutputError("write failed: " + path);
  }

 private:
  static void write_line(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << fields[i];
    }
    out << '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace monodromy
