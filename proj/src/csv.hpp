#ifndef ACCESSFLOW_SRC_CSV_HPP
#define ACCESSFLOW_SRC_CSV_HPP

// Minimal CSV helpers for the flat, unquoted schemas this project reads and writes.

#include <cstdio>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace accessflow::csv {

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == sep) {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Strict decimal parse; rejects trailing garbage and empty fields.
inline std::optional<double> parse_double(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &pos);
  } catch (...) {
    return std::nullopt;
  }
  if (pos != t.size()) return std::nullopt;
  return v;
}

/// Shortest round-trippable formatting is not needed; 12 significant digits
/// keeps files stable and readable.
inline std::string fmt(double v, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

/// Shortest of %.15g / %.16g / %.17g that reads back as the same double.
inline std::string fmt_exact(double v) {
  for (int digits = 15; digits < 17; ++digits) {
    std::string s = fmt(v, digits);
    if (std::stod(s) == v) return s;
  }
  return fmt(v, 17);
}

struct Reader {
  std::istream& in;
  std::string name;
  std::size_t line_no = 0;

  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      fields = split(line);
      return true;
    }
    return false;
  }

  std::string where() const { return name + ":" + std::to_string(line_no); }
};

}  // namespace accessflow::csv

#endif  // ACCESSFLOW_SRC_CSV_HPP
