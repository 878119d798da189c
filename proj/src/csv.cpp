#include "rselab/csv.hpp"

#include <charconv>
#include <cstdio>
#include <istream>

#include "rselab/error.hpp"

namespace rselab::csv {

std::string format(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r' && c != ' ' && c != '\t') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

namespace {

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (*b == '+') ++b;
  const auto res = std::from_chars(b, e, v);
  return res.ec == std::errc() && res.ptr == e;
}

}  // namespace

std::vector<std::vector<double>> read_numeric(std::istream& is, std::vector<std::string>* header) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_line(line);
    std::vector<double> row;
    row.reserve(fields.size());
    bool ok = true;
    for (const auto& f : fields) {
      double v = 0.0;
      if (!parse_double(f, v)) {
        ok = false;
        break;
      }
      row.push_back(v);
    }
    if (!ok) {
      if (first) {
        if (header) *header = fields;
        first = false;
        continue;
      }
      throw Error(ErrorCode::Io, "non-numeric CSV field on line " + std::to_string(lineno));
    }
    first = false;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace rselab::csv
