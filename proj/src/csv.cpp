#include "murmur/csv.hpp"

#include <charconv>
#include <istream>

#include "murmur/error.hpp"

namespace murmur::csv {

std::string num(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r' && c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<std::vector<std::optional<double>>> read_table(std::istream& in,
                                                           const std::vector<std::string>& header) {
  std::vector<std::vector<std::optional<double>>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split(line);
    if (!have_header) {
      if (fields != header) throw ParseError(lineno, "unexpected CSV header");
      have_header = true;
      continue;
    }
    if (fields.size() != header.size()) throw ParseError(lineno, "wrong number of columns");
    auto& row = rows.emplace_back();
    for (const auto& f : fields) {
      if (f.empty()) {
        row.emplace_back();
        continue;
      }
      double v = 0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc{} || ptr != f.data() + f.size()) {
        throw ParseError(lineno, "not a number: '" + f + "'");
      }
      row.emplace_back(v);
    }
  }
  if (!have_header) throw ParseError(lineno, "missing CSV header");
  return rows;
}

}  // namespace murmur::csv
