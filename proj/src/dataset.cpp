#include "murmur/dataset.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "murmur/error.hpp"

namespace murmur {

BigInt Weierstrass::discriminant() const {
  const BigInt A1 = a1, A2 = a2, A3 = a3, A4 = a4, A6 = a6;
  const BigInt b2 = A1 * A1 + 4 * A2;
  const BigInt b4 = 2 * A4 + A1 * A3;
  const BigInt b6 = A3 * A3 + 4 * A6;
  const BigInt b8 = A1 * A1 * A6 + 4 * A2 * A6 - A1 * A3 * A4 + A2 * A3 * A3 - A4 * A4;
  return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
    if (n % d != 0) continue;
    out.push_back(d);
    while (n % d == 0) n /= d;
  }
  if (n > 1) out.push_back(n);
  return out;
}

CurveRecord make_curve(std::string label, const Weierstrass& model, std::uint64_t conductor,
                       int rank) {
  CurveRecord rec{std::move(label), model, conductor, rank, model.discriminant()};
  const std::string who = rec.label.empty() ? std::string("unlabelled curve") : rec.label;
  if (rec.discriminant == 0) throw ValidationError(who + ": singular model (discriminant 0)");
  if (rank != 0 && rank != 1) throw ValidationError(who + ": rank must be 0 or 1");
  if (conductor == 0) throw ValidationError(who + ": conductor must be positive");
  for (auto p : prime_factors(conductor)) {
    if (rec.discriminant % p != 0) {
      throw ValidationError(who + ": prime " + std::to_string(p) +
                            " divides the conductor but not the discriminant");
    }
  }
  return rec;
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename Int>
Int parse_int(std::string_view field, std::size_t line, const char* name) {
  field = trim(field);
  Int v{};
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(line, std::string("bad integer in column '") + name + "': '" +
                               std::string(field) + "'");
  }
  return v;
}

constexpr const char* kHeader = "label,a1,a2,a3,a4,a6,conductor,rank";

}  // namespace

std::vector<CurveRecord> parse_curves(std::istream& in) {
  std::vector<CurveRecord> out;
  std::string raw;
  std::size_t line = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    if (!have_header) {
      std::string normalized;
      for (char c : text) {
        if (c != ' ') normalized += c;
      }
      if (normalized != kHeader) {
        throw ParseError(line, std::string("expected header '") + kHeader + "'");
      }
      have_header = true;
      continue;
    }
    const auto f = split(text);
    if (f.size() != 8) {
      throw ParseError(line, "expected 8 columns, got " + std::to_string(f.size()));
    }
    Weierstrass w{parse_int<std::int64_t>(f[1], line, "a1"), parse_int<std::int64_t>(f[2], line, "a2"),
                  parse_int<std::int64_t>(f[3], line, "a3"), parse_int<std::int64_t>(f[4], line, "a4"),
                  parse_int<std::int64_t>(f[5], line, "a6")};
    const auto n = parse_int<std::uint64_t>(f[6], line, "conductor");
    const auto r = parse_int<int>(f[7], line, "rank");
    std::string label(trim(f[0]));
    try {
      out.push_back(make_curve(std::move(label), w, n, r));
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line) + ": " + e.what());
    }
  }
  if (!have_header) throw ParseError(line, "missing header");
  return out;
}

void serialize_curves(std::ostream& out, std::span<const CurveRecord> recs) {
  out << kHeader << '\n';
  for (const auto& r : recs) {
    out << r.label << ',' << r.model.a1 << ',' << r.model.a2 << ',' << r.model.a3 << ','
        << r.model.a4 << ',' << r.model.a6 << ',' << r.conductor << ',' << r.rank << '\n';
  }
}

std::vector<CurveRecord> filter_conductor(std::span<const CurveRecord> recs, std::uint64_t lo,
                                          std::uint64_t hi) {
  if (lo > hi) throw InvalidArgument("filter_conductor: lo > hi");
  std::vector<CurveRecord> out;
  for (const auto& r : recs) {
    if (r.conductor >= lo && r.conductor <= hi) out.push_back(r);
  }
  return out;
}

}  // namespace murmur
