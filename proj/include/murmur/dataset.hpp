#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace murmur {

using BigInt = boost::multiprecision::cpp_int;

/// Long Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
struct Weierstrass {
  std::int64_t a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;

  BigInt discriminant() const;
  bool operator==(const Weierstrass&) const = default;
};

/// One labelled curve: minimal model, conductor and rank (0 or 1).
struct CurveRecord {
  std::string label;
  Weierstrass model;
  std::uint64_t conductor = 1;
  int rank = 0;
  BigInt discriminant;  // filled by make_curve / parse_curves

  bool operator==(const CurveRecord&) const = default;
};

/// Builds and validates a record. Throws ValidationError if the model is
/// singular, the rank is outside {0,1}, the conductor is zero, or some prime
/// dividing the conductor does not divide the discriminant.
CurveRecord make_curve(std::string label, const Weierstrass& model, std::uint64_t conductor,
                       int rank);

/// Reads CSV with header `label,a1,a2,a3,a4,a6,conductor,rank`. Blank lines
/// and lines starting with '#' are skipped. Throws ParseError for malformed
/// rows and ValidationError (naming the record) for invariant violations.
std::vector<CurveRecord> parse_curves(std::istream& in);

/// Writes records in the format read by parse_curves.
void serialize_curves(std::ostream& out, std::span<const CurveRecord> recs);

/// Records with lo <= conductor <= hi, in input order.
std::vector<CurveRecord> filter_conductor(std::span<const CurveRecord> recs, std::uint64_t lo,
                                          std::uint64_t hi);

/// Distinct prime factors by trial division.
std::vector<std::uint64_t> prime_factors(std::uint64_t n);

}  // namespace murmur
