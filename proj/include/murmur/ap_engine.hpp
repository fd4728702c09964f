#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "murmur/dataset.hpp"
#include "murmur/primes.hpp"

namespace murmur {

/// Primes up to and including this bound are always counted exhaustively.
/// Above it a single point order (on the curve or its quadratic twist)
/// pins down #E(F_p) inside the Hasse interval.
inline constexpr std::uint32_t kSmallPrimeCutoff = 229;

enum class Reduction { good, bad };

/// A curve reduced modulo p. For p > 3 the model is the short form
/// y^2 = x^3 + a*x + b; for p in {2, 3} the long-form coefficients are kept.
struct ReducedCurve {
  std::uint32_t p = 0;
  Reduction status = Reduction::bad;
  std::uint32_t a = 0, b = 0;
  std::array<std::uint32_t, 5> long_form{};  // a1, a2, a3, a4, a6 mod p
  std::uint64_t seed = 0;

  bool good() const noexcept { return status == Reduction::good; }
  bool short_form() const noexcept { return p > 3; }
};

/// Stable hash of the model coefficients, used to seed point sampling.
std::uint64_t model_hash(const Weierstrass& w) noexcept;

/// Reduces `rec` modulo the prime p; status is bad iff p divides the
/// conductor. Throws ValidationError if p does not divide the conductor but
/// the reduction is singular (the model is not minimal at p).
ReducedCurve reduce_curve(const CurveRecord& rec, std::uint32_t p);

/// Same as reduce_curve with the reduction type supplied by the caller.
ReducedCurve reduce_model(const Weierstrass& w, std::uint32_t p, Reduction status,
                          std::uint64_t seed);

/// True when the reduction of `w` mod p is singular.
bool singular_mod(const Weierstrass& w, std::uint32_t p);

/// Short-form twist y^2 = x^3 + d^2 a x + d^3 b. Requires p > 3.
ReducedCurve quadratic_twist(const ReducedCurve& red, std::uint32_t d);

/// Quadratic character mod an odd prime, backed by a table of squares.
class QuadraticCharacter {
 public:
  explicit QuadraticCharacter(std::uint32_t p);
  std::uint32_t prime() const noexcept { return p_; }
  int operator()(std::uint64_t v) const noexcept { return table_[v % p_]; }

 private:
  std::uint32_t p_;
  std::vector<std::int8_t> table_;
};

/// a_p = p + 1 - #E(F_p) by exhaustive counting. Throws BadReduction.
int ap_naive(const ReducedCurve& red);
/// As above, reusing a character table built for red.p.
int ap_naive(const ReducedCurve& red, const QuadraticCharacter& chi);

/// a_p via baby-step/giant-step order finding in the Hasse interval, using
/// the quadratic twist when one point's order is ambiguous. Requires p > 3.
/// Throws BadReduction, or NumericalFailure if the order cannot be pinned.
int ap_bsgs(const ReducedCurve& red);

/// Dispatches to ap_naive for p <= kSmallPrimeCutoff and ap_bsgs above.
int ap(const ReducedCurve& red);

/// Dense (curve x prime) matrix of a_p values; bad primes hold kBadPrime.
struct ApMatrix {
  static constexpr std::int32_t kBadPrime = INT32_MIN;

  std::vector<std::uint32_t> primes;
  std::size_t curves = 0;
  std::vector<std::int32_t> values;  // row-major, curves x primes.size()

  std::span<const std::int32_t> row(std::size_t curve) const {
    return std::span<const std::int32_t>(values).subspan(curve * primes.size(), primes.size());
  }
};

struct ApValue {
  std::uint32_t p;
  std::int32_t ap;
  bool operator==(const ApValue&) const = default;
};

/// a_p for every curve at every prime of the table. Work is split over
/// primes across `workers` threads; the result does not depend on it.
ApMatrix ap_matrix(std::span<const CurveRecord> recs, const PrimeTable& table,
                   unsigned workers = 1);

/// Per curve, the (p, a_p) pairs at good primes p <= table.limit().
std::vector<std::vector<ApValue>> ap_batch(std::span<const CurveRecord> recs,
                                           const PrimeTable& table, unsigned workers = 1);

}  // namespace murmur
