#include "murmur/density.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "murmur/dataset.hpp"
#include "murmur/error.hpp"
#include "murmur/primes.hpp"

namespace murmur {

MurmurationConstants euler_constants(std::uint64_t P, EulerOptions options) {
  if (P < 100) throw InvalidArgument("euler_constants: truncation bound must be >= 100");
  // Every factor is 1 + t with |log(1 + t)| <= 1.2 / p^2, and
  // sum_{n > P} 1/n^2 < 1/P.
  const double tail = 1.2 / static_cast<double>(P);
  const double rel = std::expm1(tail);
  if (options.tolerance > 0.0 && rel > options.tolerance) {
    throw ToleranceError("euler_constants: P = " + std::to_string(P) +
                         " gives relative error bound " + std::to_string(rel) +
                         " above the requested tolerance");
  }

  const auto table = PrimeTable::sieve(P);
  double logA = 0.0, logB = 0.0, logD = 0.0;
  for (std::uint32_t q : table.primes()) {
    if (q == 2 && !options.include_two) continue;
    const double p = q;
    const double p2 = p * p;
    logA += std::log1p(p / ((p + 1.0) * (p + 1.0) * (p - 1.0)));
    // (p^4 - 2p^2 - p + 1) / (p^2 - 1)^2 = 1 - p / (p^2 - 1)^2
    logB += std::log1p(-p / ((p2 - 1.0) * (p2 - 1.0)));
    logD += std::log1p(-1.0 / (p2 + p));
  }

  MurmurationConstants k;
  k.A = std::exp(logA);
  k.B = std::exp(logB);
  k.D2 = 12.0 / (std::numbers::pi * std::exp(logD));
  k.C1 = k.D2 * k.A;
  k.C2 = k.D2 * k.B;
  k.C3 = k.D2 * std::numbers::pi;
  k.truncation = P;
  k.include_two = options.include_two;
  k.tail_log_bound = tail;
  k.relative_error_bound = rel;
  return k;
}

double c_factor(std::uint64_t r) {
  if (r == 0) throw InvalidArgument("c_factor: r must be positive");
  double c = 1.0;
  for (std::uint64_t q : prime_factors(r)) {
    const double p = static_cast<double>(q);
    const double p2 = p * p;
    c *= 1.0 + p2 / (p2 * p2 - 2.0 * p2 - p + 1.0);
  }
  return c;
}

double density_M(double y, const MurmurationConstants& k) {
  if (!(y >= 0.0)) throw InvalidArgument("density_M: y must be >= 0");
  double sum = 0.0;
  for (std::uint64_t r = 1; static_cast<double>(r * r) <= 4.0 * y; ++r) {
    const double rr = static_cast<double>(r * r);
    sum += c_factor(r) * std::sqrt(4.0 * y - rr);
  }
  return k.C1 * std::sqrt(y) + k.C2 * sum - k.C3 * y;
}

}  // namespace murmur
