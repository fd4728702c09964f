#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace murmur {

/// All primes up to a limit together with the running Chebyshev sums
/// theta_prefix[k] = log p_0 + ... + log p_k. Immutable once built.
class PrimeTable {
 public:
  /// Segmented, bit-packed (odd-only) sieve of Eratosthenes.
  /// Throws InvalidArgument for limit < 2 or limit >= 2^32.
  static PrimeTable sieve(std::uint64_t limit);

  std::uint64_t limit() const noexcept { return limit_; }
  std::span<const std::uint32_t> primes() const noexcept { return primes_; }
  std::span<const double> theta_prefix() const noexcept { return theta_; }
  std::size_t size() const noexcept { return primes_.size(); }

  /// theta(x) = sum of log p over p <= x. Throws OutOfRange if x > limit.
  double theta(double x) const;

  /// Number of primes p with p < x (strict).
  std::size_t count_below(double x) const noexcept;
  /// Number of primes p with p <= x.
  std::size_t count_at_most(double x) const noexcept;

 private:
  std::uint64_t limit_ = 0;
  std::vector<std::uint32_t> primes_;
  std::vector<double> theta_;
};

}  // namespace murmur
