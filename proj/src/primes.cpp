#include "murmur/primes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "murmur/compensated_sum.hpp"
#include "murmur/error.hpp"

namespace murmur {

namespace {

// Bits per segment; 2^18 odd numbers = 32 KiB of sieve state.
constexpr std::uint64_t kSegmentBits = std::uint64_t{1} << 18;

std::vector<std::uint32_t> small_primes(std::uint32_t limit) {
  std::vector<bool> composite(limit + 1, false);
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = std::uint64_t{i} * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

}  // namespace

PrimeTable PrimeTable::sieve(std::uint64_t limit) {
  if (limit < 2) throw InvalidArgument("prime table limit must be >= 2");
  if (limit > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("prime table limit must be < 2^32");
  }
  PrimeTable t;
  t.limit_ = limit;
  t.primes_.push_back(2);

  auto root = static_cast<std::uint32_t>(std::sqrt(static_cast<double>(limit)));
  while (std::uint64_t{root + 1} * (root + 1) <= limit) ++root;
  while (std::uint64_t{root} * root > limit) --root;
  const auto base = small_primes(std::max<std::uint32_t>(root, 2));

  // Bit i of a segment starting at odd number `lo` represents lo + 2i.
  std::vector<std::uint64_t> bits(kSegmentBits / 64);
  for (std::uint64_t lo = 3; lo <= limit; lo += 2 * kSegmentBits) {
    const std::uint64_t hi = std::min<std::uint64_t>(limit, lo + 2 * kSegmentBits - 1);
    std::fill(bits.begin(), bits.end(), 0);
    for (std::size_t k = 1; k < base.size(); ++k) {
      const std::uint64_t q = base[k];
      if (q * q > hi) break;
      std::uint64_t start = std::max(q * q, (lo + q - 1) / q * q);
      if (start % 2 == 0) start += q;
      for (std::uint64_t m = start; m <= hi; m += 2 * q) {
        const std::uint64_t i = (m - lo) / 2;
        bits[i / 64] |= std::uint64_t{1} << (i % 64);
      }
    }
    for (std::uint64_t n = lo; n <= hi; n += 2) {
      const std::uint64_t i = (n - lo) / 2;
      if (!(bits[i / 64] >> (i % 64) & 1)) t.primes_.push_back(static_cast<std::uint32_t>(n));
    }
  }

  t.theta_.reserve(t.primes_.size());
  CompensatedSum acc;
  for (auto p : t.primes_) {
    acc.add(std::log(static_cast<double>(p)));
    t.theta_.push_back(acc.value());
  }
  return t;
}

std::size_t PrimeTable::count_below(double x) const noexcept {
  return static_cast<std::size_t>(
      std::lower_bound(primes_.begin(), primes_.end(), x,
                       [](std::uint32_t p, double v) { return static_cast<double>(p) < v; }) -
      primes_.begin());
}

std::size_t PrimeTable::count_at_most(double x) const noexcept {
  return static_cast<std::size_t>(
      std::upper_bound(primes_.begin(), primes_.end(), x,
                       [](double v, std::uint32_t p) { return v < static_cast<double>(p); }) -
      primes_.begin());
}

double PrimeTable::theta(double x) const {
  if (x > static_cast<double>(limit_)) throw OutOfRange("theta: x exceeds prime table limit");
  const std::size_t n = count_at_most(x);
  return n == 0 ? 0.0 : theta_[n - 1];
}

}  // namespace murmur
