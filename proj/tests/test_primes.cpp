#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "murmur/error.hpp"
#include "murmur/primes.hpp"

using namespace murmur;

namespace {

bool is_prime_td(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

TEST_CASE("sieve agrees with trial division") {
  const auto t = PrimeTable::sieve(50000);
  std::vector<std::uint32_t> expect;
  for (std::uint32_t n = 2; n <= 50000; ++n)
    if (is_prime_td(n)) expect.push_back(n);
  CHECK(t.size() == 5133);
  REQUIRE(t.size() == expect.size());
  CHECK(std::equal(expect.begin(), expect.end(), t.primes().begin()));
}

TEST_CASE("segment boundaries") {
  // 2^18 odd numbers per segment: limits around one and two segments.
  for (std::uint64_t lim : {2ull, 3ull, 524287ull, 524288ull, 524289ull, 1048577ull}) {
    const auto t = PrimeTable::sieve(lim);
    std::size_t n = 0;
    std::uint32_t last = 0;
    for (std::uint32_t p : t.primes()) {
      CHECK(p > last);
      last = p;
      ++n;
    }
    CHECK(last <= lim);
    if (lim <= 3) CHECK(n == lim - 1);
  }
  CHECK(PrimeTable::sieve(1048577).size() == 82025);
}

TEST_CASE("small tables") {
  const auto t = PrimeTable::sieve(10);
  REQUIRE(t.size() == 4);
  CHECK(t.primes()[3] == 7);
  CHECK(t.theta(10) == doctest::Approx(std::log(210.0)).epsilon(1e-14));
  CHECK(t.theta(1.5) == 0.0);
  CHECK(t.theta(2) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("theta matches direct sums") {
  const auto t = PrimeTable::sieve(100000);
  for (double x : {100.0, 1000.0, 12345.5, 99991.0, 100000.0}) {
    double s = 0.0;
    for (std::uint32_t n = 2; n <= x; ++n)
      if (is_prime_td(n)) s += std::log(static_cast<double>(n));
    CHECK(t.theta(x) == doctest::Approx(s).epsilon(1e-13));
  }
  // theta(x) ~ x
  CHECK(std::abs(t.theta(100000) / 100000.0 - 1.0) < 0.01);
}

TEST_CASE("counting conventions") {
  const auto t = PrimeTable::sieve(100);
  CHECK(t.count_below(2) == 0);
  CHECK(t.count_at_most(2) == 1);
  CHECK(t.count_below(11) == 4);
  CHECK(t.count_at_most(11) == 5);
  CHECK(t.count_below(11.5) == 5);
  CHECK(t.count_at_most(1000) == 25);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(PrimeTable::sieve(1), InvalidArgument);
  CHECK_THROWS_AS(PrimeTable::sieve(1ull << 32), InvalidArgument);
  const auto t = PrimeTable::sieve(100);
  CHECK_THROWS_AS(t.theta(101), OutOfRange);
}
