#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "murmur/density.hpp"
#include "murmur/error.hpp"
#include "murmur/fx.hpp"
#include "murmur/nagao.hpp"
#include "murmur/primes.hpp"

using namespace murmur;
using std::numbers::pi;

namespace {

const MurmurationConstants& k6() {
  static const auto k = euler_constants(1000000);
  return k;
}

const PrimeTable& t1e5() {
  static const auto t = PrimeTable::sieve(100000);
  return t;
}

// Dense scan with a parabola through the best sample and its neighbours.
double scan_argmax(double lo, double hi, const std::function<double(double)>& g) {
  const int n = 200000;
  const double h = (hi - lo) / n;
  int best = 1;
  for (int i = 1; i < n; ++i)
    if (g(lo + i * h) > g(lo + best * h)) best = i;
  const double x = lo + best * h;
  const double ym = g(x - h), y0 = g(x), yp = g(x + h);
  return x + 0.5 * h * (ym - yp) / (ym - 2 * y0 + yp);
}

FamilyAverages synthetic_family(const BGrid& g, const std::vector<double>& diff) {
  FamilyCurve c0{0, g, diff, std::vector<double>(g.size(), 0.0), 10};
  FamilyCurve c1{1, g, std::vector<double>(g.size(), 0.0), std::vector<double>(g.size(), 0.0), 10};
  return FamilyAverages{c0, c1};
}

}  // namespace

TEST_CASE("main term formulas") {
  const auto m = MainTermModel::make(1e5, k6());
  const auto& k = k6();
  const double x = 0.1, L = std::log(x * 1e5);
  CHECK(main_term_g1(x, m) ==
        doctest::Approx((2 * k.C1 * std::sqrt(x) - k.C3 * x - k.C1 * std::sqrt(2 / 1e5)) / L));
  const double y = 0.6, s = std::sqrt(4 * y - 1), Ly = std::log(y * 1e5);
  CHECK(main_term_g2(y, m) == doctest::Approx((2 * k.C1 * std::sqrt(y) + 2 * k.C2 * s -
                                               2 * k.C2 * std::atan(s) - k.C3 * y -
                                               k.C1 * std::sqrt(2 / 1e5)) /
                                              Ly));
  CHECK(main_term(0.1, m) == main_term_g1(0.1, m));
  CHECK(main_term(0.6, m) == main_term_g2(0.6, m));

  for (double N : {1e4, 1e5, 1e8}) {
    const auto mm = MainTermModel::make(N, k6());
    const double below = std::nextafter(0.25, 0.0);
    CHECK(std::abs(main_term_g1(below, mm) - main_term_g2(0.25, mm)) < 1e-12);
    CHECK(main_term_g1(0.25 - 1e-15, mm) == doctest::Approx(main_term_g2(0.25, mm)).epsilon(1e-12));
  }

  // The numerator 2 C1 u - C3 u^2 - C1 sqrt(2/N) (u = sqrt(x)) vanishes near
  // x N = 1/2, below the domain x N > 1, so g1 is positive at its left end.
  const double r = 2 * k.C1, q = k.C1 * std::sqrt(2 / 1e5);
  const double u = (r - std::sqrt(r * r - 4 * k.C3 * q)) / (2 * k.C3);
  CHECK(u * u * 1e5 < 1);
  CHECK(main_term_g1(1.5 / 1e5, m) > 0);

  CHECK_THROWS_AS(main_term_g1(0.25, m), InvalidArgument);
  CHECK_THROWS_AS(main_term_g1(0.0, m), InvalidArgument);
  CHECK_THROWS_AS(main_term_g1(5e-6, m), InvalidArgument);
  CHECK_THROWS_AS(main_term_g2(0.2, m), InvalidArgument);
  CHECK_THROWS_AS(main_term_g2(1.0, m), InvalidArgument);
  CHECK_THROWS_AS(MainTermModel::make(50, k6()), InvalidArgument);
}

TEST_CASE("tabulated main-term maxima") {
  struct Row {
    double N, x1, x2;
  };
  // N = 1e8 x1 is checked against a dense scan only (see the acceptance test)
  const Row rows[] = {{1e4, 0.10023, 0.69381}, {1e5, 0.11077, 0.70510},
                      {1e6, 0.11724, 0.71294}, {1e7, 0.12156, 0.71856}};
  for (const auto& row : rows) {
    const auto r = local_maxima(MainTermModel::make(row.N, k6()));
    CHECK(std::abs(r.x1 - row.x1) <= 1e-4);
    CHECK(std::abs(r.x2 - row.x2) <= 1e-4);
  }
  CHECK(std::abs(local_maxima(MainTermModel::make(1e8, k6())).x2 - 0.72276) <= 1e-4);
}

TEST_CASE("maxima against a dense scan") {
  double px1 = 0, px2 = 0;
  for (double N : {1e4, 1e5, 1e6, 1e7, 1e8}) {
    const auto m = MainTermModel::make(N, k6());
    const auto r = local_maxima(m, 1e-10);
    const double s1 = scan_argmax(1e-3, 0.25 - 1e-9, [&](double x) { return main_term_g1(x, m); });
    const double s2 = scan_argmax(0.25, 1 - 1e-9, [&](double x) { return main_term_g2(x, m); });
    CHECK(r.x1 == doctest::Approx(s1).epsilon(1e-6));
    CHECK(r.x2 == doctest::Approx(s2).epsilon(1e-6));
    CHECK(r.g1_value == main_term_g1(r.x1, m));
    CHECK(r.g2_value == main_term_g2(r.x2, m));

    // derivative changes sign + to - across the maximum
    const double h1 = std::sqrt(std::numeric_limits<double>::epsilon()) * r.x1;
    const double h2 = std::sqrt(std::numeric_limits<double>::epsilon()) * r.x2;
    auto d1 = [&](double x) { return main_term_g1(x + h1, m) - main_term_g1(x - h1, m); };
    auto d2 = [&](double x) { return main_term_g2(x + h2, m) - main_term_g2(x - h2, m); };
    CHECK(d1(r.x1 - 1e-4) > 0);
    CHECK(d1(r.x1 + 1e-4) < 0);
    CHECK(d2(r.x2 - 1e-4) > 0);
    CHECK(d2(r.x2 + 1e-4) < 0);

    // bounds and convergence direction
    CHECK(r.x1 < r.first_bound);
    CHECK(r.x2 < r.second_bound);
    CHECK(r.x2 < r.lambda);
    CHECK(r.x1 > px1);
    CHECK(r.x2 > px2);
    px1 = r.x1;
    px2 = r.x2;
  }
}

TEST_CASE("lambda") {
  const auto& k = k6();
  const double l = solve_lambda(k);
  CHECK(std::abs(l - 0.75085) < 1e-4);
  CHECK(std::abs(lambda_residual(l, k)) < 1e-10);
  CHECK(lambda_residual(0.25, k) == doctest::Approx(0.0).epsilon(1e-15));
  // independent scan: F changes sign exactly once on [0.3, 1]
  int changes = 0;
  double root = 0;
  for (int i = 0; i < 7000; ++i) {
    const double a = 0.3 + i * 1e-4, b = a + 1e-4;
    if ((lambda_residual(a, k) > 0) != (lambda_residual(b, k) > 0)) {
      ++changes;
      root = a;
    }
  }
  CHECK(changes == 1);
  CHECK(std::abs(l - root) <= 1e-4);
  const auto lc = limit_constants(k);
  CHECK(lc.lambda == l);
  CHECK(lc.lambda < lc.second_bound);
  CHECK(lc.first_limit == doctest::Approx(k.A * k.A / (pi * pi)));
}

TEST_CASE("f_exact partial sums") {
  const auto& k = k6();
  const double N = 1e5;
  CHECK(f_exact(3 / N, N, k, t1e5()) ==
        doctest::Approx(density_M(2 / N, k) * std::log(2.0) / 2 / std::log(3.0)));

  // crossing p = 101: the sum gains exactly that prime's term
  const double lo = 101 / N, hi = std::nextafter(101 / N, 1.0);
  const double jump = f_exact(hi, N, k, t1e5()) * std::log(hi * N) -
                      f_exact(lo, N, k, t1e5()) * std::log(lo * N);
  CHECK(jump == doctest::Approx(density_M(101 / N, k) * std::log(101.0) / 101).epsilon(1e-9));

  // against a direct loop
  for (double x : {0.05, 0.3, 0.77}) {
    double s = 0;
    for (std::uint32_t p : t1e5().primes()) {
      if (p >= x * N) break;
      s += density_M(p / N, k) * std::log(double(p)) / p;
    }
    CHECK(f_exact(x, N, k, t1e5()) == doctest::Approx(s / std::log(x * N)).epsilon(1e-12));
  }

  const auto xs = figure3_grid();
  CHECK(xs.size() == 2000);
  CHECK(xs.front() > 0.005);
  CHECK(xs.back() < 1.0);
  const auto sweep = f_exact_sweep(xs, N, k, t1e5());
  for (std::size_t i = 0; i < xs.size(); i += 97)
    CHECK(sweep[i] == doctest::Approx(f_exact(xs[i], N, k, t1e5())).epsilon(1e-12));

  CHECK_THROWS_AS(f_exact(0.5, 1e6, k, t1e5()), OutOfRange);
  CHECK_THROWS_AS(f_exact(1.0, N, k, t1e5()), InvalidArgument);
  CHECK_THROWS_AS(f_exact(2 / N, N, k, t1e5()), InvalidArgument);
}

TEST_CASE("f_exact follows the main term") {
  const auto& k = k6();
  const double N = 1e5;
  const auto m = MainTermModel::make(N, k);
  double worst = 0;
  for (double x = 0.02; x < 0.99; x += 0.01)
    worst = std::max(worst, std::abs(f_exact(x, N, k, t1e5()) - main_term(x, m)));
  CHECK(worst < 0.05);
}

TEST_CASE("interior maxima") {
  CHECK(interior_maxima(std::vector<double>{0, 1, 0}) == std::vector<std::size_t>{1});
  CHECK(interior_maxima(std::vector<double>{2, 1, 0}).empty());
  CHECK(interior_maxima(std::vector<double>{0, 1, 1, 1, 0}) == std::vector<std::size_t>{2});
  CHECK(interior_maxima(std::vector<double>{0, 1, 1, 2, 0}) == std::vector<std::size_t>{3});
  CHECK(interior_maxima(std::vector<double>{0, 1, 1}).empty());
  CHECK(interior_maxima(std::vector<double>{1, 1, 1, 1}).empty());
  CHECK(interior_maxima(std::vector<double>{0, 2, 0, 3, -1}) == std::vector<std::size_t>{1, 3});
}

TEST_CASE("empirical maxima on synthetic families") {
  const double n_ref = 40000;
  const auto g = BGrid::geometric(0.005 * n_ref, 1.001, 2.5 * n_ref);
  const auto m = MainTermModel::make(n_ref, k6());
  const auto r = local_maxima(m);
  std::vector<double> diff;
  for (double b : g.values()) {
    const double x = b / n_ref;
    diff.push_back(x < 0.999 ? main_term(x, m) : main_term(0.999, m) - (x - 0.999));
  }
  const auto xs = empirical_maxima(synthetic_family(g, diff), n_ref, 1);
  REQUIRE(xs.size() == 2);
  CHECK(std::abs(xs[0] - r.x1) <= 1.001e-3 * r.x1);
  CHECK(std::abs(xs[1] - r.x2) <= 1.001e-3 * r.x2);
  const auto smooth = empirical_maxima(synthetic_family(g, diff), n_ref, 5);
  REQUIRE(smooth.size() == 2);
  CHECK(std::abs(smooth[0] - r.x1) <= 3e-3 * r.x1);

  const std::vector<double> flat(g.size(), 0.25);
  CHECK(empirical_maxima(synthetic_family(g, flat), n_ref).empty());

  const auto short_grid = BGrid::geometric(0.005 * n_ref, 1.01, 1.5 * n_ref);
  CHECK_THROWS_AS(empirical_maxima(synthetic_family(short_grid, std::vector<double>(short_grid.size())),
                                   n_ref),
                  OutOfRange);
  CHECK_THROWS_AS(empirical_maxima(synthetic_family(g, diff), n_ref, 4), InvalidArgument);
}
