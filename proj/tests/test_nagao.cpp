#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "murmur/ap_engine.hpp"
#include "murmur/dataset.hpp"
#include "murmur/error.hpp"
#include "murmur/nagao.hpp"
#include "murmur/primes.hpp"

using namespace murmur;

namespace {

const PrimeTable& table() {
  static const auto t = PrimeTable::sieve(20000);
  return t;
}

CurveRecord c11a() { return make_curve("11a1", Weierstrass{0, -1, 1, -10, -20}, 11, 0); }
CurveRecord c37a() { return make_curve("37a1", Weierstrass{0, 0, 1, -1, 0}, 37, 1); }
CurveRecord c15a() { return make_curve("15a1", Weierstrass{1, 1, 1, -10, -10}, 15, 0); }
CurveRecord c389a() { return make_curve("389a1", Weierstrass{0, 1, 1, -2, 0}, 389, 1); }

SBTrace synthetic(std::string id, const BGrid& g, std::vector<double> vals) {
  SBTrace t{std::move(id), g, vals, vals};
  return t;
}

}  // namespace

TEST_CASE("grids") {
  const auto g = BGrid::geometric(3, 1.05, 50000);
  CHECK(g[0] == 3.0);
  CHECK(g.back() <= 50000);
  CHECK(g.back() * 1.05 > 50000);
  CHECK(g.size() == 200);
  CHECK_THROWS_AS(BGrid::from_values({3, 3}), InvalidArgument);
  CHECK_THROWS_AS(BGrid::from_values({2.5, 4}), InvalidArgument);
  CHECK_THROWS_AS(BGrid::from_values({5, 4}), InvalidArgument);
}

TEST_CASE("S(B) worked examples") {
  const auto g = BGrid::from_values({3, 10});
  const auto t = sb_trace(c11a(), g, table());
  CHECK(t.values[0] == doctest::Approx(-2 * std::log(2.0) / 2 / std::log(3.0)).epsilon(1e-14));
  const double expect = (-2 * std::log(2.0) / 2 - std::log(3.0) / 3 + std::log(5.0) / 5 -
                         2 * std::log(7.0) / 7) /
                        std::log(10.0);
  CHECK(t.values[1] == doctest::Approx(expect).epsilon(1e-14));
  CHECK(t.values[1] == doctest::Approx(-0.5617).epsilon(1e-4));
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(t.values[k] == t.raw[k] / std::log(g[k]));

  // 15a: both 3 and 5 are bad, 2 is good, so S(5) only sees p = 2
  const auto s15 = sb_trace(c15a(), BGrid::from_values({5, 6}), table());
  CHECK(s15.values[0] * std::log(5.0) == doctest::Approx(s15.values[1] * std::log(6.0)));

  // every prime below B divides N = 6: empty sum
  const auto six = make_curve("x", Weierstrass{0, -1, 0, -3, -3}, 6, 0);
  REQUIRE(six.discriminant % 6 == 0);
  CHECK(sb_trace(six, BGrid::from_values({3, 4, 5}), table()).values ==
        std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("strict inequality p < B") {
  const auto t = sb_trace(c11a(), BGrid::from_values({7, 7.5, 8}), table());
  CHECK(t.raw[0] != t.raw[2]);
  CHECK(t.raw[1] == t.raw[2]);
}

TEST_CASE("trace matches a direct sum and refinement leaves values unchanged") {
  const auto coarse = BGrid::from_values({100, 1000, 10000});
  const auto fine = BGrid::geometric(3, 1.01, 10000);
  std::vector<double> merged(fine.values().begin(), fine.values().end());
  merged.insert(merged.end(), {100, 1000, 10000});
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  const auto refined = BGrid::from_values(merged);

  for (const auto& rec : {c11a(), c37a(), c389a()}) {
    const auto a = sb_trace(rec, coarse, table());
    const auto b = sb_trace(rec, refined, table());
    for (std::size_t k = 0; k < coarse.size(); ++k) {
      double direct = 0.0;
      for (std::uint32_t p : table().primes()) {
        if (p >= coarse[k]) break;
        if (rec.conductor % p == 0) continue;
        direct += ap(reduce_curve(rec, p)) * std::log(double(p)) / p;
      }
      CHECK(a.raw[k] == doctest::Approx(direct).epsilon(1e-12));
      const auto idx = std::lower_bound(merged.begin(), merged.end(), coarse[k]) - merged.begin();
      CHECK(b.raw[idx] == a.raw[k]);
      CHECK(b.values[idx] == a.values[k]);
    }
  }
  CHECK_THROWS_AS(sb_trace(c11a(), BGrid::from_values({30000}), table()), OutOfRange);
}

TEST_CASE("rank separates S(B)") {
  const auto g = BGrid::from_values({20000});
  CHECK(sb_trace(c11a(), g, table()).values[0] > 0);
  CHECK(sb_trace(c389a(), g, table()).values[0] < -1.0);
}

TEST_CASE("batched traces equal single traces") {
  const std::vector<CurveRecord> recs{c11a(), c37a(), c15a(), c389a()};
  const auto g = BGrid::geometric(3, 1.2, 5000);
  const auto many = sb_traces(recs, g, table(), 2);
  REQUIRE(many.size() == 4);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto one = sb_trace(recs[i], g, table());
    CHECK(many[i].curve_id == recs[i].label);
    CHECK(many[i].values == one.values);
  }
}

TEST_CASE("family averages") {
  const auto g = BGrid::from_values({3, 4, 5});
  std::vector<SBTrace> ts{synthetic("a", g, {1, 2, 3}), synthetic("b", g, {-1, -2, -3}),
                          synthetic("c", g, {0.5, 0.5, 0.5})};
  const std::vector<int> ranks{0, 0, 1};
  const auto fam = family_average(ts, ranks);
  CHECK(fam.at(0).n == 2);
  CHECK(fam.at(0).mean == std::vector<double>{0, 0, 0});
  // s = sqrt(2) * v
  CHECK(fam.at(0).half_width[2] == doctest::Approx(kZ90 * 3 * std::sqrt(2.0) / std::sqrt(2.0)));
  CHECK(fam.at(1).mean == ts[2].values);
  CHECK(fam.at(1).half_width == std::vector<double>{0, 0, 0});

  // against a two-pass textbook estimate on random data
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd(0.3, 2.0);
  std::vector<SBTrace> rs;
  std::vector<int> rk;
  for (int i = 0; i < 500; ++i) {
    rs.push_back(synthetic("r", g, {nd(rng), nd(rng), nd(rng)}));
    rk.push_back(1);
  }
  const auto fr = family_average(rs, rk);
  CHECK_FALSE(fr.rank0.has_value());
  CHECK_THROWS_AS(fr.at(0), EmptyClass);
  for (std::size_t k = 0; k < 3; ++k) {
    double m = 0, v = 0;
    for (const auto& t : rs) m += t.values[k];
    m /= rs.size();
    for (const auto& t : rs) v += (t.values[k] - m) * (t.values[k] - m);
    v /= (rs.size() - 1);
    CHECK(fr.at(1).mean[k] == doctest::Approx(m).epsilon(1e-12));
    CHECK(fr.at(1).half_width[k] == doctest::Approx(kZ90 * std::sqrt(v / rs.size())).epsilon(1e-12));
  }

  CHECK_THROWS_AS(family_average(std::span<const SBTrace>{}, std::span<const int>{}), EmptyClass);
  std::vector<SBTrace> mixed{synthetic("a", g, {1, 2, 3}),
                             synthetic("b", BGrid::from_values({3, 4, 6}), {1, 2, 3})};
  const std::vector<int> r2{0, 1};
  CHECK_THROWS_AS(family_average(mixed, r2), InvalidArgument);
  const std::vector<int> r3{0, 2};
  CHECK_THROWS_AS(family_average(std::span(ts).first(2), r3), InvalidArgument);
}

TEST_CASE("family csv round trip") {
  const auto g = BGrid::from_values({3, 4.5, 1e4 / 3});
  std::vector<SBTrace> ts{synthetic("a", g, {0.1, 1.0 / 3, -2e-17}),
                          synthetic("b", g, {0.2, 0.25, 1e100})};
  const std::vector<int> ranks{0, 0};
  const auto fam = family_average(ts, ranks);
  std::stringstream io;
  write_figure1_csv(io, fam);
  const auto back = read_figure1_csv(io);
  REQUIRE(back.rank0.has_value());
  CHECK_FALSE(back.rank1.has_value());
  CHECK(back.rank0->grid == g);
  CHECK(back.rank0->mean == fam.rank0->mean);
  CHECK(back.rank0->half_width == fam.rank0->half_width);
}

TEST_CASE("a_p profile") {
  const std::vector<CurveRecord> one{c37a()};
  const auto t = PrimeTable::sieve(500);
  const auto prof = ap_average_profile(one, t);
  REQUIRE(prof.size() == t.size());
  for (const auto& row : prof) {
    CHECK(std::isnan(row.mean0));
    CHECK(row.n0 == 0);
    if (row.p == 37) {
      CHECK(row.n1 == 0);
      CHECK(std::isnan(row.mean1));
    } else {
      CHECK(row.mean1 == ap(reduce_curve(one[0], row.p)));
    }
  }

  const std::vector<CurveRecord> recs{c11a(), c37a(), c15a(), c389a()};
  const auto p4 = ap_average_profile(recs, t, 2);
  for (const auto& row : p4) {
    const double bound = 2 * std::sqrt(double(row.p));
    if (row.n0) CHECK(std::abs(row.mean0) <= bound);
    if (row.n1) CHECK(std::abs(row.mean1) <= bound);
    if (row.p == 11) CHECK(row.n0 == 1);
    if (row.p == 101) {
      CHECK(row.n0 == 2);
      CHECK(row.mean0 == doctest::Approx((ap(reduce_curve(recs[0], 101)) +
                                          ap(reduce_curve(recs[2], 101))) / 2.0));
    }
  }
  std::stringstream io;
  write_figure2_csv(io, p4);
  const auto back = read_figure2_csv(io);
  REQUIRE(back.size() == p4.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].p == p4[i].p);
    if (p4[i].n0) CHECK(back[i].mean0 == p4[i].mean0);
    if (p4[i].n1) CHECK(back[i].mean1 == p4[i].mean1);
  }
}
