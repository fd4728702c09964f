#include "murmur/ap_engine.hpp"

#include <algorithm>
#include <atomic>
#include <iterator>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>

#include "murmur/error.hpp"

namespace murmur {

namespace {

using u64 = std::uint64_t;

u64 mod_signed(std::int64_t v, u64 p) {
  const std::int64_t r = v % static_cast<std::int64_t>(p);
  return static_cast<u64>(r < 0 ? r + static_cast<std::int64_t>(p) : r);
}

// Arithmetic mod a prime p < 2^32. Operands of add/sub must be reduced;
// mul accepts any x, y with x * y < 2^64 and uses Barrett reduction.
struct Fp {
  u64 p;
  u64 recip;  // floor(2^64 / p)

  Fp(u64 modulus) : p(modulus), recip(~u64{0} / modulus) {}

  u64 add(u64 x, u64 y) const {
    const u64 r = x + y;
    return r >= p ? r - p : r;
  }
  u64 sub(u64 x, u64 y) const { return x >= y ? x - y : x + p - y; }
  u64 mul(u64 x, u64 y) const {
    const u64 t = x * y;
    const u64 q = static_cast<u64>((static_cast<unsigned __int128>(t) * recip) >> 64);
    u64 r = t - q * p;
    while (r >= p) r -= p;
    return r;
  }
  u64 neg(u64 x) const { return x == 0 ? 0 : p - x; }

  u64 pow(u64 base, u64 e) const {
    u64 r = 1 % p;
    base %= p;
    while (e) {
      if (e & 1) r = mul(r, base);
      base = mul(base, base);
      e >>= 1;
    }
    return r;
  }

  u64 inv(u64 x) const {
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = static_cast<std::int64_t>(p), new_r = static_cast<std::int64_t>(x);
    while (new_r != 0) {
      const std::int64_t q = r / new_r;
      t = std::exchange(new_t, t - q * new_t);
      r = std::exchange(new_r, r - q * new_r);
    }
    return t < 0 ? static_cast<u64>(t + static_cast<std::int64_t>(p)) : static_cast<u64>(t);
  }

  // Jacobi symbol (x/p); equals the Legendre symbol since p is prime.
  int legendre(u64 x) const {
    u64 a = x % p, n = p;
    if (a == 0) return 0;
    int s = 1;
    while (a != 0) {
      while (a % 2 == 0) {
        a /= 2;
        const u64 r = n % 8;
        if (r == 3 || r == 5) s = -s;
      }
      std::swap(a, n);
      if (a % 4 == 3 && n % 4 == 3) s = -s;
      a %= n;
    }
    return n == 1 ? s : 0;
  }

  // Tonelli-Shanks; v must be a nonzero square.
  u64 sqrt(u64 v) const {
    if (p % 4 == 3) return pow(v, (p + 1) / 4);
    u64 q = p - 1;
    unsigned s = 0;
    while (q % 2 == 0) {
      q /= 2;
      ++s;
    }
    u64 z = 2;
    while (legendre(z) != -1) ++z;
    u64 m = s, c = pow(z, q), t = pow(v, q), r = pow(v, (q + 1) / 2);
    while (t != 1) {
      u64 i = 0, t2 = t;
      while (t2 != 1) {
        t2 = mul(t2, t2);
        ++i;
      }
      u64 b = c;
      for (u64 j = 0; j + i + 1 < m; ++j) b = mul(b, b);
      m = i;
      c = mul(b, b);
      t = mul(t, c);
      r = mul(r, b);
    }
    return r;
  }
};

struct Point {
  u64 x = 0, y = 0;
  bool inf = true;
};

// Jacobian coordinates: (X, Y, Z) represents (X/Z^2, Y/Z^3); Z = 0 is O.
struct Jac {
  u64 X = 1, Y = 1, Z = 0;
  bool inf() const { return Z == 0; }
};

// Arithmetic on y^2 = x^3 + a x + b over F_p.
struct ShortCurve {
  Fp f;
  u64 a, b;

  u64 rhs(u64 x) const { return f.add(f.mul(f.add(f.mul(x, x), a), x), b); }

  Jac dbl(const Jac& J) const {
    if (J.inf() || J.Y == 0) return Jac{};
    const u64 YY = f.mul(J.Y, J.Y);
    const u64 S = f.mul(4, f.mul(J.X, YY));
    const u64 ZZ = f.mul(J.Z, J.Z);
    const u64 M = f.add(f.mul(3, f.mul(J.X, J.X)), f.mul(a, f.mul(ZZ, ZZ)));
    const u64 X3 = f.sub(f.mul(M, M), f.add(S, S));
    const u64 Y3 = f.sub(f.mul(M, f.sub(S, X3)), f.mul(8, f.mul(YY, YY)));
    return {X3, Y3, f.mul(2, f.mul(J.Y, J.Z))};
  }

  // J + Q with Q affine.
  Jac add(const Jac& J, const Point& Q) const {
    if (Q.inf) return J;
    if (J.inf()) return {Q.x, Q.y, 1};
    const u64 ZZ = f.mul(J.Z, J.Z);
    const u64 U2 = f.mul(Q.x, ZZ);
    const u64 S2 = f.mul(Q.y, f.mul(ZZ, J.Z));
    const u64 H = f.sub(U2, J.X);
    const u64 r = f.sub(S2, J.Y);
    if (H == 0) return r == 0 ? dbl(J) : Jac{};
    const u64 HH = f.mul(H, H);
    const u64 HHH = f.mul(HH, H);
    const u64 V = f.mul(J.X, HH);
    const u64 X3 = f.sub(f.sub(f.mul(r, r), HHH), f.add(V, V));
    const u64 Y3 = f.sub(f.mul(r, f.sub(V, X3)), f.mul(J.Y, HHH));
    return {X3, Y3, f.mul(J.Z, H)};
  }

  Point affine(const Jac& J) const {
    if (J.inf()) return Point{};
    const u64 zi = f.inv(J.Z);
    const u64 zi2 = f.mul(zi, zi);
    return Point{f.mul(J.X, zi2), f.mul(J.Y, f.mul(zi2, zi)), false};
  }

  // Montgomery's trick: one inversion for the whole batch.
  std::vector<Point> affine(std::span<const Jac> js) const {
    std::vector<u64> prefix(js.size());
    u64 acc = 1;
    for (std::size_t i = 0; i < js.size(); ++i) {
      prefix[i] = acc;
      if (!js[i].inf()) acc = f.mul(acc, js[i].Z);
    }
    u64 inv = f.inv(acc);
    std::vector<Point> out(js.size());
    for (std::size_t i = js.size(); i-- > 0;) {
      if (js[i].inf()) continue;
      const u64 zi = f.mul(inv, prefix[i]);
      inv = f.mul(inv, js[i].Z);
      const u64 zi2 = f.mul(zi, zi);
      out[i] = Point{f.mul(js[i].X, zi2), f.mul(js[i].Y, f.mul(zi2, zi)), false};
    }
    return out;
  }

  Point add(const Point& P, const Point& Q) const {
    return affine(add(P.inf ? Jac{} : Jac{P.x, P.y, 1}, Q));
  }

  // Left-to-right double-and-add with mixed additions of the affine base.
  Point mul(u64 k, const Point& P) const {
    if (P.inf || k == 0) return Point{};
    Jac acc;
    for (int bit = 63 - __builtin_clzll(k); bit >= 0; --bit) {
      acc = dbl(acc);
      if ((k >> bit) & 1) acc = add(acc, P);
    }
    return affine(acc);
  }

  template <typename Rng>
  Point random_point(Rng& rng) const {
    std::uniform_int_distribution<u64> dist(0, f.p - 1);
    for (;;) {
      const u64 x = dist(rng);
      const u64 v = rhs(x);
      if (v == 0) return Point{x, 0, false};
      if (f.legendre(v) == 1) {
        u64 y = f.sqrt(v);
        if (rng() & 1) y = f.neg(y);
        return Point{x, y, false};
      }
    }
  }
};

// All n in [lo, hi] with n*P = O, by baby steps j*P (0 < j <= m) and giant
// steps of 2m+1 matched on x-coordinates.
std::vector<u64> orders_in_interval(const ShortCurve& E, const Point& P, u64 lo, u64 hi) {
  std::vector<u64> out;
  const u64 width = hi - lo + 1;
  auto m = static_cast<u64>(std::ceil(std::sqrt(static_cast<double>(width) / 2.0)));
  m = std::max<u64>(m, 1);

  auto multiples_of = [&](u64 ord) {
    for (u64 n = (lo + ord - 1) / ord * ord; n <= hi; n += ord) out.push_back(n);
    return out;
  };

  std::vector<Jac> steps(m + 1);  // steps[j] = (j + 1) P
  Jac acc;
  for (u64 j = 0; j <= m; ++j) steps[j] = acc = E.add(acc, P);
  const auto multiples = E.affine(steps);

  struct Baby {
    u64 x, y, j;
  };
  std::vector<Baby> baby;
  baby.reserve(m);
  for (u64 j = 1; j <= m; ++j) {
    const Point& jP = multiples[j - 1];
    if (jP.inf) return multiples_of(j);
    if (jP.y == 0) return multiples_of(2 * j);  // j P = -j P
    baby.push_back({jP.x, jP.y, j});
  }
  std::sort(baby.begin(), baby.end(), [](const Baby& l, const Baby& r) { return l.x < r.x; });
  for (std::size_t i = 1; i < baby.size(); ++i) {
    // j P = -j' P: the order is exactly j + j'.
    if (baby[i].x == baby[i - 1].x) return multiples_of(baby[i].j + baby[i - 1].j);
  }

  // (2m + 1) P = (m + 1) P + m P
  const Point giant = E.add(multiples[m], multiples[m - 1]);
  std::vector<Jac> giants;
  Jac R{};
  {
    const Point start = E.mul(lo + m, P);
    R = start.inf ? Jac{} : Jac{start.x, start.y, 1};
  }
  for (u64 base = lo + m; base <= hi + m; base += 2 * m + 1) {
    giants.push_back(R);
    R = E.add(R, giant);
  }
  const auto gpts = E.affine(giants);
  u64 base = lo + m;
  for (const Point& G : gpts) {
    if (G.inf) {
      if (base <= hi) out.push_back(base);
    } else {
      auto it = std::lower_bound(baby.begin(), baby.end(), G.x,
                                 [](const Baby& b, u64 x) { return b.x < x; });
      if (it != baby.end() && it->x == G.x) {
        const u64 n = (it->y == G.y) ? base - it->j : base + it->j;
        if (n >= lo && n <= hi) out.push_back(n);
      }
    }
    base += 2 * m + 1;
  }
  std::sort(out.begin(), out.end());
  return out;
}

u64 isqrt(u64 n) {
  auto r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

void check_hasse(int a, std::uint32_t p) {
  const auto w = static_cast<std::int64_t>(isqrt(4 * u64{p}));
  if (std::abs(static_cast<std::int64_t>(a)) > w) {
    throw NumericalFailure("a_" + std::to_string(p) + " = " + std::to_string(a) +
                           " violates the Hasse bound");
  }
}

// Small deterministic bit generator for point sampling.
struct SplitMix64 {
  using result_type = std::uint64_t;
  u64 state;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    u64 z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

u64 splitmix(u64 x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require_good(const ReducedCurve& red) {
  if (!red.good()) throw BadReduction("bad reduction at p = " + std::to_string(red.p));
}

}  // namespace

std::uint64_t model_hash(const Weierstrass& w) noexcept {
  u64 h = 0x6d75726d7572ULL;
  for (std::int64_t c : {w.a1, w.a2, w.a3, w.a4, w.a6}) h = splitmix(h ^ static_cast<u64>(c));
  return h;
}

bool singular_mod(const Weierstrass& w, std::uint32_t p) {
  const Fp f{p};
  const u64 a1 = mod_signed(w.a1, p), a2 = mod_signed(w.a2, p), a3 = mod_signed(w.a3, p),
            a4 = mod_signed(w.a4, p), a6 = mod_signed(w.a6, p);
  const u64 b2 = f.add(f.mul(a1, a1), f.mul(4, a2));
  const u64 b4 = f.add(f.mul(2, a4), f.mul(a1, a3));
  const u64 b6 = f.add(f.mul(a3, a3), f.mul(4, a6));
  const u64 b8 = f.sub(f.add(f.add(f.mul(f.mul(a1, a1), a6), f.mul(f.mul(4, a2), a6)),
                             f.mul(f.mul(a2, a3), a3)),
                       f.add(f.mul(f.mul(a1, a3), a4), f.mul(a4, a4)));
  u64 d = f.neg(f.mul(f.mul(b2, b2), b8));
  d = f.sub(d, f.mul(8, f.mul(f.mul(b4, b4), b4)));
  d = f.sub(d, f.mul(27, f.mul(b6, b6)));
  d = f.add(d, f.mul(9, f.mul(f.mul(b2, b4), b6)));
  return d == 0;
}

ReducedCurve reduce_model(const Weierstrass& w, std::uint32_t p, Reduction status,
                          std::uint64_t seed) {
  ReducedCurve red;
  red.p = p;
  red.status = status;
  red.seed = seed;
  const Fp f{p};
  red.long_form = {static_cast<std::uint32_t>(mod_signed(w.a1, p)),
                   static_cast<std::uint32_t>(mod_signed(w.a2, p)),
                   static_cast<std::uint32_t>(mod_signed(w.a3, p)),
                   static_cast<std::uint32_t>(mod_signed(w.a4, p)),
                   static_cast<std::uint32_t>(mod_signed(w.a6, p))};
  if (p > 3) {
    const u64 a1 = red.long_form[0], a2 = red.long_form[1], a3 = red.long_form[2],
              a4 = red.long_form[3], a6 = red.long_form[4];
    const u64 b2 = f.add(f.mul(a1, a1), f.mul(4, a2));
    const u64 b4 = f.add(f.mul(2, a4), f.mul(a1, a3));
    const u64 b6 = f.add(f.mul(a3, a3), f.mul(4, a6));
    const u64 c4 = f.sub(f.mul(b2, b2), f.mul(24, b4));
    const u64 c6 = f.sub(f.add(f.neg(f.mul(f.mul(b2, b2), b2)), f.mul(36, f.mul(b2, b4))),
                         f.mul(216, b6));
    // y^2 = x^3 - 27 c4 x - 54 c6 is isomorphic to the long form when p > 3.
    red.a = static_cast<std::uint32_t>(f.neg(f.mul(27, c4)));
    red.b = static_cast<std::uint32_t>(f.neg(f.mul(54, c6)));
  }
  return red;
}

ReducedCurve reduce_curve(const CurveRecord& rec, std::uint32_t p) {
  const Reduction status = rec.conductor % p == 0 ? Reduction::bad : Reduction::good;
  if (status == Reduction::good && singular_mod(rec.model, p)) {
    throw ValidationError((rec.label.empty() ? std::string("curve") : rec.label) +
                          ": model is singular mod " + std::to_string(p) +
                          " although p does not divide the conductor (not minimal?)");
  }
  return reduce_model(rec.model, p, status, model_hash(rec.model));
}

ReducedCurve quadratic_twist(const ReducedCurve& red, std::uint32_t d) {
  if (!red.short_form()) throw InvalidArgument("quadratic_twist needs p > 3");
  const Fp f{red.p};
  ReducedCurve t = red;
  const u64 d2 = f.mul(d, d);
  t.a = static_cast<std::uint32_t>(f.mul(d2, red.a));
  t.b = static_cast<std::uint32_t>(f.mul(f.mul(d2, d), red.b));
  t.long_form = {0, 0, 0, t.a, t.b};
  return t;
}

QuadraticCharacter::QuadraticCharacter(std::uint32_t p) : p_(p), table_(p, -1) {
  if (p < 3) throw InvalidArgument("quadratic character needs an odd prime");
  table_[0] = 0;
  for (u64 r = 1; r <= p / 2; ++r) table_[r * r % p] = 1;
}

int ap_naive(const ReducedCurve& red) {
  require_good(red);
  if (!red.short_form()) return ap_naive(red, QuadraticCharacter(3));
  return ap_naive(red, QuadraticCharacter(red.p));
}

int ap_naive(const ReducedCurve& red, const QuadraticCharacter& chi) {
  require_good(red);
  const u64 p = red.p;
  if (!red.short_form()) {
    const Fp f{p};
    const auto& c = red.long_form;
    u64 points = 1;  // point at infinity
    for (u64 x = 0; x < p; ++x) {
      const u64 rhs = f.add(f.mul(f.add(f.mul(f.add(x, c[1]), x), c[3]), x), c[4]);
      for (u64 y = 0; y < p; ++y) {
        const u64 lhs = f.add(f.mul(y, y), f.mul(y, f.add(f.mul(c[0], x), c[2])));
        if (lhs == rhs) ++points;
      }
    }
    const int a = static_cast<int>(static_cast<std::int64_t>(p) + 1 - static_cast<std::int64_t>(points));
    check_hasse(a, red.p);
    return a;
  }
  if (chi.prime() != red.p) throw InvalidArgument("character table built for another prime");
  int sum = 0;
  const u64 a = red.a, b = red.b;
  for (u64 x = 0; x < p; ++x) {
    const u64 v = ((x * x % p + a) * x + b) % p;
    sum += chi(v);
  }
  check_hasse(-sum, red.p);
  return -sum;
}

int ap_bsgs(const ReducedCurve& red) {
  require_good(red);
  if (!red.short_form()) throw InvalidArgument("ap_bsgs needs p > 3");
  const u64 p = red.p;
  const Fp f{p};
  const u64 w = isqrt(4 * p);
  const u64 lo = p + 1 - w, hi = p + 1 + w;

  u64 nonresidue = 2;
  while (f.legendre(nonresidue) != -1) ++nonresidue;
  const ShortCurve curve{f, red.a, red.b};
  const ShortCurve twist{f, f.mul(f.mul(nonresidue, nonresidue), red.a),
                         f.mul(f.pow(nonresidue, 3), red.b)};

  SplitMix64 rng{splitmix(red.seed ^ splitmix(p))};
  // Candidates for #E(F_p); empty until the first point has been used.
  std::vector<u64> candidates;
  bool constrained = false;
  constexpr int kMaxPoints = 64;
  for (int iter = 0; iter < kMaxPoints && !(constrained && candidates.size() <= 1); ++iter) {
    const bool on_twist = iter % 2 == 1;
    const ShortCurve& E = on_twist ? twist : curve;
    auto hits = orders_in_interval(E, E.random_point(rng), lo, hi);
    if (on_twist) {
      // #E + #E' = 2p + 2, and the Hasse interval is symmetric about p + 1.
      for (auto& n : hits) n = 2 * p + 2 - n;
      std::reverse(hits.begin(), hits.end());
    }
    if (!constrained) {
      candidates = std::move(hits);
      constrained = true;
    } else {
      std::vector<u64> both;
      std::set_intersection(candidates.begin(), candidates.end(), hits.begin(), hits.end(),
                            std::back_inserter(both));
      candidates = std::move(both);
    }
  }
  if (candidates.size() != 1) {
    throw NumericalFailure("ap_bsgs: could not determine #E(F_p) at p = " + std::to_string(p) +
                           " (" + std::to_string(candidates.size()) + " candidates left)");
  }
  const u64 order = candidates.front();
  const int a = static_cast<int>(static_cast<std::int64_t>(p + 1) - static_cast<std::int64_t>(order));
  check_hasse(a, red.p);
  return a;
}

int ap(const ReducedCurve& red) {
  return red.p <= kSmallPrimeCutoff ? ap_naive(red) : ap_bsgs(red);
}

ApMatrix ap_matrix(std::span<const CurveRecord> recs, const PrimeTable& table, unsigned workers) {
  ApMatrix m;
  m.primes.assign(table.primes().begin(), table.primes().end());
  m.curves = recs.size();
  m.values.assign(m.curves * m.primes.size(), ApMatrix::kBadPrime);
  const std::size_t np = m.primes.size();

  std::vector<std::uint64_t> seeds;
  seeds.reserve(recs.size());
  for (const auto& r : recs) seeds.push_back(model_hash(r.model));

  // Prime-major: the character table for small p is built once and shared
  // by every curve. Each (curve, prime) cell has exactly one writer.
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < np; k = next++) {
      const std::uint32_t p = m.primes[k];
      std::optional<QuadraticCharacter> chi;
      if (p > 3 && p <= kSmallPrimeCutoff) chi.emplace(p);
      for (std::size_t c = 0; c < recs.size(); ++c) {
        const auto& rec = recs[c];
        if (rec.conductor % p == 0) continue;
        if (singular_mod(rec.model, p)) {
          throw ValidationError((rec.label.empty() ? std::string("curve") : rec.label) +
                                ": model is singular mod " + std::to_string(p) +
                                " although p does not divide the conductor");
        }
        const ReducedCurve red = reduce_model(rec.model, p, Reduction::good, seeds[c]);
        int a;
        if (p <= 3) a = ap_naive(red);
        else if (chi) a = ap_naive(red, *chi);
        else a = ap_bsgs(red);
        m.values[c * np + k] = a;
      }
    }
  };

  workers = std::max(1u, workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        try {
          work();
        } catch (...) {
          errors[t] = std::current_exception();
          next = np;
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return m;
}

std::vector<std::vector<ApValue>> ap_batch(std::span<const CurveRecord> recs,
                                           const PrimeTable& table, unsigned workers) {
  const ApMatrix m = ap_matrix(recs, table, workers);
  std::vector<std::vector<ApValue>> out(m.curves);
  for (std::size_t c = 0; c < m.curves; ++c) {
    const auto row = m.row(c);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] != ApMatrix::kBadPrime) out[c].push_back({m.primes[k], row[k]});
    }
  }
  return out;
}

}  // namespace murmur
