#include "murmur/fx.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "murmur/compensated_sum.hpp"
#include "murmur/error.hpp"

namespace murmur {

namespace {

constexpr double kPi = std::numbers::pi;

void require_x(double x, double N, const PrimeTable& table) {
  if (!(x > 0.0 && x < 1.0)) throw InvalidArgument("f_exact: x must lie in (0, 1)");
  if (x * N < 3.0) throw InvalidArgument("f_exact: x N must be at least 3");
  if (x * N > static_cast<double>(table.limit())) {
    throw OutOfRange("f_exact: x N exceeds the prime table limit");
  }
}

}  // namespace

MainTermModel MainTermModel::make(double N, const MurmurationConstants& consts) {
  if (!(N >= 100.0)) throw InvalidArgument("main-term model needs N >= 100");
  return MainTermModel{N, consts};
}

double f_exact(double x, double N, const MurmurationConstants& k, const PrimeTable& table) {
  require_x(x, N, table);
  const double B = x * N;
  CompensatedSum acc;
  for (std::uint32_t q : table.primes()) {
    const double p = q;
    if (!(p < B)) break;
    acc.add(density_M(p / N, k) * std::log(p) / p);
  }
  return acc.value() / std::log(B);
}

std::vector<double> f_exact_sweep(std::span<const double> xs, double N,
                                  const MurmurationConstants& k, const PrimeTable& table) {
  if (!std::is_sorted(xs.begin(), xs.end())) throw InvalidArgument("f_exact_sweep: xs must be sorted");
  for (double x : xs) require_x(x, N, table);
  std::vector<double> out;
  out.reserve(xs.size());
  CompensatedSum acc;
  const auto primes = table.primes();
  std::size_t i = 0;
  for (double x : xs) {
    const double B = x * N;
    for (; i < primes.size() && static_cast<double>(primes[i]) < B; ++i) {
      const double p = primes[i];
      acc.add(density_M(p / N, k) * std::log(p) / p);
    }
    out.push_back(acc.value() / std::log(B));
  }
  return out;
}

double main_term_g1(double x, const MainTermModel& m) {
  if (!(x > 0.0 && x < 0.25)) throw InvalidArgument("main_term_g1: x must lie in (0, 1/4)");
  if (!(x * m.N > 1.0)) throw InvalidArgument("main_term_g1: x N must exceed 1");
  const auto& k = m.consts;
  const double num = 2.0 * k.C1 * std::sqrt(x) - k.C3 * x - k.C1 * std::sqrt(2.0) / std::sqrt(m.N);
  return num / std::log(x * m.N);
}

double main_term_g2(double x, const MainTermModel& m) {
  if (!(x >= 0.25 && x < 1.0)) throw InvalidArgument("main_term_g2: x must lie in [1/4, 1)");
  const auto& k = m.consts;
  const double s = std::sqrt(4.0 * x - 1.0);
  const double num = 2.0 * k.C1 * std::sqrt(x) + 2.0 * k.C2 * s - 2.0 * k.C2 * std::atan(s) -
                     k.C3 * x - k.C1 * std::sqrt(2.0) / std::sqrt(m.N);
  return num / std::log(x * m.N);
}

double main_term(double x, const MainTermModel& m) {
  return x < 0.25 ? main_term_g1(x, m) : main_term_g2(x, m);
}

namespace {

using Fn = std::function<double(double)>;

struct Peak {
  double x;
  double value;
};

Peak maximize(const Fn& g, double lo, double hi, double tol, const char* name) {
  constexpr int kScan = 400;
  std::vector<double> xs(kScan + 1), ys(kScan + 1);
  for (int i = 0; i <= kScan; ++i) {
    xs[i] = lo + (hi - lo) * i / kScan;
    ys[i] = g(xs[i]);
  }
  const auto peaks = interior_maxima(ys);
  if (peaks.empty()) {
    std::ostringstream msg;
    msg << name << ": no interior maximum on [" << lo << ", " << hi << "]; g(lo) = " << ys.front()
        << ", g(hi) = " << ys.back();
    throw NumericalFailure(msg.str());
  }
  const std::size_t best =
      *std::max_element(peaks.begin(), peaks.end(), [&](auto l, auto r) { return ys[l] < ys[r]; });
  double a = xs[best - 1], b = xs[best + 1];

  // Golden-section search for a maximum on [a, b].
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double gc = g(c), gd = g(d);
  while (b - a > std::max(1e-6, tol)) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(d);
    }
  }

  // Bisection on the sign of the central-difference derivative.
  const double step = std::cbrt(std::numeric_limits<double>::epsilon());
  auto slope = [&](double x) {
    const double h = step * x;
    return (g(x + h) - g(x - h)) / (2.0 * h);
  };
  double left = a, right = b;
  for (int widen = 0; widen < 20 && !(slope(left) > 0.0 && slope(right) < 0.0); ++widen) {
    const double w = right - left;
    left = std::max(xs[best - 1], left - w);
    right = std::min(xs[best + 1], right + w);
  }
  if (!(slope(left) > 0.0 && slope(right) < 0.0)) {
    std::ostringstream msg;
    msg << name << ": derivative does not change sign on [" << left << ", " << right << "]";
    throw NumericalFailure(msg.str());
  }
  while (right - left > tol) {
    const double mid = left + (right - left) / 2.0;
    if (mid <= left || mid >= right) break;
    (slope(mid) > 0.0 ? left : right) = mid;
  }
  const double x = left + (right - left) / 2.0;
  return {x, g(x)};
}

}  // namespace

double lambda_residual(double l, const MurmurationConstants& k) {
  const double s = std::sqrt(std::max(0.0, 4.0 * l - 1.0));
  return k.A * std::sqrt((4.0 * l - 1.0) * l) + 4.0 * k.B * l - kPi * l * s - k.B;
}

double solve_lambda(const MurmurationConstants& k, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("solve_lambda: tol must be positive");
  // F vanishes at 1/4, dips below zero, and has a second small root near
  // 0.26 before the sign change that gives the limit of x2(N). Bracket the
  // largest root in (1/4, 1] with a coarse scan, then bisect.
  constexpr int kScan = 1000;
  const double start = 0.25 + 1e-6, end = 1.0;
  double lo = 0.0, hi = 0.0, flo = 0.0;
  bool bracketed = false;
  double prev_x = start, prev_f = lambda_residual(start, k);
  for (int i = 1; i <= kScan; ++i) {
    const double x = start + (end - start) * i / kScan;
    const double f = lambda_residual(x, k);
    if ((prev_f > 0.0 && f <= 0.0) || (prev_f < 0.0 && f >= 0.0)) {
      lo = prev_x;
      hi = x;
      flo = prev_f;
      bracketed = true;
    }
    prev_x = x;
    prev_f = f;
  }
  if (!bracketed) {
    std::ostringstream msg;
    msg << "solve_lambda: no sign change on [" << start << ", " << end << "]";
    throw NumericalFailure(msg.str());
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = lo + (hi - lo) / 2.0;
    if (mid <= lo || mid >= hi) break;
    const double fm = lambda_residual(mid, k);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  const double root = std::abs(flo) <= std::abs(lambda_residual(hi, k)) ? lo : hi;
  if (std::abs(lambda_residual(root, k)) > tol) {
    throw NumericalFailure("solve_lambda: residual above tolerance at lambda = " +
                           std::to_string(root));
  }
  return root;
}

LimitConstants limit_constants(const MurmurationConstants& k) {
  const double a2 = k.A * k.A, b2 = k.B * k.B, pi2 = kPi * kPi;
  const double s = a2 + 4.0 * b2;
  LimitConstants out;
  out.first_limit = a2 / pi2;
  out.second_bound = (s + std::sqrt(s * s - 2.0 * pi2 * b2)) / pi2;
  out.lambda = solve_lambda(k);
  return out;
}

MaximaReport local_maxima(const MainTermModel& m, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("local_maxima: tol must be positive");
  const auto lim = limit_constants(m.consts);
  MaximaReport r;
  r.tol = tol;
  r.first_bound = lim.first_limit;
  r.second_bound = lim.second_bound;
  r.lambda = lim.lambda;

  const double lo1 = std::max(4.0 / m.N, 1e-4);
  const auto p1 = maximize([&](double x) { return main_term_g1(x, m); }, lo1,
                           0.25 - 1e-9, tol, "first maximum");
  const auto p2 = maximize([&](double x) { return main_term_g2(x, m); }, 0.25,
                           1.0 - 1e-9, tol, "second maximum");
  r.x1 = p1.x;
  r.g1_value = p1.value;
  r.x2 = p2.x;
  r.g2_value = p2.value;
  return r;
}

std::vector<std::size_t> interior_maxima(std::span<const double> ys) {
  std::vector<std::size_t> out;
  const std::size_t n = ys.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(ys[i] > ys[i - 1])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && ys[j + 1] == ys[i]) ++j;
    if (j + 1 < n && ys[j + 1] < ys[i]) out.push_back(i + (j - i) / 2);
    i = j + 1;
  }
  return out;
}

std::vector<double> empirical_maxima(const FamilyAverages& fam, double n_ref,
                                     std::size_t window) {
  if (!(n_ref > 0.0)) throw InvalidArgument("empirical_maxima: n_ref must be positive");
  if (window == 0 || window % 2 == 0) throw InvalidArgument("empirical_maxima: window must be odd");
  const FamilyCurve& c0 = fam.at(0);
  const FamilyCurve& c1 = fam.at(1);
  const BGrid& grid = c0.grid;
  if (grid.size() == 0 || grid[0] > 0.01 * n_ref || grid.back() < 2.0 * n_ref) {
    throw OutOfRange("empirical_maxima: grid must cover [0.01 n_ref, 2 n_ref]");
  }
  const std::size_t n = grid.size();
  std::vector<double> diff(n);
  for (std::size_t k = 0; k < n; ++k) diff[k] = c0.mean[k] - c1.mean[k];

  const std::size_t half = window / 2;
  if (n < window) return {};
  std::vector<double> smooth;
  for (std::size_t k = half; k + half < n; ++k) {
    double s = 0.0;
    for (std::size_t j = k - half; j <= k + half; ++j) s += diff[j];
    smooth.push_back(s / static_cast<double>(window));
  }
  std::vector<double> out;
  for (std::size_t idx : interior_maxima(smooth)) {
    const double x = grid[idx + half] / n_ref;
    if (x >= 0.01 && x <= 2.0) out.push_back(x);
  }
  return out;
}

std::vector<double> figure3_grid() {
  constexpr int kPoints = 2000;
  const double lo = 0.005, hi = 1.0;
  std::vector<double> xs(kPoints);
  for (int i = 0; i < kPoints; ++i) xs[i] = lo + (hi - lo) * (i + 0.5) / kPoints;
  return xs;
}

}  // namespace murmur
