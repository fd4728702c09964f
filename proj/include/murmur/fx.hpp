#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "murmur/density.hpp"
#include "murmur/nagao.hpp"
#include "murmur/primes.hpp"

namespace murmur {

/// Conductor scale N (>= 100) together with the density constants.
struct MainTermModel {
  double N = 0.0;
  MurmurationConstants consts;

  /// Throws InvalidArgument for N < 100.
  static MainTermModel make(double N, const MurmurationConstants& consts);
};

/// f(x) = (1/log(xN)) sum_{p < xN} M(p/N) log p / p.
/// Requires 0 < x < 1 and 3 <= xN <= table.limit() (OutOfRange otherwise).
double f_exact(double x, double N, const MurmurationConstants& k, const PrimeTable& table);

/// f_exact at many points with one pass over the primes. xs must be sorted.
std::vector<double> f_exact_sweep(std::span<const double> xs, double N,
                                  const MurmurationConstants& k, const PrimeTable& table);

/// Main term of f on (0, 1/4):
///   (2 C1 sqrt(x) - C3 x - C1 sqrt(2/N)) / log(xN).
double main_term_g1(double x, const MainTermModel& m);
/// Main term of f on [1/4, 1): adds 2 C2 (sqrt(4x-1) - atan(sqrt(4x-1))).
double main_term_g2(double x, const MainTermModel& m);
/// g1 below 1/4, g2 from 1/4 on.
double main_term(double x, const MainTermModel& m);

struct MaximaReport {
  double x1 = 0.0, x2 = 0.0;
  double g1_value = 0.0, g2_value = 0.0;
  double first_bound = 0.0;   // A^2 / pi^2
  double second_bound = 0.0;  // (A^2 + 4B^2 + sqrt((A^2 + 4B^2)^2 - 2 pi^2 B^2)) / pi^2
  double lambda = 0.0;
  double tol = 0.0;
};

/// Locates the maxima of g1 on (0, 1/4) and g2 on [1/4, 1): a coarse scan
/// brackets each peak, golden-section search narrows it and bisection on
/// the sign of a central-difference derivative refines it to `tol`.
/// Throws NumericalFailure if a peak cannot be bracketed.
MaximaReport local_maxima(const MainTermModel& m, double tol = 1e-8);

/// F(l) = A sqrt((4l - 1) l) + 4 B l - pi l sqrt(4l - 1) - B.
double lambda_residual(double l, const MurmurationConstants& k);

/// Largest root of F in (1/4, 1]. F also vanishes at 1/4 and near 0.26;
/// neither is the limit of x2(N). Throws NumericalFailure if no sign change
/// is found or |F| > tol at the end.
double solve_lambda(const MurmurationConstants& k, double tol = 1e-12);

struct LimitConstants {
  double first_limit = 0.0;   // A^2 / pi^2, the limit of x1(N)
  double second_bound = 0.0;  // upper bound for the second maximum
  double lambda = 0.0;        // limit of x2(N)
};

LimitConstants limit_constants(const MurmurationConstants& k);

/// Indices of interior local maxima of a sampled series. A plateau counts
/// once, at its middle, when the series rises into it and falls after it.
std::vector<std::size_t> interior_maxima(std::span<const double> ys);

/// Local maxima of the rank-0 minus rank-1 mean curve after a centered
/// moving average over `window` (odd) grid points, reported as B / n_ref
/// and restricted to [0.01, 2].
/// The grid must cover [0.01 n_ref, 2 n_ref] (OutOfRange otherwise).
std::vector<double> empirical_maxima(const FamilyAverages& fam, double n_ref,
                                     std::size_t window = 5);

/// 2000 uniform points on (0.005, 1) used for the f(x) plot data.
std::vector<double> figure3_grid();

}  // namespace murmur
