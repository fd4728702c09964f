#pragma once

#include <cstdint>

namespace murmur {

/// Euler-product constants of the weight-2 murmuration density
///   M(y) = C1 sqrt(y) + C2 sum_{1 <= r <= 2 sqrt(y)} c(r) sqrt(4y - r^2) - C3 y
/// with C1 = D2 A, C2 = D2 B, C3 = D2 pi.
struct MurmurationConstants {
  double A = 0.0;
  double B = 0.0;
  double D2 = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  std::uint64_t truncation = 0;   // largest prime bound P used
  bool include_two = false;       // whether p = 2 enters the products
  /// Bound on |log(product / truncated product)|, shared by A, B and D2.
  double tail_log_bound = 0.0;
  /// Relative error bound implied for each of A, B, D2.
  double relative_error_bound = 0.0;
};

struct EulerOptions {
  /// The printed constants (A^2/pi^2 = 0.14261..., the 0.76881... bound and
  /// the tabulated main-term maxima) correspond to products over odd primes.
  bool include_two = false;
  /// Requested relative accuracy; 0 disables the check.
  double tolerance = 0.0;
};

/// Products over primes p <= P (P >= 100), accumulated in increasing p.
/// Throws InvalidArgument for P < 100 and ToleranceError if the tail bound
/// exceeds options.tolerance.
MurmurationConstants euler_constants(std::uint64_t P, EulerOptions options = {});

/// c(r) = prod_{p | r} (1 + p^2 / (p^4 - 2p^2 - p + 1)); c(1) = 1.
double c_factor(std::uint64_t r);

/// M(y) for y >= 0. Throws InvalidArgument for negative y.
double density_M(double y, const MurmurationConstants& k);

}  // namespace murmur
