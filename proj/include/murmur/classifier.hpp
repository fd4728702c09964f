#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>

namespace murmur {

struct Score {
  double s = 0.0;
  int rank = 0;  // 0 or 1
};

/// Outcome of thresholding S(B): predict rank 0 iff S > cutoff.
///   tp0: rank 0 predicted 0    fp1: rank 0 predicted 1
///   tp1: rank 1 predicted 1    fp0: rank 1 predicted 0
struct ClassifierReport {
  double B = std::numeric_limits<double>::quiet_NaN();
  double cutoff = 0.0;
  double accuracy = 0.0;
  std::size_t tp0 = 0, fp0 = 0, tp1 = 0, fp1 = 0;
  std::size_t n0 = 0, n1 = 0;
};

/// Throws InvalidArgument on empty input or rank labels outside {0,1}.
ClassifierReport evaluate_cutoff(std::span<const Score> scores, double cutoff);

/// Threshold with the highest accuracy among midpoints of consecutive
/// distinct scores and two sentinels outside [min, max]; the smallest such
/// threshold wins ties. Throws DegenerateInput if only one class is present.
ClassifierReport optimal_cutoff(std::span<const Score> scores);

void write_report_csv_header(std::ostream& out);
void write_report_csv_row(std::ostream& out, const ClassifierReport& r);

}  // namespace murmur
