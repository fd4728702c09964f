#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "murmur/ap_engine.hpp"
#include "murmur/dataset.hpp"
#include "murmur/primes.hpp"

namespace murmur {

/// Strictly increasing sample points B_k >= 3 at which S(B) is evaluated.
class BGrid {
 public:
  BGrid() = default;
  /// Throws InvalidArgument unless values are strictly increasing and >= 3.
  static BGrid from_values(std::vector<double> values);
  /// start * ratio^k for every k with value <= cap.
  static BGrid geometric(double start, double ratio, double cap);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double back() const { return values_.back(); }
  double operator[](std::size_t k) const { return values_[k]; }
  bool operator==(const BGrid&) const = default;

 private:
  std::vector<double> values_;
};

/// Mestre-Nagao sum S(B) = (1/log B) sum_{p < B, p good} a_p log p / p on a
/// grid. raw holds the unnormalized running sum.
struct SBTrace {
  std::string curve_id;
  BGrid grid;
  std::vector<double> raw;
  std::vector<double> values;
};

/// Computes a_p as needed. Throws OutOfRange if the grid exceeds the table.
SBTrace sb_trace(const CurveRecord& rec, const BGrid& grid, const PrimeTable& table);

/// Builds a trace from one precomputed row of an ApMatrix.
SBTrace sb_trace_from_row(std::string curve_id, std::span<const std::int32_t> row,
                          std::span<const std::uint32_t> primes, const BGrid& grid);

/// Traces for many curves through a single ap_matrix pass.
std::vector<SBTrace> sb_traces(std::span<const CurveRecord> recs, const BGrid& grid,
                               const PrimeTable& table, unsigned workers = 1);

/// Per grid point mean of S(B) over one rank class, with the half-width of
/// a normal-approximation 90% confidence interval (1.645 s / sqrt(n)).
struct FamilyCurve {
  int rank = 0;
  BGrid grid;
  std::vector<double> mean;
  std::vector<double> half_width;
  std::size_t n = 0;
};

inline constexpr double kZ90 = 1.645;

struct FamilyAverages {
  std::optional<FamilyCurve> rank0;
  std::optional<FamilyCurve> rank1;

  /// Throws EmptyClass if the class has no curves.
  const FamilyCurve& at(int rank) const;
};

/// Groups traces by rank label and averages each class. Classes without
/// curves are left empty; throws EmptyClass if `traces` is empty and
/// InvalidArgument if the traces do not share one grid.
FamilyAverages family_average(std::span<const SBTrace> traces, std::span<const int> ranks);

/// Mean a_p at one prime for each rank class, over curves with good
/// reduction there. NaN where a class has no such curve.
struct ProfileRow {
  std::uint32_t p = 0;
  double mean0 = 0.0, mean1 = 0.0;
  std::size_t n0 = 0, n1 = 0;
};

std::vector<ProfileRow> ap_average_profile(std::span<const CurveRecord> recs,
                                           const PrimeTable& table, unsigned workers = 1);
std::vector<ProfileRow> ap_average_profile(std::span<const CurveRecord> recs, const ApMatrix& aps);

// CSV emission: B,mean_rank0,ci0,mean_rank1,ci1 and p,avg_rank0,avg_rank1.
// A class with no data is written as empty fields.
void write_figure1_csv(std::ostream& out, const FamilyAverages& fam);
FamilyAverages read_figure1_csv(std::istream& in);
void write_figure2_csv(std::ostream& out, std::span<const ProfileRow> rows);
std::vector<ProfileRow> read_figure2_csv(std::istream& in);

}  // namespace murmur
