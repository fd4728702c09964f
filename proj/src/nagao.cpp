#include "murmur/nagao.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "murmur/compensated_sum.hpp"
#include "murmur/csv.hpp"
#include "murmur/error.hpp"

namespace murmur {

BGrid BGrid::from_values(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("B grid must not be empty");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] >= 3.0)) throw InvalidArgument("B grid values must be >= 3");
    if (k > 0 && !(values[k] > values[k - 1])) {
      throw InvalidArgument("B grid must be strictly increasing");
    }
  }
  BGrid g;
  g.values_ = std::move(values);
  return g;
}

BGrid BGrid::geometric(double start, double ratio, double cap) {
  if (!(ratio > 1.0)) throw InvalidArgument("geometric grid ratio must exceed 1");
  if (!(start >= 3.0) || start > cap) throw InvalidArgument("geometric grid needs 3 <= start <= cap");
  std::vector<double> v;
  for (int k = 0;; ++k) {
    const double b = start * std::pow(ratio, k);
    if (b > cap) break;
    v.push_back(b);
  }
  return from_values(std::move(v));
}

SBTrace sb_trace_from_row(std::string curve_id, std::span<const std::int32_t> row,
                          std::span<const std::uint32_t> primes, const BGrid& grid) {
  SBTrace t{std::move(curve_id), grid, {}, {}};
  t.raw.reserve(grid.size());
  t.values.reserve(grid.size());
  CompensatedSum acc;
  std::size_t k = 0;
  for (double B : grid.values()) {
    while (k < primes.size() && static_cast<double>(primes[k]) < B) {
      if (row[k] != ApMatrix::kBadPrime) {
        const double p = primes[k];
        acc.add(row[k] * std::log(p) / p);
      }
      ++k;
    }
    const double raw = acc.value();
    t.raw.push_back(raw);
    t.values.push_back(raw / std::log(B));
  }
  return t;
}

namespace {

void require_coverage(const BGrid& grid, const PrimeTable& table) {
  if (grid.size() == 0) throw InvalidArgument("empty B grid");
  if (grid.back() > static_cast<double>(table.limit())) {
    throw OutOfRange("B grid exceeds the prime table limit");
  }
}

}  // namespace

SBTrace sb_trace(const CurveRecord& rec, const BGrid& grid, const PrimeTable& table) {
  require_coverage(grid, table);
  const std::size_t np = table.count_below(grid.back());
  const auto primes = table.primes().first(np);
  std::vector<std::int32_t> row(np, ApMatrix::kBadPrime);
  for (std::size_t k = 0; k < np; ++k) {
    const auto red = reduce_curve(rec, primes[k]);
    if (red.good()) row[k] = ap(red);
  }
  return sb_trace_from_row(rec.label, row, primes, grid);
}

std::vector<SBTrace> sb_traces(std::span<const CurveRecord> recs, const BGrid& grid,
                               const PrimeTable& table, unsigned workers) {
  require_coverage(grid, table);
  const auto sub = PrimeTable::sieve(std::max<std::uint64_t>(
      2, static_cast<std::uint64_t>(std::ceil(grid.back()))));
  const ApMatrix aps = ap_matrix(recs, sub, workers);
  std::vector<SBTrace> out;
  out.reserve(recs.size());
  for (std::size_t c = 0; c < recs.size(); ++c) {
    out.push_back(sb_trace_from_row(recs[c].label, aps.row(c), aps.primes, grid));
  }
  return out;
}

const FamilyCurve& FamilyAverages::at(int rank) const {
  const auto& slot = rank == 0 ? rank0 : rank1;
  if ((rank != 0 && rank != 1) || !slot) {
    throw EmptyClass("no curves of rank " + std::to_string(rank));
  }
  return *slot;
}

namespace {

FamilyCurve average_class(std::span<const SBTrace> traces, std::span<const int> ranks, int rank,
                          const BGrid& grid) {
  FamilyCurve fc;
  fc.rank = rank;
  fc.grid = grid;
  const std::size_t K = grid.size();
  std::vector<CompensatedSum> sums(K);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (ranks[i] != rank) continue;
    ++fc.n;
    for (std::size_t k = 0; k < K; ++k) sums[k].add(traces[i].values[k]);
  }
  fc.mean.resize(K);
  fc.half_width.assign(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) fc.mean[k] = sums[k].value() / static_cast<double>(fc.n);
  if (fc.n < 2) return fc;
  std::vector<CompensatedSum> sq(K);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (ranks[i] != rank) continue;
    for (std::size_t k = 0; k < K; ++k) {
      const double d = traces[i].values[k] - fc.mean[k];
      sq[k].add(d * d);
    }
  }
  const double n = static_cast<double>(fc.n);
  for (std::size_t k = 0; k < K; ++k) {
    const double s = std::sqrt(std::max(0.0, sq[k].value()) / (n - 1.0));
    fc.half_width[k] = kZ90 * s / std::sqrt(n);
  }
  return fc;
}

}  // namespace

FamilyAverages family_average(std::span<const SBTrace> traces, std::span<const int> ranks) {
  if (traces.empty()) throw EmptyClass("family_average: no traces");
  if (ranks.size() != traces.size()) throw InvalidArgument("family_average: one rank per trace");
  const BGrid& grid = traces.front().grid;
  std::size_t n0 = 0, n1 = 0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (!(traces[i].grid == grid)) throw InvalidArgument("family_average: traces use different grids");
    if (ranks[i] == 0) ++n0;
    else if (ranks[i] == 1) ++n1;
    else throw InvalidArgument("family_average: rank labels must be 0 or 1");
  }
  FamilyAverages fam;
  if (n0 > 0) fam.rank0 = average_class(traces, ranks, 0, grid);
  if (n1 > 0) fam.rank1 = average_class(traces, ranks, 1, grid);
  return fam;
}

std::vector<ProfileRow> ap_average_profile(std::span<const CurveRecord> recs, const ApMatrix& aps) {
  if (recs.empty()) throw EmptyClass("ap_average_profile: no curves");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<ProfileRow> out;
  out.reserve(aps.primes.size());
  for (std::size_t k = 0; k < aps.primes.size(); ++k) {
    std::int64_t s0 = 0, s1 = 0;
    ProfileRow row{aps.primes[k], nan, nan, 0, 0};
    for (std::size_t c = 0; c < recs.size(); ++c) {
      const std::int32_t a = aps.values[c * aps.primes.size() + k];
      if (a == ApMatrix::kBadPrime) continue;
      if (recs[c].rank == 0) {
        s0 += a;
        ++row.n0;
      } else {
        s1 += a;
        ++row.n1;
      }
    }
    if (row.n0) row.mean0 = static_cast<double>(s0) / static_cast<double>(row.n0);
    if (row.n1) row.mean1 = static_cast<double>(s1) / static_cast<double>(row.n1);
    out.push_back(row);
  }
  return out;
}

std::vector<ProfileRow> ap_average_profile(std::span<const CurveRecord> recs,
                                           const PrimeTable& table, unsigned workers) {
  return ap_average_profile(recs, ap_matrix(recs, table, workers));
}

void write_figure1_csv(std::ostream& out, const FamilyAverages& fam) {
  const FamilyCurve* any = fam.rank0 ? &*fam.rank0 : fam.rank1 ? &*fam.rank1 : nullptr;
  if (!any) throw EmptyClass("write_figure1_csv: no data");
  out << "B,mean_rank0,ci0,mean_rank1,ci1\n";
  for (std::size_t k = 0; k < any->grid.size(); ++k) {
    out << csv::num(any->grid[k]);
    for (const auto* fc : {fam.rank0 ? &*fam.rank0 : nullptr, fam.rank1 ? &*fam.rank1 : nullptr}) {
      if (fc) out << ',' << csv::num(fc->mean[k]) << ',' << csv::num(fc->half_width[k]);
      else out << ",,";
    }
    out << '\n';
  }
}

FamilyAverages read_figure1_csv(std::istream& in) {
  const auto table = csv::read_table(in, {"B", "mean_rank0", "ci0", "mean_rank1", "ci1"});
  std::vector<double> grid;
  FamilyCurve c0, c1;
  c0.rank = 0;
  c1.rank = 1;
  bool has0 = false, has1 = false;
  for (const auto& row : table) {
    grid.push_back(*row[0]);
    if (row[1]) {
      has0 = true;
      c0.mean.push_back(*row[1]);
      c0.half_width.push_back(row[2].value_or(0.0));
    }
    if (row[3]) {
      has1 = true;
      c1.mean.push_back(*row[3]);
      c1.half_width.push_back(row[4].value_or(0.0));
    }
  }
  FamilyAverages fam;
  const BGrid g = BGrid::from_values(std::move(grid));
  if (has0) {
    c0.grid = g;
    fam.rank0 = std::move(c0);
  }
  if (has1) {
    c1.grid = g;
    fam.rank1 = std::move(c1);
  }
  return fam;
}

void write_figure2_csv(std::ostream& out, std::span<const ProfileRow> rows) {
  out << "p,avg_rank0,avg_rank1\n";
  for (const auto& r : rows) {
    out << r.p << ',' << (r.n0 ? csv::num(r.mean0) : std::string()) << ','
        << (r.n1 ? csv::num(r.mean1) : std::string()) << '\n';
  }
}

std::vector<ProfileRow> read_figure2_csv(std::istream& in) {
  const auto table = csv::read_table(in, {"p", "avg_rank0", "avg_rank1"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<ProfileRow> out;
  for (const auto& row : table) {
    ProfileRow r;
    r.p = static_cast<std::uint32_t>(*row[0]);
    r.mean0 = row[1].value_or(nan);
    r.mean1 = row[2].value_or(nan);
    // Sample counts are not part of the file; mark presence only.
    r.n0 = row[1] ? 1 : 0;
    r.n1 = row[2] ? 1 : 0;
    out.push_back(r);
  }
  return out;
}

}  // namespace murmur
