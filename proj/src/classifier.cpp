#include "murmur/classifier.hpp"

#include <algorithm>
#include <ostream>
#include <vector>

#include "murmur/csv.hpp"
#include "murmur/error.hpp"

namespace murmur {

namespace {

void check_labels(std::span<const Score> scores) {
  if (scores.empty()) throw InvalidArgument("classifier: no scores");
  for (const auto& sc : scores) {
    if (sc.rank != 0 && sc.rank != 1) throw InvalidArgument("classifier: rank must be 0 or 1");
  }
}

void finish(ClassifierReport& r) {
  r.accuracy = static_cast<double>(r.tp0 + r.tp1) / static_cast<double>(r.n0 + r.n1);
}

}  // namespace

ClassifierReport evaluate_cutoff(std::span<const Score> scores, double cutoff) {
  check_labels(scores);
  ClassifierReport r;
  r.cutoff = cutoff;
  for (const auto& sc : scores) {
    const bool predict0 = sc.s > cutoff;
    if (sc.rank == 0) {
      ++r.n0;
      ++(predict0 ? r.tp0 : r.fp1);
    } else {
      ++r.n1;
      ++(predict0 ? r.fp0 : r.tp1);
    }
  }
  finish(r);
  return r;
}

ClassifierReport optimal_cutoff(std::span<const Score> scores) {
  check_labels(scores);
  std::vector<Score> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(), [](const Score& a, const Score& b) { return a.s < b.s; });
  std::size_t n0 = 0, n1 = 0;
  for (const auto& sc : sorted) (sc.rank == 0 ? n0 : n1)++;
  if (n0 == 0 || n1 == 0) throw DegenerateInput("optimal_cutoff: both rank classes are required");

  // Cut after position i: the first i scores are predicted rank 1.
  // Only cuts between distinct values (and the two ends) are realizable.
  std::size_t below1 = 0, below0 = 0;
  std::size_t best_correct = n0;  // i = 0: everything predicted rank 0
  std::size_t best_i = 0;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    (sorted[i - 1].rank == 0 ? below0 : below1)++;
    if (i < sorted.size() && sorted[i].s == sorted[i - 1].s) continue;
    const std::size_t correct = below1 + (n0 - below0);
    if (correct > best_correct) {
      best_correct = correct;
      best_i = i;
    }
  }

  const double lo = sorted.front().s, hi = sorted.back().s;
  double cutoff;
  if (best_i == 0) {
    cutoff = lo - 1.0;
  } else if (best_i == sorted.size()) {
    cutoff = hi + 1.0;
  } else {
    const double a = sorted[best_i - 1].s, b = sorted[best_i].s;
    cutoff = a + (b - a) / 2.0;
    if (cutoff >= b) cutoff = a;  // adjacent doubles
  }
  return evaluate_cutoff(scores, cutoff);
}

void write_report_csv_header(std::ostream& out) {
  out << "B,cutoff,accuracy,tp0,fp0,tp1,fp1,n0,n1\n";
}

void write_report_csv_row(std::ostream& out, const ClassifierReport& r) {
  out << csv::num(r.B) << ',' << csv::num(r.cutoff) << ',' << csv::num(r.accuracy) << ',' << r.tp0
      << ',' << r.fp0 << ',' << r.tp1 << ',' << r.fp1 << ',' << r.n0 << ',' << r.n1 << '\n';
}

}  // namespace murmur
