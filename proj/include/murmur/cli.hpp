#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "murmur/classifier.hpp"
#include "murmur/dataset.hpp"
#include "murmur/fx.hpp"
#include "murmur/nagao.hpp"

namespace murmur::cli {

/// Geometric B grid start * ratio^k, written GEOM:START:RATIO.
struct GridSpec {
  double start = 3.0;
  double ratio = 1.05;
};

GridSpec parse_grid_spec(const std::string& text);
std::pair<std::uint64_t, std::uint64_t> parse_window(const std::string& text);
Weierstrass parse_coefficients(const std::string& text);

struct RunConfig {
  std::string dataset;
  std::uint64_t window_lo = 0;
  std::uint64_t window_hi = UINT64_MAX;
  std::uint64_t prime_limit = 50000;
  GridSpec grid;
  std::uint64_t truncation = 1000000;
  double tol = 1e-8;
  unsigned workers = 1;
  std::filesystem::path out_dir = ".";
  bool force = false;

  /// Throws ValidationError when an invariant does not hold.
  void validate() const;
  BGrid make_grid() const;
};

/// Loads the dataset and applies the conductor window.
std::vector<CurveRecord> load_window(const RunConfig& cfg);

/// Opens out_dir/name for writing. Refuses to overwrite unless cfg.force.
std::ofstream open_output(const RunConfig& cfg, const std::string& name);

/// Table of (p, a_p) at good primes p <= limit. Without a conductor, primes
/// dividing the discriminant are treated as bad.
void cmd_ap(const Weierstrass& w, std::optional<std::uint64_t> conductor, std::uint64_t limit,
            std::ostream& out);

/// B, raw sum, S(B) for one curve on the configured grid.
void cmd_trace(const Weierstrass& w, std::optional<std::uint64_t> conductor, const RunConfig& cfg,
               std::ostream& out);

/// Writes figure1.csv (per-grid means and CIs) and figure1_classes.csv
/// (rank, n). Returns the averages.
FamilyAverages cmd_figure1(const RunConfig& cfg);

/// Writes figure2.csv (per-prime mean a_p per rank).
std::vector<ProfileRow> cmd_figure2(const RunConfig& cfg);

struct Figure3Result {
  std::vector<double> xs;
  std::vector<double> f;
  std::vector<double> main;
  std::vector<double> maxima;  // sweep_maxima of f
};

/// Writes figure3.csv (x, f_exact, main_term) for conductor scale N.
Figure3Result cmd_figure3(double N, const RunConfig& cfg);

/// Optimal cutoff per B; writes classify.csv and prints a confusion table.
std::vector<ClassifierReport> cmd_classify(const RunConfig& cfg, std::vector<double> Bs,
                                           std::ostream& out);

struct Table1Row {
  double N;
  double x1, x2;
};

/// TSV N, x1, x2 for N = 10^4 .. 10^8.
std::vector<Table1Row> cmd_table1(const RunConfig& cfg, std::ostream& out);

/// Prints the constants and limits. rel_tol > 0 demands that relative
/// accuracy from the truncation (ToleranceError otherwise).
MurmurationConstants cmd_constants(std::uint64_t P, double rel_tol, std::ostream& out);

/// Empirical maxima (B / n_ref) of the rank-0 minus rank-1 mean curve.
std::vector<double> cmd_maxima(const RunConfig& cfg, double n_ref, std::size_t window,
                               std::ostream& out);

/// Interior local maxima of a sampled curve after a centered moving average
/// over `window` points; the two with the largest values, ordered by x.
std::vector<double> sweep_maxima(std::span<const double> xs, std::span<const double> ys,
                                 std::size_t window = 25);

/// Runs the command-line interface; returns the process exit code.
int run(int argc, char** argv);

}  // namespace murmur::cli
