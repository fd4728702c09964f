#include "murmur/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "murmur/ap_engine.hpp"
#include "murmur/csv.hpp"
#include "murmur/density.hpp"
#include "murmur/error.hpp"

namespace murmur::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(part);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& s, const std::string& what) {
  T v{};
  const char* begin = s.data();
  if (!s.empty() && s[0] == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ValidationError("invalid " + what + ": '" + s + "'");
  }
  return v;
}

}  // namespace

GridSpec parse_grid_spec(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3 || parts[0] != "GEOM") {
    throw ValidationError("grid spec must look like GEOM:START:RATIO, got '" + text + "'");
  }
  GridSpec g{parse_number<double>(parts[1], "grid start"), parse_number<double>(parts[2], "grid ratio")};
  if (!(g.start >= 3.0)) throw ValidationError("grid start must be >= 3");
  if (!(g.ratio > 1.0)) throw ValidationError("grid ratio must exceed 1");
  return g;
}

std::pair<std::uint64_t, std::uint64_t> parse_window(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw ValidationError("window must look like LO:HI, got '" + text + "'");
  const auto lo = parse_number<std::uint64_t>(parts[0], "window bound");
  const auto hi = parse_number<std::uint64_t>(parts[1], "window bound");
  if (lo > hi) throw ValidationError("window LO must not exceed HI");
  return {lo, hi};
}

Weierstrass parse_coefficients(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 5) throw ValidationError("curve must be given as a1,a2,a3,a4,a6");
  std::int64_t a[5];
  for (int i = 0; i < 5; ++i) a[i] = parse_number<std::int64_t>(parts[i], "coefficient");
  return Weierstrass{a[0], a[1], a[2], a[3], a[4]};
}

void RunConfig::validate() const {
  if (window_lo > window_hi) throw ValidationError("window LO must not exceed HI");
  if (prime_limit < 3) throw ValidationError("prime limit must be at least 3");
  if (grid.start > static_cast<double>(prime_limit)) {
    throw ValidationError("prime limit must be at least the first grid point");
  }
  if (workers < 1) throw ValidationError("worker count must be >= 1");
  if (truncation < 100) throw ValidationError("truncation must be >= 100");
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
}

BGrid RunConfig::make_grid() const {
  return BGrid::geometric(grid.start, grid.ratio, static_cast<double>(prime_limit));
}

std::vector<CurveRecord> load_window(const RunConfig& cfg) {
  if (cfg.dataset.empty()) throw ValidationError("--dataset is required");
  std::ifstream in(cfg.dataset);
  if (!in) throw ValidationError("cannot open dataset '" + cfg.dataset + "'");
  const auto all = parse_curves(in);
  return filter_conductor(all, cfg.window_lo, cfg.window_hi);
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = cfg.out_dir / name;
  if (std::filesystem::exists(path) && !cfg.force) {
    throw ValidationError("refusing to overwrite " + path.string() + " (use --force)");
  }
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  return out;
}

namespace {

Reduction reduction_at(const Weierstrass& w, std::optional<std::uint64_t> conductor,
                       std::uint32_t p) {
  if (conductor) return *conductor % p == 0 ? Reduction::bad : Reduction::good;
  return singular_mod(w, p) ? Reduction::bad : Reduction::good;
}

CurveRecord adhoc_record(const Weierstrass& w, std::optional<std::uint64_t> conductor) {
  if (w.discriminant() == 0) throw ValidationError("singular curve (discriminant 0)");
  if (conductor) return make_curve("", w, *conductor, 0);
  CurveRecord rec;
  rec.model = w;
  rec.discriminant = w.discriminant();
  return rec;
}

}  // namespace

void cmd_ap(const Weierstrass& w, std::optional<std::uint64_t> conductor, std::uint64_t limit,
            std::ostream& out) {
  const CurveRecord rec = adhoc_record(w, conductor);
  const auto table = PrimeTable::sieve(limit);
  const std::uint64_t seed = model_hash(rec.model);
  out << "p\ta_p\n";
  for (std::uint32_t p : table.primes()) {
    const Reduction status = reduction_at(rec.model, conductor, p);
    if (status == Reduction::bad) continue;
    if (conductor && singular_mod(rec.model, p)) {
      throw ValidationError("model is singular mod " + std::to_string(p) +
                            " but p does not divide the conductor");
    }
    out << p << '\t' << ap(reduce_model(rec.model, p, status, seed)) << '\n';
  }
}

void cmd_trace(const Weierstrass& w, std::optional<std::uint64_t> conductor, const RunConfig& cfg,
               std::ostream& out) {
  cfg.validate();
  const CurveRecord rec = adhoc_record(w, conductor);
  const auto table = PrimeTable::sieve(cfg.prime_limit);
  const BGrid grid = cfg.make_grid();
  const std::size_t np = table.count_below(grid.back());
  const auto primes = table.primes().first(np);
  std::vector<std::int32_t> row(np, ApMatrix::kBadPrime);
  const std::uint64_t seed = model_hash(w);
  for (std::size_t k = 0; k < np; ++k) {
    const Reduction status = reduction_at(w, conductor, primes[k]);
    if (status == Reduction::good) row[k] = ap(reduce_model(w, primes[k], status, seed));
  }
  const SBTrace t = sb_trace_from_row(rec.label, row, primes, grid);
  out << "B,raw,S\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out << csv::num(grid[k]) << ',' << csv::num(t.raw[k]) << ',' << csv::num(t.values[k]) << '\n';
  }
}

namespace {

std::vector<int> ranks_of(const std::vector<CurveRecord>& recs) {
  std::vector<int> r;
  r.reserve(recs.size());
  for (const auto& c : recs) r.push_back(c.rank);
  return r;
}

}  // namespace

FamilyAverages cmd_figure1(const RunConfig& cfg) {
  cfg.validate();
  const auto recs = load_window(cfg);
  if (recs.empty()) throw EmptyClass("no curves in the conductor window");
  const auto table = PrimeTable::sieve(cfg.prime_limit);
  const auto traces = sb_traces(recs, cfg.make_grid(), table, cfg.workers);
  const auto ranks = ranks_of(recs);
  FamilyAverages fam = family_average(traces, ranks);
  {
    auto out = open_output(cfg, "figure1.csv");
    write_figure1_csv(out, fam);
  }
  auto out = open_output(cfg, "figure1_classes.csv");
  out << "rank,n\n";
  out << "0," << (fam.rank0 ? fam.rank0->n : 0) << '\n';
  out << "1," << (fam.rank1 ? fam.rank1->n : 0) << '\n';
  return fam;
}

std::vector<ProfileRow> cmd_figure2(const RunConfig& cfg) {
  cfg.validate();
  const auto recs = load_window(cfg);
  if (recs.empty()) throw EmptyClass("no curves in the conductor window");
  const auto table = PrimeTable::sieve(cfg.prime_limit);
  const auto rows = ap_average_profile(recs, table, cfg.workers);
  auto out = open_output(cfg, "figure2.csv");
  write_figure2_csv(out, rows);
  return rows;
}

std::vector<double> sweep_maxima(std::span<const double> xs, std::span<const double> ys,
                                 std::size_t window) {
  if (xs.size() != ys.size()) throw InvalidArgument("sweep_maxima: size mismatch");
  if (window == 0 || window % 2 == 0) throw InvalidArgument("sweep_maxima: window must be odd");
  if (ys.size() < window) return {};
  const std::size_t half = window / 2;
  std::vector<double> smooth;
  for (std::size_t k = half; k + half < ys.size(); ++k) {
    double s = 0.0;
    for (std::size_t j = k - half; j <= k + half; ++j) s += ys[j];
    smooth.push_back(s / static_cast<double>(window));
  }
  auto idx = interior_maxima(smooth);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return smooth[a] > smooth[b]; });
  if (idx.size() > 2) idx.resize(2);
  std::vector<double> out;
  for (auto i : idx) out.push_back(xs[i + half]);
  std::sort(out.begin(), out.end());
  return out;
}

Figure3Result cmd_figure3(double N, const RunConfig& cfg) {
  cfg.validate();
  const auto consts = euler_constants(cfg.truncation);
  const auto model = MainTermModel::make(N, consts);
  const auto table = PrimeTable::sieve(static_cast<std::uint64_t>(std::ceil(N)));
  Figure3Result r;
  r.xs = figure3_grid();
  r.f = f_exact_sweep(r.xs, N, consts, table);
  r.main.reserve(r.xs.size());
  for (double x : r.xs) r.main.push_back(x * N > 1.0 ? main_term(x, model) : std::nan(""));
  r.maxima = sweep_maxima(r.xs, r.f);
  auto out = open_output(cfg, "figure3.csv");
  out << "x,f_exact,main_term\n";
  for (std::size_t i = 0; i < r.xs.size(); ++i) {
    out << csv::num(r.xs[i]) << ',' << csv::num(r.f[i]) << ',' << csv::num(r.main[i]) << '\n';
  }
  return r;
}

std::vector<ClassifierReport> cmd_classify(const RunConfig& cfg, std::vector<double> Bs,
                                           std::ostream& out) {
  cfg.validate();
  if (Bs.empty()) throw ValidationError("classify needs at least one B");
  std::sort(Bs.begin(), Bs.end());
  Bs.erase(std::unique(Bs.begin(), Bs.end()), Bs.end());
  if (Bs.back() > static_cast<double>(cfg.prime_limit)) {
    throw ValidationError("B exceeds the prime limit; raise --primes");
  }
  const BGrid grid = BGrid::from_values(Bs);
  const auto recs = load_window(cfg);
  if (recs.empty()) throw EmptyClass("no curves in the conductor window");
  const auto table = PrimeTable::sieve(cfg.prime_limit);
  const auto traces = sb_traces(recs, grid, table, cfg.workers);

  std::vector<ClassifierReport> reports;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::vector<Score> scores;
    scores.reserve(recs.size());
    for (std::size_t c = 0; c < recs.size(); ++c) scores.push_back({traces[c].values[k], recs[c].rank});
    ClassifierReport r = optimal_cutoff(scores);
    r.B = grid[k];
    reports.push_back(r);
  }

  char line[256];
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line,
                  "B = %g  cutoff C = %.6f  accuracy = %.4f%%  (n0 = %zu, n1 = %zu)\n", r.B,
                  r.cutoff, 100.0 * r.accuracy, r.n0, r.n1);
    out << line;
    std::snprintf(line, sizeof line,
                  "               predicted 0  predicted 1\n"
                  "  rank 0  %13zu %12zu\n"
                  "  rank 1  %13zu %12zu\n",
                  r.tp0, r.fp1, r.fp0, r.tp1);
    out << line;
  }
  auto file = open_output(cfg, "classify.csv");
  write_report_csv_header(file);
  for (const auto& r : reports) write_report_csv_row(file, r);
  return reports;
}

std::vector<Table1Row> cmd_table1(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  const auto consts = euler_constants(cfg.truncation);
  std::vector<Table1Row> rows;
  out << "N\tx1\tx2\n";
  char line[128];
  for (double N : {1e4, 1e5, 1e6, 1e7, 1e8}) {
    const auto rep = local_maxima(MainTermModel::make(N, consts), cfg.tol);
    rows.push_back({N, rep.x1, rep.x2});
    std::snprintf(line, sizeof line, "%.0f\t%.8f\t%.8f\n", N, rep.x1, rep.x2);
    out << line;
  }
  return rows;
}

MurmurationConstants cmd_constants(std::uint64_t P, double rel_tol, std::ostream& out) {
  const auto k = euler_constants(P, {false, rel_tol});
  const auto lim = limit_constants(k);
  char buf[1024];
  std::snprintf(buf, sizeof buf,
                "A\t%.12f\nB\t%.12f\nD2\t%.12f\nC1\t%.12f\nC2\t%.12f\nC3\t%.12f\n"
                "A^2/pi^2\t%.12f\nsecond_max_bound\t%.12f\nlambda\t%.12f\n"
                "truncation_P\t%llu\nodd_primes_only\t%s\ntail_log_bound\t%.3e\n"
                "relative_error_bound\t%.3e\n",
                k.A, k.B, k.D2, k.C1, k.C2, k.C3, lim.first_limit, lim.second_bound, lim.lambda,
                static_cast<unsigned long long>(k.truncation), k.include_two ? "no" : "yes",
                k.tail_log_bound, k.relative_error_bound);
  out << buf;
  return k;
}

std::vector<double> cmd_maxima(const RunConfig& cfg, double n_ref, std::size_t window,
                               std::ostream& out) {
  cfg.validate();
  if (2.0 * n_ref > static_cast<double>(cfg.prime_limit)) {
    throw ValidationError("--primes must be at least 2 * n_ref for the maxima search");
  }
  const auto recs = load_window(cfg);
  if (recs.empty()) throw EmptyClass("no curves in the conductor window");
  const auto table = PrimeTable::sieve(cfg.prime_limit);
  // Close the grid at exactly 2 n_ref so it covers the required range.
  const BGrid base = cfg.make_grid();
  std::vector<double> bs;
  for (double b : base.values()) {
    if (b < 2.0 * n_ref) bs.push_back(b);
  }
  bs.push_back(2.0 * n_ref);
  const auto traces = sb_traces(recs, BGrid::from_values(bs), table, cfg.workers);
  const auto fam = family_average(traces, ranks_of(recs));
  const auto xs = empirical_maxima(fam, n_ref, window);
  out << "n_ref\t" << n_ref << "\nmaxima_B_over_N";
  for (double x : xs) out << '\t' << std::setprecision(5) << x;
  out << '\n';
  return xs;
}

int run(int argc, char** argv) {
  CLI::App app{"Mestre-Nagao sums, rank classification and murmuration maxima"};
  app.set_config("--config", "", "key=value configuration file (flags take precedence)");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string window, grid;
  app.add_option("--dataset", cfg.dataset, "curve CSV (label,a1,a2,a3,a4,a6,conductor,rank)");
  app.add_option("--window", window, "conductor window LO:HI");
  app.add_option("--primes", cfg.prime_limit, "prime limit");
  app.add_option("--grid", grid, "B grid GEOM:START:RATIO");
  app.add_option("--trunc", cfg.truncation, "Euler product truncation P");
  app.add_option("--tol", cfg.tol, "tolerance for the maxima search");
  app.add_option("--workers", cfg.workers, "worker threads");
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_flag("--force", cfg.force, "overwrite existing output files");

  std::string curve;
  std::optional<std::uint64_t> conductor;
  auto add_curve = [&](CLI::App* sub) {
    sub->add_option("--curve", curve, "a1,a2,a3,a4,a6")->required();
    sub->add_option("--conductor", conductor, "conductor (bad primes); default: p | discriminant");
  };
  auto* ap_cmd = app.add_subcommand("ap", "print a_p for one curve");
  add_curve(ap_cmd);
  auto* trace_cmd = app.add_subcommand("trace", "S(B) on the grid for one curve");
  add_curve(trace_cmd);
  auto* fig1 = app.add_subcommand("figure1", "per-rank mean S(B) with 90% CIs");
  auto* fig2 = app.add_subcommand("figure2", "per-prime mean a_p per rank");
  auto* fig3 = app.add_subcommand("figure3", "f(x) and its main terms");
  double fig3_n = 1e5;
  fig3->add_option("--N", fig3_n, "conductor scale");
  auto* classify = app.add_subcommand("classify", "optimal cutoff and accuracy per B");
  std::vector<double> Bs;
  classify->add_option("--B", Bs, "values of B")->required();
  auto* table1 = app.add_subcommand("table1", "maxima of the main terms for N = 1e4..1e8");
  auto* constants = app.add_subcommand("constants", "Euler-product constants and limits");
  double rel_tol = 0.0;
  constants->add_option("--rel-tol", rel_tol, "required relative accuracy of the products (0: none)");
  auto* maxima = app.add_subcommand("maxima", "empirical maxima of the rank-separated means");
  double n_ref = 0.0;
  std::size_t smooth = 5;
  maxima->add_option("--nref", n_ref, "reference conductor (default: window LO)");
  maxima->add_option("--smooth", smooth, "moving-average window (odd)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!window.empty()) std::tie(cfg.window_lo, cfg.window_hi) = parse_window(window);
    if (!grid.empty()) cfg.grid = parse_grid_spec(grid);
    cfg.validate();

    if (ap_cmd->parsed()) {
      cmd_ap(parse_coefficients(curve), conductor, cfg.prime_limit, std::cout);
    } else if (trace_cmd->parsed()) {
      cmd_trace(parse_coefficients(curve), conductor, cfg, std::cout);
    } else if (fig1->parsed()) {
      const auto fam = cmd_figure1(cfg);
      std::cout << "rank 0: " << (fam.rank0 ? fam.rank0->n : 0)
                << " curves, rank 1: " << (fam.rank1 ? fam.rank1->n : 0) << " curves\n";
    } else if (fig2->parsed()) {
      std::cout << cmd_figure2(cfg).size() << " primes written\n";
    } else if (fig3->parsed()) {
      const auto r = cmd_figure3(fig3_n, cfg);
      std::cout << "maxima of f:";
      for (double x : r.maxima) std::cout << ' ' << x;
      std::cout << '\n';
    } else if (classify->parsed()) {
      cmd_classify(cfg, Bs, std::cout);
    } else if (table1->parsed()) {
      cmd_table1(cfg, std::cout);
    } else if (constants->parsed()) {
      cmd_constants(cfg.truncation, rel_tol, std::cout);
    } else if (maxima->parsed()) {
      cmd_maxima(cfg, n_ref > 0.0 ? n_ref : static_cast<double>(cfg.window_lo), smooth, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.numerical() ? 3 : 2;
  }
  return 0;
}

}  // namespace murmur::cli
