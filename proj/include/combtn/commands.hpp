#pragma once

// Subcommands of the `combtn` tool. Each returns a process exit code:
// 0 success, 1 verification or I/O failure, 2 usage error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "combtn/costmodel.hpp"
#include "combtn/engine.hpp"
#include "combtn/io.hpp"
#include "combtn/network.hpp"
#include "combtn/svg.hpp"

namespace combtn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr std::uint64_t kDefaultSeed = 42;

namespace detail {

inline double round6(double v) { return std::round(v * 1e6) / 1e6; }

inline std::string verdict(SignedCount delta) {
  if (delta > 0) return "comb cheaper";
  if (delta < 0) return "MPS cheaper";
  return "tie";
}

inline bool relative_close(double a, double b, double rel) {
  if (a == b) return true;
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace detail

// ---------------------------------------------------------------- cost

struct CostOptions {
  NetworkParams params;
  Basis basis = Basis::Schedule;
};

inline int cmd_cost(const CostOptions& opt, std::ostream& out, std::ostream& err) {
  const auto& p = opt.params;
  try {
    p.validate();
    const Count reg = c_regular(p);
    const Count sched = c_comb_schedule(p);
    const Count printed = c_comb_printed(p);
    const Basis other = opt.basis == Basis::Schedule ? Basis::Printed : Basis::Schedule;
    const SignedCount delta = delta_c(p, opt.basis);
    const SignedCount delta_other = delta_c(p, other);

    out << "parameters " << p.to_string() << "\n";
    out << fmt::format("{:<28}{:>16}\n", "C_regular", reg);
    out << fmt::format("{:<28}{:>16}\n", "C_comb (schedule)", sched);
    out << fmt::format("{:<28}{:>16}\n", "C_comb (printed)", printed);
    out << fmt::format("{:<28}{:>16}  {}\n", fmt::format("delta C ({})", to_string(opt.basis)), delta,
                       detail::verdict(delta));
    out << fmt::format("{:<28}{:>16}  {}\n", fmt::format("delta C ({})", to_string(other)), delta_other,
                       detail::verdict(delta_other));
    out << fmt::format("{:<28}{:>16}\n", "printed - schedule (M x^2)", printed - sched);

    auto table = [&](const char* title, const std::vector<Term>& terms) {
      out << "\n" << title << "\n";
      for (const auto& t : terms) out << fmt::format("  {:<26}{:>16}\n", t.label, t.value);
    };
    table("C_regular terms", c_regular_terms(p));
    table(opt.basis == Basis::Schedule ? "C_comb (schedule) terms" : "C_comb (printed) terms",
          opt.basis == Basis::Schedule ? c_comb_schedule_terms(p) : c_comb_printed_terms(p));
    if (opt.basis == Basis::Printed) out << "  (the x^2 M term has no step in the executed comb schedule)\n";
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::overflow_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

// ----------------------------------------------------------- threshold

struct ThresholdOptions {
  std::size_t teeth = 50;
  double d = 30.0;
  bool json = false;
};

inline constexpr double kQuotedUpperRoot = 28.83;

inline int cmd_threshold(const ThresholdOptions& opt, std::ostream& out, std::ostream& err) {
  ThresholdResult t;
  try {
    t = threshold_roots(opt.d, opt.teeth);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  if (opt.json) {
    nlohmann::json j;
    j["x_minus"] = t.roots ? nlohmann::json(detail::round6(t.roots->first)) : nlohmann::json(nullptr);
    j["x_plus"] = t.roots ? nlohmann::json(detail::round6(t.roots->second)) : nlohmann::json(nullptr);
    j["regime"] = to_string(t.regime);
    j["discriminant"] = detail::round6(t.discriminant);
    out << j.dump() << "\n";
    return kExitOk;
  }

  out << fmt::format("M = {}, d = {}\n", t.teeth, format_d(t.d));
  if (t.teeth == 2) {
    out << "M = 2 has no quadratic term: delta C = -2 x^2 < 0; MPS always cheaper\n";
    out << "regime: " << to_string(t.regime) << "\n";
    return kExitOk;
  }
  out << fmt::format("quadratic: {:g} x^2 + ({:g}) x + {:g} = 0\n", t.a, t.b, t.c);
  out << fmt::format("discriminant: {:.6f}\n", t.discriminant);
  if (!t.roots) {
    out << "no real roots; MPS always cheaper\n";
  } else {
    out << fmt::format("x- = {:.2f}\nx+ = {:.2f}\n", t.roots->first, t.roots->second);
    if (t.regime == Regime::CombWindow) {
      out << fmt::format("comb cheaper for {:.2f} < x < {:.2f}\n", t.roots->first, t.roots->second);
    } else if (t.regime == Regime::Degenerate) {
      out << "double root; no bond dimension makes the comb strictly cheaper\n";
    } else {
      out << "both roots are non-positive; MPS always cheaper\n";
    }
  }
  out << "regime: " << to_string(t.regime) << "\n";
  if (t.teeth == 50 && t.d == 30.0 && t.roots) {
    out << fmt::format(
        "note: the commonly quoted value x+ ~ {:.2f} for M = 50, d = 30 does not follow from the "
        "root formula, which gives {:.4f} (difference {:.2f})\n",
        kQuotedUpperRoot, t.roots->second, t.roots->second - kQuotedUpperRoot);
  }
  return kExitOk;
}

// --------------------------------------------------------------- sweep

struct SweepOptions {
  std::size_t teeth = 50;
  double d_min = 1.0;
  double d_max = 60.0;
  double step = 1.0;
  std::string out_csv;
  std::optional<std::string> out_svg;
};

inline int cmd_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err) {
  std::vector<SweepRow> rows;
  try {
    rows = threshold_sweep(opt.teeth, opt.d_min, opt.d_max, opt.step);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  {
    std::ofstream f(opt.out_csv, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << opt.out_csv << "\n";
      return kExitFailure;
    }
    write_sweep_csv(f, rows);
    if (!f.flush()) {
      err << "error: write to " << opt.out_csv << " failed\n";
      return kExitFailure;
    }
  }
  out << fmt::format("wrote {} rows to {}\n", rows.size(), opt.out_csv);
  if (opt.out_svg) {
    std::ofstream f(*opt.out_svg, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << *opt.out_svg << "\n";
      return kExitFailure;
    }
    write_sweep_svg(f, rows, opt.teeth);
    if (!f.flush()) {
      err << "error: write to " << *opt.out_svg << " failed\n";
      return kExitFailure;
    }
    out << "wrote chart to " << *opt.out_svg << "\n";
  }
  return kExitOk;
}

// -------------------------------------------------------------- verify

/// Closed forms checked by `verify`; replaceable so the failure path can be exercised.
struct FormulaSet {
  std::function<Count(const NetworkParams&)> regular = [](const NetworkParams& p) { return c_regular(p); };
  std::function<Count(const NetworkParams&)> comb_printed = [](const NetworkParams& p) {
    return c_comb_printed(p);
  };
};

struct VerifyOptions {
  std::string grid = "small";
  std::uint64_t seed = kDefaultSeed;
  FormulaSet formulas;
};

struct VerifyGrid {
  std::vector<std::size_t> tooth_lengths, teeth, comp_dims, bonds;
  std::size_t extra_raw = 1;  // D ranges over d .. d + extra_raw
};

inline VerifyGrid verify_grid(const std::string& name) {
  if (name == "small") return {{1, 2, 3}, {2, 3, 5}, {1, 2, 3}, {1, 2, 3}, 1};
  if (name == "full") return {{1, 2, 3, 4, 5, 6, 7, 8}, {2, 3, 4, 5, 6, 7, 8}, {1, 2, 3}, {1, 2, 3, 4, 5, 6}, 1};
  throw std::invalid_argument("unknown grid '" + name + "' (expected small or full)");
}

inline std::vector<NetworkParams> grid_tuples(const VerifyGrid& g) {
  std::vector<NetworkParams> out;
  for (auto N : g.tooth_lengths)
    for (auto M : g.teeth)
      for (auto d : g.comp_dims)
        for (std::size_t D = d; D <= d + g.extra_raw; ++D)
          for (auto x : g.bonds) out.push_back({D, d, x, M, N});
  return out;
}

class CheckTally {
 public:
  void record(const std::string& check, bool ok, const std::string& where) {
    auto& row = find(check);
    ++row.runs;
    if (!ok) {
      ++row.failures;
      if (!first_failure_) first_failure_ = check + " at " + where;
    }
  }

  bool all_passed() const { return !first_failure_.has_value(); }
  const std::optional<std::string>& first_failure() const { return first_failure_; }

  void print(std::ostream& out) const {
    out << fmt::format("{:<40}{:>8}{:>10}  {}\n", "check", "runs", "failures", "status");
    for (const auto& r : rows_) {
      out << fmt::format("{:<40}{:>8}{:>10}  {}\n", r.name, r.runs, r.failures, r.failures ? "FAIL" : "pass");
    }
  }

 private:
  struct Row {
    std::string name;
    std::size_t runs = 0, failures = 0;
  };
  Row& find(const std::string& name) {
    for (auto& r : rows_)
      if (r.name == name) return r;
    rows_.push_back({name});
    return rows_.back();
  }
  std::vector<Row> rows_;
  std::optional<std::string> first_failure_;
};

inline int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
  VerifyGrid grid;
  try {
    grid = verify_grid(opt.grid);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const auto tuples = grid_tuples(grid);
  CheckTally tally;

  for (const auto& p : tuples) {
    const std::string where = p.to_string();
    const Count mx2 = checked_product(p.teeth, p.bond_dim, p.bond_dim);

    const auto mps = build_mps(p, opt.seed);
    const auto mps_run = execute(mps, mps_plan(mps));
    tally.record("mps measured == printed C_regular", mps_run.cost.total == opt.formulas.regular(p), where);
    tally.record("mps per-phase == formula terms", mps_run.cost.per_phase == schedule_phase_counts(Geometry::Mps, p), where);

    const auto comb = build_comb(p, opt.seed);
    const auto comb_run = execute(comb, comb_plan(comb));
    const Count printed = opt.formulas.comb_printed(p);
    tally.record("comb measured == printed C_comb - M x^2", printed >= mx2 && comb_run.cost.total == printed - mx2, where);
    tally.record("comb residual == M x^2",
                 signed_difference(printed, comb_run.cost.total) == static_cast<SignedCount>(mx2), where);
    tally.record("comb per-phase == schedule terms",
                 comb_run.cost.per_phase == schedule_phase_counts(Geometry::Comb, p), where);

    tally.record("mps value == naive oracle (rel 1e-10)",
                 detail::relative_close(mps_run.value, naive_value_oracle(mps), 1e-10), where);
    tally.record("comb value == naive oracle (rel 1e-10)",
                 detail::relative_close(comb_run.value, naive_value_oracle(comb), 1e-10), where);

    const NetworkParams reduced{p.compressed_dim, p.compressed_dim, p.bond_dim, p.teeth, 1};
    tally.record("delta C independent of N and D",
                 delta_c(p, Basis::Schedule) == delta_c(reduced, Basis::Schedule) &&
                     delta_c(p, Basis::Printed) == delta_c(reduced, Basis::Printed),
                 where);
  }

  for (auto M : grid.teeth) {
    if (M < 3) continue;
    for (std::size_t d = 1; d <= 10; ++d) {
      const std::string where = fmt::format("(M={}, d={})", M, d);
      const auto t = threshold_roots(static_cast<double>(d), M);
      if (t.roots) {
        const auto [lo, hi] = *t.roots;
        const double sum = static_cast<double>(d) - 2.0 / static_cast<double>(M - 2);
        tally.record("Vieta product and sum (rel 1e-12)",
                     detail::relative_close(lo * hi, static_cast<double>(d), 1e-12) &&
                         detail::relative_close(lo + hi, sum, 1e-12),
                     where);
      }
      const std::size_t x_hi = t.roots ? static_cast<std::size_t>(std::ceil(t.roots->second)) + 5 : 12;
      tally.record("quadratic sign == schedule delta C sign", crosscheck_quadratic(M, d, 1, x_hi).all_agree, where);
    }
  }

  out << fmt::format("verify grid={} seed={} tuples={}\n", opt.grid, opt.seed, tuples.size());
  tally.print(out);
  if (!tally.all_passed()) {
    out << "FAILED: first failure: " << *tally.first_failure() << "\n";
    err << "verification failed: " << *tally.first_failure() << "\n";
    return kExitFailure;
  }
  out << "all checks passed\n";
  return kExitOk;
}

// ------------------------------------------------------------ contract

struct ContractOptions {
  Geometry kind = Geometry::Mps;
  NetworkParams params;
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::string> data_path;
  bool orthonormal_u = false;
  bool json = false;
};

inline int cmd_contract(const ContractOptions& opt, std::ostream& out, std::ostream& err) {
  const auto& p = opt.params;
  try {
    auto net = opt.kind == Geometry::Mps ? build_mps(p, opt.seed) : build_comb(p, opt.seed);
    if (opt.data_path) {
      std::ifstream f(*opt.data_path);
      if (!f) {
        err << "error: cannot read " << *opt.data_path << "\n";
        return kExitFailure;
      }
      net = attach_data(net, read_data_matrix(f, net.sites(), p.raw_dim));
    }
    if (opt.orthonormal_u) net = set_orthonormal_compressions(net, opt.seed);
    const auto run = execute(net, plan_for(net));
    const auto& c = run.cost;

    if (opt.json) {
      nlohmann::json j;
      j["kind"] = to_string(opt.kind);
      j["value"] = run.value;
      j["measured_mults"] = c.total;
      j["analytic_printed"] = c.analytic_printed;
      j["analytic_schedule"] = c.analytic_schedule;
      j["residual_printed_minus_measured"] = c.residual_printed_minus_measured;
      nlohmann::json phases = nlohmann::json::object();
      for (const auto& [phase, n] : c.per_phase) phases[to_string(phase)] = n;
      j["per_phase"] = phases;
      out << j.dump() << "\n";
      return kExitOk;
    }
    out << "kind " << to_string(opt.kind) << " " << p.to_string() << " seed=" << opt.seed << "\n";
    out << fmt::format("value                         {:.17g}\n", run.value);
    out << fmt::format("measured multiplications      {}\n", c.total);
    out << fmt::format("analytic (schedule)           {}\n", c.analytic_schedule);
    out << fmt::format("analytic (printed)            {}\n", c.analytic_printed);
    out << fmt::format("residual printed - measured   {}\n", c.residual_printed_minus_measured);
    out << fmt::format("peak live elements            {}\n", c.peak_live_elements);
    for (const auto& [phase, n] : c.per_phase) out << fmt::format("  {:<26}{:>14}\n", to_string(phase), n);
    return kExitOk;
  } catch (const CsvError& e) {
    err << "error: malformed data file: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::overflow_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

// --------------------------------------------------------------- bench

struct BenchOptions {
  NetworkParams params;  // bond_dim is taken from `bonds`
  std::vector<std::size_t> bonds;
  std::size_t reps = 5;
  std::uint64_t seed = kDefaultSeed;
  std::string out_csv;
};

struct BenchRow {
  Geometry kind = Geometry::Mps;
  std::size_t bond = 0;
  Count measured_mults = 0;
  std::int64_t median_ns = 0;
  std::size_t reps = 0;
};

inline std::vector<BenchRow> run_bench(const BenchOptions& opt) {
  if (opt.reps < 3) throw std::invalid_argument("--reps must be >= 3");
  if (opt.bonds.empty()) throw std::invalid_argument("--bond-list must name at least one bond dimension");
  std::vector<BenchRow> rows;
  for (Geometry kind : {Geometry::Mps, Geometry::Comb}) {
    for (auto x : opt.bonds) {
      NetworkParams p = opt.params;
      p.bond_dim = x;
      const auto net = kind == Geometry::Mps ? build_mps(p, opt.seed) : build_comb(p, opt.seed);
      const auto plan = plan_for(net);
      std::vector<std::int64_t> times;
      Count mults = 0;
      for (std::size_t r = 0; r < opt.reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto run = execute(net, plan);
        const auto t1 = std::chrono::steady_clock::now();
        mults = run.cost.total;
        times.push_back(std::max<std::int64_t>(
            1, std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count()));
      }
      std::sort(times.begin(), times.end());
      const std::size_t n = times.size();
      const std::int64_t median = n % 2 ? times[n / 2] : (times[n / 2 - 1] + times[n / 2]) / 2;
      rows.push_back({kind, x, mults, median, opt.reps});
    }
  }
  return rows;
}

inline int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
  std::vector<BenchRow> rows;
  try {
    rows = run_bench(opt);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::overflow_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  std::ofstream f(opt.out_csv, std::ios::binary);
  if (!f) {
    err << "error: cannot write " << opt.out_csv << "\n";
    return kExitFailure;
  }
  f << "kind,x,measured_mults,median_ns,reps\n";
  for (const auto& r : rows) {
    f << fmt::format("{},{},{},{},{}\n", to_string(r.kind), r.bond, r.measured_mults, r.median_ns, r.reps);
  }
  if (!f.flush()) {
    err << "error: write to " << opt.out_csv << " failed\n";
    return kExitFailure;
  }
  out << fmt::format("wrote {} rows to {}\n", rows.size(), opt.out_csv);
  return kExitOk;
}

}  // namespace combtn::cli
