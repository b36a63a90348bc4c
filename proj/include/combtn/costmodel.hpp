#pragma once

// Closed-form multiplication counts for both geometries, the chain-minus-comb
// difference, and the bond-dimension window in which the comb is cheaper.
//
// Two comb polynomials are carried. `c_comb_printed` is the published
// closed form. `c_comb_schedule` is the count of the comb schedule the
// engine executes; it is smaller by exactly M * x^2 (the per-tooth "+ x^2"
// of the published form has no contraction step behind it). The threshold
// quadratic below is the root condition of the schedule basis:
//
//   C_regular - C_comb_schedule = -x * [(M-2) x^2 + (2 - d(M-2)) x + d(M-2)]

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "combtn/checked.hpp"
#include "combtn/params.hpp"

namespace combtn {

/// Which comb polynomial to compare against.
enum class Basis { Schedule, Printed };

inline const char* to_string(Basis b) { return b == Basis::Schedule ? "schedule" : "printed"; }

/// Contraction phases; every schedule step carries one of these tags.
enum class Phase { Compress, AbsorbPhysical, ToothSweep, ToothToBackbone, ChainSweep, FinalDot };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::Compress: return "compress";
    case Phase::AbsorbPhysical: return "absorb-physical";
    case Phase::ToothSweep: return "tooth-sweep";
    case Phase::ToothToBackbone: return "tooth-to-backbone";
    case Phase::ChainSweep: return "chain-sweep";
    case Phase::FinalDot: return "final-dot";
  }
  return "?";
}

struct Term {
  std::string label;
  Count value = 0;
};

inline Count sum_terms(const std::vector<Term>& terms) {
  Count total = 0;
  for (const auto& t : terms) total = checked_add(total, t.value);
  return total;
}

/// N M D d + 2 x d + (N M - 2) x^2 d + (N M - 2) x^2 + x, term by term.
inline std::vector<Term> c_regular_terms(const NetworkParams& p) {
  p.validate();
  const Count L = p.sites(), D = p.raw_dim, d = p.compressed_dim, x = p.bond_dim;
  if (L < 2) throw std::invalid_argument("chain needs at least 2 sites (M*N >= 2)");
  return {
      {"N M D d", checked_product(L, D, d)},
      {"2 x d", checked_product(2, x, d)},
      {"(N M - 2) x^2 d", checked_product(L - 2, x, x, d)},
      {"(N M - 2) x^2", checked_product(L - 2, x, x)},
      {"x", x},
  };
}

/// (N d D + d x + (N-1) d x^2 + (N-1) x^2 + x^2) M + 2 x^2 + (M-2) x^3 + (M-2) x^2 + x
inline std::vector<Term> c_comb_printed_terms(const NetworkParams& p) {
  p.validate();
  const Count M = p.teeth, N = p.tooth_length, D = p.raw_dim, d = p.compressed_dim, x = p.bond_dim;
  return {
      {"N d D M", checked_product(N, d, D, M)},
      {"d x M", checked_product(d, x, M)},
      {"(N - 1) d x^2 M", checked_product(N - 1, d, x, x, M)},
      {"(N - 1) x^2 M", checked_product(N - 1, x, x, M)},
      {"x^2 M", checked_product(x, x, M)},
      {"2 x^2", checked_product(2, x, x)},
      {"(M - 2) x^3", checked_product(M - 2, x, x, x)},
      {"(M - 2) x^2", checked_product(M - 2, x, x)},
      {"x", x},
  };
}

/// Printed comb terms without the unmatched x^2 M.
inline std::vector<Term> c_comb_schedule_terms(const NetworkParams& p) {
  auto terms = c_comb_printed_terms(p);
  terms.erase(terms.begin() + 4);
  return terms;
}

inline Count c_regular(const NetworkParams& p) { return sum_terms(c_regular_terms(p)); }
inline Count c_comb_printed(const NetworkParams& p) { return sum_terms(c_comb_printed_terms(p)); }
inline Count c_comb_schedule(const NetworkParams& p) { return sum_terms(c_comb_schedule_terms(p)); }

inline Count c_comb(const NetworkParams& p, Basis basis) {
  return basis == Basis::Printed ? c_comb_printed(p) : c_comb_schedule(p);
}

/// C_regular - C_comb on the chosen basis. Positive means the comb is cheaper.
inline SignedCount delta_c(const NetworkParams& p, Basis basis) {
  return signed_difference(c_regular(p), c_comb(p, basis));
}

namespace detail {

inline std::map<Phase, Count> all_phase_counts(Geometry g, const NetworkParams& p) {
  p.validate();
  const Count M = p.teeth, N = p.tooth_length, D = p.raw_dim, d = p.compressed_dim, x = p.bond_dim;
  if (g == Geometry::Mps) {
    const Count L = p.sites();
    if (L < 2) throw std::invalid_argument("chain needs at least 2 sites (M*N >= 2)");
    return {
        {Phase::Compress, checked_product(L, D, d)},
        {Phase::AbsorbPhysical, checked_add(checked_product(2, x, d), checked_product(L - 2, x, x, d))},
        {Phase::ChainSweep, checked_product(L - 2, x, x)},
        {Phase::FinalDot, x},
    };
  }
  return {
      {Phase::Compress, checked_product(M, N, D, d)},
      {Phase::AbsorbPhysical, checked_mul(M, checked_add(checked_mul(d, x), checked_product(N - 1, d, x, x)))},
      {Phase::ToothSweep, checked_product(M, N - 1, x, x)},
      {Phase::ToothToBackbone, checked_add(checked_product(2, x, x), checked_product(M - 2, x, x, x))},
      {Phase::ChainSweep, checked_product(M - 2, x, x)},
      {Phase::FinalDot, x},
  };
}

}  // namespace detail

/// Expected per-phase subtotals of the executable schedules. The chain
/// schedule reproduces C_regular term by term; the comb schedule
/// reproduces C_comb_schedule. Phases with no steps (chain sweep at two
/// sites or two teeth, tooth sweep at N = 1) are absent.
inline std::map<Phase, Count> schedule_phase_counts(Geometry g, const NetworkParams& p) {
  auto counts = detail::all_phase_counts(g, p);
  std::erase_if(counts, [](const auto& kv) { return kv.second == 0; });
  return counts;
}

enum class Regime { MpsAlwaysCheaper, CombWindow, Degenerate };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::MpsAlwaysCheaper: return "MpsAlwaysCheaper";
    case Regime::CombWindow: return "CombWindow";
    case Regime::Degenerate: return "Degenerate";
  }
  return "?";
}

struct ThresholdResult {
  std::size_t teeth = 0;
  double d = 0.0;
  double a = 0.0, b = 0.0, c = 0.0;  // (M-2) x^2 + b x + c
  double discriminant = 0.0;
  std::optional<std::pair<double, double>> roots;  // (x_minus, x_plus), x_minus <= x_plus
  Regime regime = Regime::MpsAlwaysCheaper;

  std::optional<double> x_minus() const {
    return roots ? std::optional<double>(roots->first) : std::nullopt;
  }
  std::optional<double> x_plus() const {
    return roots ? std::optional<double>(roots->second) : std::nullopt;
  }
};

/// Real roots of a x^2 + b x + c with a != 0, ascending. The larger-magnitude
/// root comes from q = -(b + sign(b) sqrt(disc)) / 2 and the other from
/// c / q, which avoids cancellation when b^2 >> 4ac.
inline std::optional<std::pair<double, double>> stable_quadratic_roots(double a, double b, double c) {
  if (a == 0.0) throw std::invalid_argument("leading coefficient is zero");
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::nullopt;
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  if (q == 0.0) return std::make_pair(0.0, 0.0);  // b = c = 0
  double r1 = q / a, r2 = c / q;
  if (r1 > r2) std::swap(r1, r2);
  return std::make_pair(r1, r2);
}

/// CombWindow needs two distinct positive roots; a double root leaves no
/// open window.
inline Regime classify_regime(double discriminant, const std::optional<std::pair<double, double>>& roots) {
  if (!roots || roots->first <= 0.0) return Regime::MpsAlwaysCheaper;
  if (discriminant == 0.0) return Regime::Degenerate;
  return Regime::CombWindow;
}

/// Roots of (M-2) x^2 + (2 - d(M-2)) x + d(M-2). The comb schedule is
/// cheaper exactly for x strictly between them. M = 2 has no quadratic
/// term; there the difference is -2 x^2 and the chain always wins.
inline ThresholdResult threshold_roots(double d, std::size_t teeth) {
  if (teeth < 2) throw std::invalid_argument("M (teeth) must be >= 2");
  if (!(d > 0.0) || !std::isfinite(d)) throw std::invalid_argument("d must be a positive finite number");
  ThresholdResult r;
  r.teeth = teeth;
  r.d = d;
  const double m2 = static_cast<double>(teeth - 2);
  r.a = m2;
  r.b = -d * m2 + 2.0;
  r.c = d * m2;
  r.discriminant = r.b * r.b - 4.0 * r.a * r.c;
  if (teeth > 2) r.roots = stable_quadratic_roots(r.a, r.b, r.c);
  r.regime = classify_regime(r.discriminant, r.roots);
  return r;
}

struct SweepRow {
  double d = 0.0;
  std::optional<double> x_minus;
  std::optional<double> x_plus;
  Regime regime = Regime::MpsAlwaysCheaper;
};

/// One row per d = d_min, d_min + step, ... <= d_max.
inline std::vector<SweepRow> threshold_sweep(std::size_t teeth, double d_min, double d_max, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("sweep step must be positive");
  if (d_min > d_max) throw std::invalid_argument("sweep needs d_min <= d_max");
  const auto count = static_cast<std::size_t>(std::floor((d_max - d_min) / step + 1e-9)) + 1;
  std::vector<SweepRow> rows;
  rows.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double d = d_min + static_cast<double>(k) * step;
    const auto t = threshold_roots(d, teeth);
    rows.push_back({d, t.x_minus(), t.x_plus(), t.regime});
  }
  return rows;
}

struct Probe {
  std::size_t x = 0;
  SignedCount delta = 0;   // schedule-basis C_regular - C_comb
  int predicted_sign = 0;  // from the root interval
  bool guarded = false;    // within 0.5 of a root; not compared
  bool agrees = true;
};

struct QuadraticCrosscheck {
  ThresholdResult threshold;
  std::vector<Probe> probes;
  bool all_agree = true;
};

/// Compares the sign of the schedule-basis difference at integer x in
/// [x_lo, x_hi] with the sign implied by the root interval: positive
/// strictly inside (x_minus, x_plus), negative outside. Probes within 0.5
/// of a root are skipped.
inline QuadraticCrosscheck crosscheck_quadratic(std::size_t teeth, std::size_t d, std::size_t x_lo,
                                                std::size_t x_hi) {
  if (teeth < 3) throw std::invalid_argument("quadratic cross-check needs M >= 3");
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  if (x_lo < 1 || x_lo > x_hi) throw std::invalid_argument("probe range must satisfy 1 <= x_lo <= x_hi");
  QuadraticCrosscheck out;
  out.threshold = threshold_roots(static_cast<double>(d), teeth);
  for (std::size_t x = x_lo; x <= x_hi; ++x) {
    // The difference is independent of N and D; N = 1, D = d is the cheapest valid choice.
    const NetworkParams p{d, d, x, teeth, 1};
    Probe probe;
    probe.x = x;
    probe.delta = delta_c(p, Basis::Schedule);
    const double xd = static_cast<double>(x);
    if (const auto& roots = out.threshold.roots) {
      const auto [lo, hi] = *roots;
      probe.guarded = std::abs(xd - lo) <= 0.5 || std::abs(xd - hi) <= 0.5;
      probe.predicted_sign = (xd > lo && xd < hi) ? 1 : -1;
    } else {
      probe.predicted_sign = -1;
    }
    if (!probe.guarded) {
      const int actual = (probe.delta > 0) - (probe.delta < 0);
      probe.agrees = actual == probe.predicted_sign;
      out.all_agree = out.all_agree && probe.agrees;
    }
    out.probes.push_back(probe);
  }
  return out;
}

}  // namespace combtn
