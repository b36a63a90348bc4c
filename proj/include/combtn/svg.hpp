#pragma once

// Two-curve line chart of the threshold roots against d.

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "combtn/costmodel.hpp"

namespace combtn {

namespace detail {

// Roughly five ticks at 1, 2 or 5 times a power of ten.
inline double nice_tick(double span) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

}  // namespace detail

inline void write_sweep_svg(std::ostream& out, const std::vector<SweepRow>& rows, std::size_t teeth) {
  constexpr double W = 800, H = 600, left = 80, right = 140, top = 50, bottom = 70;
  const double pw = W - left - right, ph = H - top - bottom;

  double d_lo = rows.empty() ? 0.0 : rows.front().d;
  double d_hi = rows.empty() ? 1.0 : rows.back().d;
  if (d_hi <= d_lo) d_hi = d_lo + 1.0;
  double y_hi = 1.0;
  for (const auto& r : rows)
    if (r.x_plus) y_hi = std::max(y_hi, *r.x_plus);
  const double y_tick = detail::nice_tick(y_hi);
  y_hi = std::ceil(y_hi / y_tick) * y_tick;

  auto sx = [&](double d) { return left + (d - d_lo) / (d_hi - d_lo) * pw; };
  auto sy = [&](double y) { return top + ph - y / y_hi * ph; };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  out << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  out << fmt::format("<text x=\"{:.1f}\" y=\"30\" font-family=\"sans-serif\" font-size=\"18\" "
                     "text-anchor=\"middle\">Threshold roots for M = {}</text>\n",
                     left + pw / 2, teeth);

  // axes
  out << fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"black\"/>\n",
                     left, top + ph, left + pw);
  out << fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"black\"/>\n",
                     left, top, top + ph);

  const double d_tick = detail::nice_tick(d_hi - d_lo);
  for (double t = std::ceil(d_lo / d_tick) * d_tick; t <= d_hi + 1e-9; t += d_tick) {
    out << fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"black\"/>\n",
                       sx(t), top + ph, top + ph + 5);
    out << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"12\" "
                       "text-anchor=\"middle\">{}</text>\n",
                       sx(t), top + ph + 20, fmt::format("{:g}", t));
  }
  for (double t = 0.0; t <= y_hi + 1e-9; t += y_tick) {
    out << fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"black\"/>\n",
                       left - 5, sy(t), left);
    out << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"12\" "
                       "text-anchor=\"end\">{}</text>\n",
                       left - 8, sy(t) + 4, fmt::format("{:g}", t));
  }
  out << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"16\" "
                     "text-anchor=\"middle\">d</text>\n",
                     left + pw / 2, H - 20);
  out << fmt::format("<text x=\"20\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"16\" "
                     "text-anchor=\"middle\">x</text>\n",
                     top + ph / 2);

  // one polyline per contiguous run of rows with real roots
  auto curve = [&](auto pick, const char* color) {
    std::string pts;
    auto flush = [&] {
      if (!pts.empty()) {
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << pts << "\"/>\n";
        pts.clear();
      }
    };
    for (const auto& r : rows) {
      const std::optional<double> y = pick(r);
      if (!y) {
        flush();
        continue;
      }
      pts += fmt::format("{}{:.2f},{:.2f}", pts.empty() ? "" : " ", sx(r.d), sy(*y));
    }
    flush();
  };
  curve([](const SweepRow& r) { return r.x_minus; }, "#1f77b4");
  curve([](const SweepRow& r) { return r.x_plus; }, "#d62728");

  // legend
  const double lx = left + pw + 20;
  out << fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n",
                     lx, top + 20, lx + 30);
  out << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"14\">x-</text>\n",
                     lx + 38, top + 25);
  out << fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"#d62728\" stroke-width=\"2\"/>\n",
                     lx, top + 45, lx + 30);
  out << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"14\">x+</text>\n",
                     lx + 38, top + 50);
  out << "</svg>\n";
}

}  // namespace combtn
