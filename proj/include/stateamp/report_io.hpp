#pragma once

// Serialization of a RegionReport: CSV table, hand-emitted SVG plot and a
// JSON tree. Rates are written in the requested logarithm base.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stateamp/philox.hpp"
#include "stateamp/region.hpp"

namespace stateamp {

// Free-form provenance lines copied into every output file.
struct Provenance {
  std::vector<std::string> lines;
};

inline std::string fmt12(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string rate_column_name(double log_base) {
  if (log_base == 2.0) return "R_bits";
  if (std::abs(log_base - std::exp(1.0)) < 1e-12) return "R_nats";
  return "R_log" + fmt12(log_base);
}

// ---------------------------------------------------------------------------
// CSV

inline void write_region_csv(std::ostream& os, const RegionReport& rep, const Provenance& prov,
                             double log_base = kRateLogBase) {
  for (const auto& l : prov.lines) os << "# " << l << "\n";
  os << rate_column_name(log_base) << ",D_inner,D_outer2,D_outer3,D_combined\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  for (const auto& row : rep.rows) {
    os << fmt12(convert_rate(row.rate, log_base)) << ',' << fmt12(row.inner.value_or(nan)) << ','
       << fmt12(row.outer2.value_or(inf)) << ',' << fmt12(row.outer3.value_or(inf)) << ','
       << fmt12(row.combined.value_or(inf)) << '\n';
  }
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Reads a comma-separated numeric table, skipping '#' comment lines.
inline CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    if (cells.size() != t.header.size()) throw std::runtime_error("read_csv: ragged row: " + line);
    std::vector<double> vals;
    for (const auto& c : cells) vals.push_back(std::strtod(c.c_str(), nullptr));
    t.rows.push_back(std::move(vals));
  }
  return t;
}

// ---------------------------------------------------------------------------
// SVG

namespace detail {

inline double nice_step(double span, int target_ticks) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / target_ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double m = norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0;
  return m * mag;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

struct SvgSeries {
  std::string name;
  std::string style;
  std::vector<std::pair<double, double>> pts;
};

}  // namespace detail

inline constexpr int kSvgWidth = 800;
inline constexpr int kSvgHeight = 600;

inline void write_region_svg(std::ostream& os, const RegionReport& rep, const Provenance& prov,
                             double log_base = kRateLogBase) {
  using detail::SvgSeries;
  std::vector<SvgSeries> series(4);
  series[0] = {"inner: analog + Gelfand-Pinsker", "stroke:#000000;stroke-width:2", {}};
  series[1] = {"outer: noise partition", "stroke:#1f5fbf;stroke-width:1.5;stroke-dasharray:8,4", {}};
  series[2] = {"outer: correlation structure", "stroke:#c0392b;stroke-width:1.5;stroke-dasharray:3,3", {}};
  series[3] = {"outer: combined", "stroke:#7f7f7f;stroke-width:3;stroke-opacity:0.5", {}};

  for (const auto& p : rep.inner) series[0].pts.emplace_back(convert_rate(p.rate, log_base), p.distortion);
  for (const auto& row : rep.rows) {
    const double r = convert_rate(row.rate, log_base);
    if (row.outer2) series[1].pts.emplace_back(r, *row.outer2);
    if (row.outer3) series[2].pts.emplace_back(r, *row.outer3);
    if (row.combined) series[3].pts.emplace_back(r, *row.combined);
  }

  double xmax = 0.0, ymax = 0.0;
  for (const auto& s : series)
    for (const auto& [x, y] : s.pts) {
      xmax = std::max(xmax, x);
      ymax = std::max(ymax, y);
    }
  const double xstep = detail::nice_step(xmax > 0 ? xmax : 1.0, 6);
  const double ystep = detail::nice_step(ymax > 0 ? ymax : 1.0, 6);
  xmax = std::max(xstep, std::ceil(xmax / xstep - 1e-9) * xstep);
  ymax = std::max(ystep, std::ceil(ymax / ystep - 1e-9) * ystep);

  const double left = 80, right = 30, top = 30, bottom = 70;
  const double pw = kSvgWidth - left - right, ph = kSvgHeight - top - bottom;
  const auto sx = [&](double x) { return left + pw * x / xmax; };
  const auto sy = [&](double y) { return top + ph * (1.0 - y / ymax); };

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  for (const auto& l : prov.lines) os << "<!-- " << detail::xml_escape(l) << " -->\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kSvgWidth << ' ' << kSvgHeight
     << "\" width=\"" << kSvgWidth << "\" height=\"" << kSvgHeight << "\" font-family=\"sans-serif\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << kSvgWidth << "\" height=\"" << kSvgHeight << "\" fill=\"white\"/>\n";
  os << "<g id=\"axes\" stroke=\"#000000\" stroke-width=\"1\">\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph << "\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph << "\"/>\n";
  os << "</g>\n<g id=\"ticks\" font-size=\"12\">\n";
  for (int i = 0; i * xstep <= xmax + 1e-12; ++i) {
    const double x = i * xstep;
    os << "<line x1=\"" << fmt12(sx(x)) << "\" y1=\"" << top + ph << "\" x2=\"" << fmt12(sx(x)) << "\" y2=\""
       << top + ph + 5 << "\" stroke=\"#000000\"/>\n";
    os << "<text x=\"" << fmt12(sx(x)) << "\" y=\"" << top + ph + 20 << "\" text-anchor=\"middle\">" << fmt12(x)
       << "</text>\n";
  }
  for (int i = 0; i * ystep <= ymax + 1e-12; ++i) {
    const double y = i * ystep;
    os << "<line x1=\"" << left - 5 << "\" y1=\"" << fmt12(sy(y)) << "\" x2=\"" << left << "\" y2=\"" << fmt12(sy(y))
       << "\" stroke=\"#000000\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << fmt12(sy(y) + 4) << "\" text-anchor=\"end\">" << fmt12(y)
       << "</text>\n";
  }
  os << "</g>\n";
  const std::string unit = log_base == 2.0 ? "bits/use" : "log" + fmt12(log_base) + " units/use";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << kSvgHeight - 20 << "\" text-anchor=\"middle\" font-size=\"14\">R ["
     << detail::xml_escape(unit) << "]</text>\n";
  os << "<text x=\"20\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 "
     << top + ph / 2 << ")\">D</text>\n";

  os << "<g id=\"curves\" fill=\"none\">\n";
  for (const auto& s : series) {
    os << "<polyline class=\"curve\" data-name=\"" << detail::xml_escape(s.name) << "\" style=\"" << s.style
       << "\" points=\"";
    for (std::size_t i = 0; i < s.pts.size(); ++i)
      os << (i ? " " : "") << fmt12(sx(s.pts[i].first)) << ',' << fmt12(sy(s.pts[i].second));
    os << "\"/>\n";
  }
  os << "</g>\n<g id=\"legend\" font-size=\"12\">\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = top + 15 + 18 * static_cast<double>(i);
    const double x0 = left + pw - 230;
    os << "<line x1=\"" << x0 << "\" y1=\"" << y << "\" x2=\"" << x0 + 30 << "\" y2=\"" << y << "\" style=\""
       << series[i].style << "\"/>\n";
    os << "<text x=\"" << x0 + 38 << "\" y=\"" << y + 4 << "\">" << detail::xml_escape(series[i].name) << "</text>\n";
  }
  os << "</g>\n</svg>\n";
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const ChannelParams& cp) {
  return {{"P", cp.P}, {"Q", cp.Q}, {"N", cp.N}, {"sigma_u2", cp.sigma_u2}};
}

inline nlohmann::json to_json(const DerivedParams& dp) {
  return {{"Qp", dp.Qp}, {"Np", dp.Np}, {"lambda", dp.lambda}};
}

inline nlohmann::json to_json(const InnerPoint& p, double log_base = kRateLogBase) {
  return {{"alpha", p.params.alpha},
          {"beta", p.params.beta},
          {"g", p.g},
          {"rate", convert_rate(p.rate, log_base)},
          {"distortion", p.distortion},
          {"degenerate", p.degenerate},
          {"decodable", p.decodable}};
}

inline nlohmann::json to_json(const OuterCurve& c, double log_base = kRateLogBase) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : c.samples) samples.push_back({convert_rate(s.rate, log_base), s.distortion});
  return {{"source", to_string(c.source)},
          {"rate_limit", convert_rate(c.rate_limit, log_base)},
          {"clamped_f_args", c.clamped_f_args},
          {"samples", samples}};
}

inline nlohmann::json to_json(const RegionReport& rep, double log_base = kRateLogBase) {
  nlohmann::json inner = nlohmann::json::array();
  for (const auto& p : rep.inner) inner.push_back(to_json(p, log_base));
  const auto opt = [](const std::optional<double>& v) -> nlohmann::json { return v ? nlohmann::json(*v) : nullptr; };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"rate", convert_rate(r.rate, log_base)},
                    {"inner", opt(r.inner)},
                    {"outer2", opt(r.outer2)},
                    {"outer3", opt(r.outer3)},
                    {"combined", opt(r.combined)},
                    {"gap", opt(r.gap)}});
  }
  const auto& c = rep.config;
  return {{"channel", to_json(rep.channel)},
          {"derived", to_json(rep.derived)},
          {"regime", to_string(rep.regime)},
          {"inner", inner},
          {"outer2", to_json(rep.outer2, log_base)},
          {"outer3", to_json(rep.outer3, log_base)},
          {"combined", to_json(rep.combined, log_base)},
          {"gap", {{"max", rep.max_gap}, {"min", rep.min_gap}}},
          {"rows", rows},
          {"metadata",
           {{"beta_grid", c.frontier.beta_points},
            {"rate_targets", c.frontier.rate_targets},
            {"nbar_grid", c.envelope.nbar_points},
            {"r_samples", c.rate_samples},
            {"convexify", c.convexify},
            {"seed", c.seed},
            {"generator", Philox4x32::kName},
            {"log_base", log_base}}}};
}

}  // namespace stateamp
