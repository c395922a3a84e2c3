#pragma once

// Puts the achievable frontier and the converse envelopes on one rate grid,
// checks that the former lies inside the latter, and classifies the regime.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stateamp/inner_bound.hpp"
#include "stateamp/model.hpp"
#include "stateamp/outer_bounds.hpp"

namespace stateamp {

enum class Regime { kLowPower, kHighPower };

inline const char* to_string(Regime r) { return r == Regime::kHighPower ? "high-power" : "low-power"; }

struct RegionConfig {
  FrontierConfig frontier;
  EnvelopeConfig envelope;
  std::size_t rate_samples = 400;
  bool convexify = false;
  double rate_tol = 1e-6;         // regime threshold, bits
  double containment_tol = 1e-9;
  std::uint64_t seed = 0;         // recorded in the report only
};

class ContainmentViolation : public std::runtime_error {
 public:
  ContainmentViolation(double rate, double d_inner, double d_lb)
      : std::runtime_error("containment violated at R=" + std::to_string(rate) + ": D_inner=" +
                           std::to_string(d_inner) + " < D_lb=" + std::to_string(d_lb)),
        rate_(rate),
        d_inner_(d_inner),
        d_lb_(d_lb) {}

  double rate() const { return rate_; }
  double inner_distortion() const { return d_inner_; }
  double lower_bound() const { return d_lb_; }

 private:
  double rate_, d_inner_, d_lb_;
};

struct RegionRow {
  double rate = 0.0;
  std::optional<double> inner;     // empty above the largest achievable rate
  std::optional<double> outer2;    // empty outside the respective outer region
  std::optional<double> outer3;
  std::optional<double> combined;
  std::optional<double> gap;       // inner - combined, where both exist
};

struct RegionReport {
  ChannelParams channel;
  DerivedParams derived;
  RegionConfig config;
  std::vector<InnerPoint> inner;
  OuterCurve outer2, outer3, combined;
  std::vector<RegionRow> rows;
  Regime regime = Regime::kLowPower;
  double max_gap = 0.0;
  double min_gap = 0.0;
};

// High-power iff the minimum-distortion frontier point carries a positive rate.
// Points tied with the minimum (within 1e-10) count; the largest rate wins.
inline Regime regime_detect(const std::vector<InnerPoint>& frontier_pts, double rate_tol = 1e-6) {
  if (frontier_pts.empty()) throw std::invalid_argument("regime_detect: empty frontier");
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& p : frontier_pts) dmin = std::min(dmin, p.distortion);
  double rate_at_min = 0.0;
  for (const auto& p : frontier_pts)
    if (p.distortion <= dmin + 1e-10) rate_at_min = std::max(rate_at_min, p.rate);
  return rate_at_min > rate_tol ? Regime::kHighPower : Regime::kLowPower;
}

// Lower convex hull of a rate-sorted frontier (time sharing between points).
inline std::vector<InnerPoint> convexify(const std::vector<InnerPoint>& pts) {
  std::vector<InnerPoint> hull;
  for (const auto& p : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const double cross = (b.rate - a.rate) * (p.distortion - a.distortion) -
                           (b.distortion - a.distortion) * (p.rate - a.rate);
      if (cross <= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(p);
  }
  return hull;
}

// Smallest achievable distortion at `rate` given frontier points sorted by
// rate. Without time sharing this is the first point at or above `rate`;
// with it, the chord between the neighbouring hull vertices.
inline std::optional<double> inner_distortion_at(const std::vector<InnerPoint>& pts, double rate,
                                                 bool time_sharing) {
  if (pts.empty() || rate > pts.back().rate) return std::nullopt;
  const auto it = std::lower_bound(pts.begin(), pts.end(), rate,
                                   [](const InnerPoint& p, double r) { return p.rate < r; });
  if (!time_sharing || it == pts.begin() || it->rate == rate) return it->distortion;
  const auto prev = it - 1;
  const double w = (rate - prev->rate) / (it->rate - prev->rate);
  return prev->distortion + w * (it->distortion - prev->distortion);
}

inline RegionReport build_region(const ChannelParams& cp, const RegionConfig& cfg = {}) {
  if (cfg.rate_samples < 2) throw std::invalid_argument("build_region: rate_samples must be >= 2");
  RegionReport rep;
  rep.channel = cp;
  rep.derived = derive(cp);
  rep.config = cfg;
  const DerivedParams& dp = rep.derived;

  rep.inner = frontier(dp, cp, cfg.frontier);
  if (cfg.convexify) rep.inner = convexify(rep.inner);

  std::vector<double> grid = outer_rate_grid(cp, dp, cfg.rate_samples);
  for (const auto& p : rep.inner) grid.push_back(p.rate);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  rep.outer2 = thm2_envelope(cp, dp, grid, cfg.envelope);
  rep.outer3 = thm3_envelope(cp, dp, grid);
  rep.combined = combined_outer(rep.outer2, rep.outer3);

  const auto lookup = [](const OuterCurve& c, double r) -> std::optional<double> {
    const auto it = std::lower_bound(c.samples.begin(), c.samples.end(), r,
                                     [](const OuterSample& s, double x) { return s.rate < x; });
    if (it == c.samples.end() || it->rate != r) return std::nullopt;
    return it->distortion;
  };

  // Every frontier point must sit inside the outer region.
  for (const auto& p : rep.inner) {
    const auto lb = lookup(rep.combined, p.rate);
    if (!lb) throw ContainmentViolation(p.rate, p.distortion, std::numeric_limits<double>::infinity());
    if (p.distortion < *lb - cfg.containment_tol) throw ContainmentViolation(p.rate, p.distortion, *lb);
  }

  rep.max_gap = -std::numeric_limits<double>::infinity();
  rep.min_gap = std::numeric_limits<double>::infinity();
  rep.rows.reserve(grid.size());
  for (double r : grid) {
    RegionRow row;
    row.rate = r;
    row.inner = inner_distortion_at(rep.inner, r, cfg.convexify);
    row.outer2 = lookup(rep.outer2, r);
    row.outer3 = lookup(rep.outer3, r);
    row.combined = lookup(rep.combined, r);
    if (row.inner && row.combined) {
      row.gap = *row.inner - *row.combined;
      if (*row.gap < -cfg.containment_tol) throw ContainmentViolation(r, *row.inner, *row.combined);
      rep.max_gap = std::max(rep.max_gap, *row.gap);
      rep.min_gap = std::min(rep.min_gap, *row.gap);
    }
    rep.rows.push_back(row);
  }
  rep.regime = regime_detect(rep.inner, cfg.rate_tol);
  return rep;
}

}  // namespace stateamp
