#pragma once

// Converse bounds: the noise-partition bound (parameterized by a split of the
// channel noise, variance Nbar for one part) and the correlation-structure
// bound built on f. Both involve rbar = average |E[X V]|, which the code may
// choose; at a given rate the tightest admissible rbar is the largest one
// that still satisfies the rate inequality, obtained in closed form.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "stateamp/detail/parallel.hpp"
#include "stateamp/model.hpp"
#include "stateamp/scalar_search.hpp"

namespace stateamp {

struct NoisePartition {
  double Nbar = 0.0;

  void validate(const ChannelParams& cp) const {
    if (!(Nbar >= 0.0 && Nbar <= cp.N)) throw std::invalid_argument("NoisePartition: Nbar must be in [0, N]");
  }
};

struct CorrelationBound {
  double rbar = 0.0;

  void validate(const ChannelParams& cp) const {
    if (!(rbar >= 0.0 && rbar <= cp.max_correlation() * (1.0 + 1e-12)))
      throw std::invalid_argument("CorrelationBound: rbar must be in [0, sqrt(P (Q + sigma_u2))]");
  }
};

enum class BoundSource { kNoisePartition, kCorrelation, kCombined };

inline const char* to_string(BoundSource s) {
  switch (s) {
    case BoundSource::kNoisePartition:
      return "noise_partition";
    case BoundSource::kCorrelation:
      return "correlation";
    case BoundSource::kCombined:
      return "combined";
  }
  return "unknown";
}

struct OuterSample {
  double rate = 0.0;
  double distortion = 0.0;
};

// Lower envelope D_lb(R) sampled at increasing rates. Rates above
// `rate_limit` lie outside the outer region and carry no sample.
struct OuterCurve {
  BoundSource source = BoundSource::kCombined;
  std::vector<OuterSample> samples;
  double rate_limit = 0.0;
  std::size_t clamped_f_args = 0;
};

// ---------------------------------------------------------------------------
// Noise-partition bound

// MMSE of S from V = S + U_obs and S + Zbar.
inline double es(const ChannelParams& cp, const NoisePartition& np) {
  const double denom = cp.Q * np.Nbar + cp.Q * cp.sigma_u2 + np.Nbar * cp.sigma_u2;
  if (denom == 0.0) return 0.0;
  return cp.Q * np.Nbar * cp.sigma_u2 / denom;
}

// Rate bound; +inf at Nbar = N where the partition leaves no noise.
inline double thm2_rate_bound(const ChannelParams& cp, const NoisePartition& np, double rbar) {
  const double rest = cp.N - np.Nbar;
  if (rest <= 0.0) return std::numeric_limits<double>::infinity();
  const double qs = cp.Q + cp.sigma_u2;
  return half_log((qs * (cp.P + cp.N + es(cp, np)) - rbar * rbar) / (qs * rest));
}

// Distortion bound at rate R. Written as E_S plus the product of the
// coefficient and E_S with the common N̄σ_u² factor cancelled, so it stays
// finite (and continuous) at Nbar = 0 and sigma_u2 = 0.
inline double thm2_distortion_bound(const ChannelParams& cp, const DerivedParams& dp, const NoisePartition& np,
                                    double rbar, double rate) {
  const double e = es(cp, np);
  const double k = cp.P + cp.Q + cp.N + 2.0 * dp.lambda * rbar;
  const double qn = cp.Q * (np.Nbar + cp.sigma_u2);
  const double ratio = qn / (qn + np.Nbar * cp.sigma_u2);
  return e + rate_exp(rate) * cp.Q * (cp.N - np.Nbar) / k * ratio;
}

struct Thm2Point {
  double rate_max = 0.0;
  double distortion_lb = 0.0;
  bool feasible = true;  // rate <= rate_max
};

inline Thm2Point thm2_point(const ChannelParams& cp, const DerivedParams& dp, const NoisePartition& np,
                            const CorrelationBound& cb, double rate) {
  np.validate(cp);
  cb.validate(cp);
  Thm2Point out;
  out.rate_max = thm2_rate_bound(cp, np, cb.rbar);
  out.distortion_lb = thm2_distortion_bound(cp, dp, np, cb.rbar, rate);
  out.feasible = rate <= out.rate_max;
  return out;
}

// Largest rbar meeting the rate inequality at `rate`, capped at the
// Cauchy-Schwarz limit; empty when no rbar >= 0 qualifies.
inline std::optional<double> thm2_largest_feasible_rbar(const ChannelParams& cp, const NoisePartition& np,
                                                        double rate) {
  const double rmax = cp.max_correlation();
  const double rest = cp.N - np.Nbar;
  if (rest <= 0.0) return rmax;
  const double qs = cp.Q + cp.sigma_u2;
  const double budget = cp.P + cp.N + es(cp, np);
  const double cap = qs * (budget - rest * rate_exp(rate));
  if (cap < -1e-12 * qs * budget) return std::nullopt;
  return std::min(rmax, std::sqrt(std::max(0.0, cap)));
}

// min over admissible rbar of the distortion bound, for one partition.
inline std::optional<double> thm2_partition_bound(const ChannelParams& cp, const DerivedParams& dp,
                                                  const NoisePartition& np, double rate) {
  const auto rbar = thm2_largest_feasible_rbar(cp, np, rate);
  if (!rbar) return std::nullopt;
  return thm2_distortion_bound(cp, dp, np, *rbar, rate);
}

inline double thm2_rate_limit(const ChannelParams& cp) { return half_log(1.0 + cp.P / cp.N); }

struct EnvelopeConfig {
  std::size_t nbar_points = 1024;
  double nbar_width = 1e-12;
};

// max over Nbar of thm2_partition_bound. Empty when some partition admits no
// rbar, i.e. the rate is outside the region. The most restrictive partition is
// Nbar = 0, which is always on the grid.
inline std::optional<double> thm2_lower_bound(const ChannelParams& cp, const DerivedParams& dp, double rate,
                                              const EnvelopeConfig& cfg = {}) {
  const std::vector<double> grid = linspace(0.0, cp.N, std::max<std::size_t>(cfg.nbar_points, 2));
  double best = -std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto v = thm2_partition_bound(cp, dp, {grid[i]}, rate);
    if (!v) return std::nullopt;
    if (*v > best) {
      best = *v;
      arg = i;
    }
  }
  const double lo = grid[arg == 0 ? 0 : arg - 1];
  const double hi = grid[std::min(arg + 1, grid.size() - 1)];
  const auto neg = [&](double nbar) {
    const auto v = thm2_partition_bound(cp, dp, {std::clamp(nbar, 0.0, cp.N)}, rate);
    return v ? -*v : std::numeric_limits<double>::infinity();
  };
  const ScalarMinimum m = golden_section_minimize(neg, lo, hi, cfg.nbar_width);
  return std::max(best, -m.value);
}

// ---------------------------------------------------------------------------
// Correlation-structure bound

// f(x) = (sqrt(x) - sqrt(Np/Qp) sqrt(Qp - x))_+^2 on [0, Qp]. Arguments
// outside the domain are clamped and reported through `clamped`.
inline double f_func(const DerivedParams& dp, double x, bool* clamped = nullptr) {
  bool out_of_domain = false;
  if (x < 0.0 || x > dp.Qp || std::isnan(x)) {
    out_of_domain = true;
    x = std::isnan(x) ? 0.0 : std::clamp(x, 0.0, dp.Qp);
  }
  if (clamped) *clamped = out_of_domain;
  const double threshold = dp.Qp * dp.Np / (dp.Qp + dp.Np);
  if (x <= threshold) return 0.0;
  const double ratio = dp.Np / dp.Qp;
  // Expanded square: exact at x = Qp and for Np = 0.
  const double v = x + ratio * (dp.Qp - x) - 2.0 * std::sqrt(ratio) * std::sqrt(x * (dp.Qp - x));
  return std::max(0.0, v);
}

inline double thm3_rate_bound(const ChannelParams& cp, const DerivedParams& dp, double rbar) {
  const double s2 = cp.sigma_u2;
  return half_log((s2 * (cp.N + cp.P + cp.Q) + cp.Q * (cp.N + cp.P) - rbar * rbar) /
                  ((cp.Q + s2) * (cp.N + dp.Np)));
}

// f argument of the distortion bound at (rbar, rate).
inline double thm3_f_argument(const ChannelParams& cp, const DerivedParams& dp, double rbar, double rate) {
  return dp.Qp * (cp.N + dp.Np) * rate_exp(rate) / (cp.P + cp.Q + cp.N + 2.0 * dp.lambda * rbar);
}

// Distortion bound at a given rbar; empty when (rbar, rate) violates the
// rate inequality.
inline std::optional<double> thm3_point(const ChannelParams& cp, const DerivedParams& dp,
                                        const CorrelationBound& cb, double rate, bool* clamped = nullptr) {
  cb.validate(cp);
  if (rate > thm3_rate_bound(cp, dp, cb.rbar)) return std::nullopt;
  return f_func(dp, thm3_f_argument(cp, dp, cb.rbar, rate), clamped);
}

inline std::optional<double> thm3_largest_feasible_rbar(const ChannelParams& cp, const DerivedParams& dp,
                                                        double rate) {
  const double s2 = cp.sigma_u2;
  const double budget = s2 * (cp.N + cp.P + cp.Q) + cp.Q * (cp.N + cp.P);
  const double cap = budget - (cp.Q + s2) * (cp.N + dp.Np) * rate_exp(rate);
  if (cap < -1e-12 * budget) return std::nullopt;
  return std::min(cp.max_correlation(), std::sqrt(std::max(0.0, cap)));
}

inline std::optional<double> thm3_lower_bound(const ChannelParams& cp, const DerivedParams& dp, double rate,
                                              bool* clamped = nullptr) {
  const auto rbar = thm3_largest_feasible_rbar(cp, dp, rate);
  if (!rbar) return std::nullopt;
  return f_func(dp, thm3_f_argument(cp, dp, *rbar, rate), clamped);
}

// Reduces to (1/2) log(1 + P / (N + Np)).
inline double thm3_rate_limit(const ChannelParams& cp, const DerivedParams& dp) {
  return thm3_rate_bound(cp, dp, 0.0);
}

// ---------------------------------------------------------------------------
// Envelopes

inline std::vector<double> outer_rate_grid(const ChannelParams& cp, const DerivedParams& dp,
                                           std::size_t samples = 400) {
  if (samples < 2) throw std::invalid_argument("outer_rate_grid: need at least two samples");
  return linspace(0.0, std::max(thm2_rate_limit(cp), thm3_rate_limit(cp, dp)), samples);
}

inline OuterCurve thm2_envelope(const ChannelParams& cp, const DerivedParams& dp, const std::vector<double>& rates,
                                const EnvelopeConfig& cfg = {}) {
  if (rates.empty()) throw std::invalid_argument("thm2_envelope: empty rate grid");
  std::vector<std::optional<double>> values(rates.size());
  parallel_for(rates.size(), [&](std::size_t i) { values[i] = thm2_lower_bound(cp, dp, rates[i], cfg); });
  OuterCurve curve;
  curve.source = BoundSource::kNoisePartition;
  curve.rate_limit = thm2_rate_limit(cp);
  for (std::size_t i = 0; i < rates.size(); ++i)
    if (values[i]) curve.samples.push_back({rates[i], *values[i]});
  return curve;
}

inline OuterCurve thm3_envelope(const ChannelParams& cp, const DerivedParams& dp, const std::vector<double>& rates) {
  if (rates.empty()) throw std::invalid_argument("thm3_envelope: empty rate grid");
  OuterCurve curve;
  curve.source = BoundSource::kCorrelation;
  curve.rate_limit = thm3_rate_limit(cp, dp);
  for (double rate : rates) {
    bool clamped = false;
    if (auto v = thm3_lower_bound(cp, dp, rate, &clamped)) {
      curve.samples.push_back({rate, *v});
      if (clamped) ++curve.clamped_f_args;
    }
  }
  return curve;
}

// Piecewise-linear value of a curve at `rate`; empty outside its samples.
inline std::optional<double> interpolate(const OuterCurve& curve, double rate) {
  const auto& s = curve.samples;
  if (s.empty() || rate < s.front().rate || rate > s.back().rate) return std::nullopt;
  const auto it = std::lower_bound(s.begin(), s.end(), rate,
                                   [](const OuterSample& a, double r) { return a.rate < r; });
  if (it->rate == rate || it == s.begin()) return it->distortion;
  const auto prev = it - 1;
  const double w = (rate - prev->rate) / (it->rate - prev->rate);
  return prev->distortion + w * (it->distortion - prev->distortion);
}

// Pointwise maximum on the shared feasible rate range. Curves sampled on
// different grids are merged onto the union of their rates.
inline OuterCurve combined_outer(const OuterCurve& a, const OuterCurve& b) {
  OuterCurve out;
  out.source = BoundSource::kCombined;
  out.rate_limit = std::min(a.rate_limit, b.rate_limit);
  out.clamped_f_args = a.clamped_f_args + b.clamped_f_args;
  std::vector<double> rates;
  for (const auto& s : a.samples) rates.push_back(s.rate);
  for (const auto& s : b.samples) rates.push_back(s.rate);
  std::sort(rates.begin(), rates.end());
  rates.erase(std::unique(rates.begin(), rates.end()), rates.end());
  for (double r : rates) {
    const auto va = interpolate(a, r);
    const auto vb = interpolate(b, r);
    if (va && vb) out.samples.push_back({r, std::max(*va, *vb)});
  }
  return out;
}

}  // namespace stateamp
