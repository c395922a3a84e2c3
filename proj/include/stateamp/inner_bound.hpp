#pragma once

// Achievable (R, D) pairs of the hybrid analog + Gelfand-Pinsker scheme.
//
// For a power split beta, the sender transmits X = g*Vt + Xt with
// g = sqrt((1-beta)P/Qp) and Xt ~ N(0, beta*P) carried by the auxiliary
// U = Xt + alpha*(1+g)*Vt. The receiver decodes U and estimates S linearly
// from (Y, U).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stateamp/detail/parallel.hpp"
#include "stateamp/model.hpp"
#include "stateamp/scalar_search.hpp"

namespace stateamp {

struct InnerParams {
  double alpha = 0.0;
  double beta = 0.0;

  void validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("InnerParams: alpha must be >= 0");
    if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("InnerParams: beta must be in [0, 1]");
  }
};

inline double analog_gain(const DerivedParams& dp, const ChannelParams& cp, double beta) {
  return std::sqrt((1.0 - beta) * cp.P / dp.Qp);
}

// r = Cov(S, [Y, U]) and Sigma = Cov([Y, U]).
struct SchemeStatistics {
  double g = 0.0;
  std::array<double, 2> r{};
  SmallMatrix Sigma{2};
};

inline SchemeStatistics scheme_statistics(const DerivedParams& dp, const ChannelParams& cp,
                                          const InnerParams& ip) {
  ip.validate();
  SchemeStatistics st;
  st.g = analog_gain(dp, cp, ip.beta);
  const double k = 1.0 + st.g;
  const double bp = ip.beta * cp.P;
  st.r = {k * dp.Qp + dp.Np, ip.alpha * k * dp.Qp};
  st.Sigma(0, 0) = k * k * dp.Qp + bp + dp.Np + cp.N;
  st.Sigma(0, 1) = bp + ip.alpha * k * k * dp.Qp;
  st.Sigma(1, 0) = st.Sigma(0, 1);
  st.Sigma(1, 1) = bp + ip.alpha * ip.alpha * k * k * dp.Qp;
  return st;
}

// Index layout of scheme_joint().
enum SchemeVar : std::size_t { kVt = 0, kS = 1, kY = 2, kU = 3 };

// Full covariance of (Vt, S, Y, U) built from the independent components
// Vt, Xt, W, Z. Independent of scheme_statistics; used to cross-check it.
inline GaussianJoint scheme_joint(const DerivedParams& dp, const ChannelParams& cp, const InnerParams& ip) {
  ip.validate();
  const double k = 1.0 + analog_gain(dp, cp, ip.beta);
  // Columns: loadings on (Vt, Xt, W, Z).
  const std::array<std::array<double, 4>, 4> load = {{
      {1.0, 0.0, 0.0, 0.0},            // Vt
      {1.0, 0.0, 1.0, 0.0},            // S = Vt + W
      {k, 1.0, 1.0, 1.0},              // Y = (1+g)Vt + Xt + W + Z
      {ip.alpha * k, 1.0, 0.0, 0.0},   // U = Xt + alpha(1+g)Vt
  }};
  const std::array<double, 4> var = {dp.Qp, ip.beta * cp.P, dp.Np, cp.N};
  SmallMatrix cov(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < 4; ++c) s += load[i][c] * load[j][c] * var[c];
      cov(i, j) = s;
    }
  return GaussianJoint(cov);
}

// Right-hand side of the rate condition, unclamped. Returns -inf when the
// auxiliary carries no message component (beta*P = 0, alpha > 0); returns 0
// for the trivial auxiliary U = 0 (beta*P = 0, alpha = 0).
inline double raw_rate(const DerivedParams& dp, const ChannelParams& cp, const InnerParams& ip) {
  const double g = analog_gain(dp, cp, ip.beta);
  const double a = (1.0 + g) * (1.0 + g) * dp.Qp;
  const double b = ip.beta * cp.P;
  const double c = dp.Np + cp.N;
  if (b == 0.0) return ip.alpha == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  const double num = b * (b + a + c);
  const double den = c * (b + ip.alpha * ip.alpha * a) + (1.0 - ip.alpha) * (1.0 - ip.alpha) * b * a;
  return half_log(num / den);
}

struct InnerPoint {
  InnerParams params;
  double g = 0.0;
  double rate = 0.0;       // clamped at 0
  double raw_rate = 0.0;   // unclamped rate-condition value
  double distortion = 0.0;
  bool degenerate = false; // Sigma singular; U dropped from the estimate
  // raw_rate >= 0: the receiver can actually decode U, so the distortion is
  // attainable. Clamped points with raw_rate < 0 are reported but are not
  // achievable and never enter the frontier.
  bool decodable = true;
};

// Pass a non-null `degenerate` to learn whether U had to be dropped.
inline double distortion_of(const SchemeStatistics& st, const DerivedParams& dp, bool* degenerate = nullptr) {
  const double total = dp.Qp + dp.Np;
  const auto& s = st.Sigma;
  const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
  const double tr = s.trace();
  double explained;
  bool dropped = false;
  if (!(det > kSingularTol * tr * tr)) {
    explained = st.r[0] * st.r[0] / s(0, 0);
    dropped = true;
  } else {
    explained = (st.r[0] * st.r[0] * s(1, 1) - 2.0 * st.r[0] * st.r[1] * s(0, 1) + st.r[1] * st.r[1] * s(0, 0)) / det;
  }
  if (degenerate) *degenerate = dropped;
  return std::clamp(total - explained, 0.0, total);
}

inline InnerPoint evaluate(const DerivedParams& dp, const ChannelParams& cp, const InnerParams& ip) {
  const SchemeStatistics st = scheme_statistics(dp, cp, ip);
  InnerPoint pt;
  pt.params = ip;
  pt.g = st.g;
  pt.raw_rate = raw_rate(dp, cp, ip);
  pt.rate = pt.raw_rate > 0.0 ? pt.raw_rate : 0.0;
  pt.decodable = pt.raw_rate >= 0.0;
  pt.distortion = distortion_of(st, dp, &pt.degenerate);
  return pt;
}

// Dirty-paper coefficient for the message part of the power.
inline double costa_alpha(const ChannelParams& cp, double beta) {
  const double bp = beta * cp.P;
  return bp / (bp + cp.N);
}

// Coefficient at which U carries no information about S beyond Y. Empty
// when the denominator vanishes or is negative.
inline std::optional<double> u_useless_alpha(const DerivedParams& dp, const ChannelParams& cp, double beta) {
  const double g = analog_gain(dp, cp, beta);
  const double bp = beta * cp.P;
  const double denom = (1.0 + g) * dp.Qp * (bp + cp.N - g * dp.Np);
  if (!(denom > 0.0)) return std::nullopt;
  return bp * ((1.0 + g) * dp.Qp + dp.Np) / denom;
}

// Rate-maximizing coefficient: the rate denominator is a convex quadratic in
// alpha with its minimum here.
inline double rate_optimal_alpha(const DerivedParams& dp, const ChannelParams& cp, double beta) {
  const double bp = beta * cp.P;
  if (bp == 0.0) return 0.0;
  return bp / (bp + cp.N + dp.Np);
}

inline double max_rate_at_beta(const DerivedParams& dp, const ChannelParams& cp, double beta) {
  return half_log(1.0 + beta * cp.P / (cp.N + dp.Np));
}

// Set of alpha >= 0 whose rate condition is at least `rate`, or empty.
inline std::optional<std::pair<double, double>> alpha_interval_for_rate(const DerivedParams& dp,
                                                                        const ChannelParams& cp,
                                                                        double beta, double rate) {
  const double b = beta * cp.P;
  if (b == 0.0) {
    if (rate <= 0.0) return std::make_pair(0.0, 0.0);
    return std::nullopt;
  }
  const double g = analog_gain(dp, cp, beta);
  const double a = (1.0 + g) * (1.0 + g) * dp.Qp;
  const double c = dp.Np + cp.N;
  const double num = b * (b + a + c);
  // den(alpha) = A (alpha - center)^2 + den_min
  const double A = a * (b + c);
  const double center = b / (b + c);
  const double den_min = c * b + a * b * c / (b + c);
  const double slack = num / rate_exp(rate) - den_min;
  if (slack < -1e-12 * den_min) return std::nullopt;
  const double half_width = std::sqrt(std::max(0.0, slack) / A);
  const double lo = std::max(0.0, center - half_width);
  const double hi = center + half_width;
  return std::make_pair(lo, hi);
}

struct FrontierConfig {
  std::size_t beta_points = 512;
  std::size_t rate_targets = 512;
  std::size_t alpha_scan = 33;
  double alpha_width = 1e-8;
  double prune_tol = 1e-10;
};

// Smallest distortion over alpha at fixed beta subject to rate >= `rate`.
inline std::optional<InnerPoint> min_distortion_at_rate(const DerivedParams& dp, const ChannelParams& cp,
                                                        double beta, double rate,
                                                        const FrontierConfig& cfg = {}) {
  const auto interval = alpha_interval_for_rate(dp, cp, beta, rate);
  if (!interval) return std::nullopt;
  const auto [lo, hi] = *interval;
  if (hi - lo <= cfg.alpha_width) return evaluate(dp, cp, {0.5 * (lo + hi), beta});
  const auto d_of = [&](double alpha) {
    const InnerParams ip{alpha, beta};
    return distortion_of(scheme_statistics(dp, cp, ip), dp);
  };
  const ScalarMinimum m = grid_then_golden(d_of, lo, hi, cfg.alpha_scan, cfg.alpha_width);
  return evaluate(dp, cp, {m.x, beta});
}

// Unconstrained minimizer of the distortion over alpha at fixed beta (the
// rate condition is ignored). Bracket [0, 4 max(1, costa)], doubled while the
// optimum sits on its upper edge.
inline InnerPoint min_distortion_alpha(const DerivedParams& dp, const ChannelParams& cp, double beta,
                                       const FrontierConfig& cfg = {}) {
  const auto d_of = [&](double alpha) {
    return distortion_of(scheme_statistics(dp, cp, {alpha, beta}), dp);
  };
  double hi = 4.0 * std::max(1.0, costa_alpha(cp, beta));
  ScalarMinimum m = grid_then_golden(d_of, 0.0, hi, cfg.alpha_scan, cfg.alpha_width);
  for (int widen = 0; widen < 16 && m.x > hi * (1.0 - 1.0 / static_cast<double>(cfg.alpha_scan)); ++widen) {
    hi *= 2.0;
    m = grid_then_golden(d_of, 0.0, hi, cfg.alpha_scan, cfg.alpha_width);
  }
  return evaluate(dp, cp, {m.x, beta});
}

// q dominates p when it is no worse in both coordinates and better in one,
// each comparison taken with tolerance `tol`.
inline bool dominates(const InnerPoint& q, const InnerPoint& p, double tol) {
  const bool no_worse = q.rate >= p.rate - tol && q.distortion <= p.distortion + tol;
  const bool better = q.rate > p.rate + tol || q.distortion < p.distortion - tol;
  return no_worse && better;
}

// Removes dominated points and near-duplicates; result sorted by rate.
inline std::vector<InnerPoint> pareto_prune(std::vector<InnerPoint> pts, double tol = 1e-10) {
  std::sort(pts.begin(), pts.end(), [](const InnerPoint& x, const InnerPoint& y) {
    if (x.rate != y.rate) return x.rate < y.rate;
    return x.distortion < y.distortion;
  });
  std::vector<InnerPoint> kept;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      if (j != i && dominates(pts[j], pts[i], tol)) dominated = true;
    }
    if (dominated) continue;
    if (!kept.empty() && std::abs(kept.back().rate - pts[i].rate) <= tol &&
        std::abs(kept.back().distortion - pts[i].distortion) <= tol) {
      continue;
    }
    kept.push_back(pts[i]);
  }
  return kept;
}

// Pareto frontier of all decodable (alpha, beta) choices.
//
// For each target rate, every beta on the grid contributes the smallest
// distortion reachable with rate >= target (alpha restricted to its
// closed-form feasible interval), and the best beta is refined by golden
// section between its grid neighbours. Targets are a uniform grid up to the
// largest achievable rate plus the rates of each beta's rate-maximizing and
// distortion-minimizing points, so those points are re-optimized over beta at
// their own rate instead of being kept as they are. Dominated points are
// pruned.
inline std::vector<InnerPoint> frontier(const DerivedParams& dp, const ChannelParams& cp,
                                        const FrontierConfig& cfg = {}) {
  if (cfg.beta_points < 2 || cfg.rate_targets < 2) {
    throw std::invalid_argument("frontier: grids need at least two points");
  }
  if (cp.P == 0.0) {
    return {evaluate(dp, cp, {0.0, 1.0})};
  }
  const std::vector<double> betas = linspace(0.0, 1.0, cfg.beta_points);
  const double top_rate = max_rate_at_beta(dp, cp, 1.0);

  std::vector<InnerPoint> per_beta(2 * betas.size());
  parallel_for(betas.size(), [&](std::size_t i) {
    const double beta = betas[i];
    per_beta[2 * i] = evaluate(dp, cp, {rate_optimal_alpha(dp, cp, beta), beta});
    per_beta[2 * i + 1] = *min_distortion_at_rate(dp, cp, beta, 0.0, cfg);
  });

  std::vector<double> targets = linspace(0.0, top_rate, cfg.rate_targets);
  for (const auto& p : per_beta)
    if (p.decodable && p.raw_rate > 0.0 && p.raw_rate < top_rate) targets.push_back(p.raw_rate);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  std::vector<InnerPoint> per_target(targets.size());
  std::vector<char> have(targets.size(), 0);
  const double inf = std::numeric_limits<double>::infinity();
  parallel_for(targets.size(), [&](std::size_t k) {
    const double rate = targets[k];
    const auto objective = [&](double beta) {
      const auto p = min_distortion_at_rate(dp, cp, beta, rate, cfg);
      return p ? p->distortion : inf;
    };
    std::size_t arg = betas.size();
    double best = inf;
    for (std::size_t i = 0; i < betas.size(); ++i) {
      if (max_rate_at_beta(dp, cp, betas[i]) < rate) continue;
      const double v = objective(betas[i]);
      if (v < best) {
        best = v;
        arg = i;
      }
    }
    if (arg == betas.size()) return;
    double beta_best = betas[arg];
    const double lo = betas[arg == 0 ? 0 : arg - 1];
    const double hi = betas[std::min(arg + 1, betas.size() - 1)];
    const ScalarMinimum m = golden_section_minimize(objective, lo, hi, 1e-10);
    if (m.value < best) beta_best = m.x;
    if (auto p = min_distortion_at_rate(dp, cp, beta_best, rate, cfg)) {
      per_target[k] = *p;
      have[k] = 1;
    }
  });

  std::vector<InnerPoint> candidates;
  candidates.reserve(per_beta.size() + per_target.size());
  for (const auto& p : per_beta)
    if (p.decodable) candidates.push_back(p);
  for (std::size_t k = 0; k < per_target.size(); ++k)
    if (have[k] && per_target[k].decodable) candidates.push_back(per_target[k]);
  return pareto_prune(std::move(candidates), cfg.prune_tol);
}

}  // namespace stateamp
