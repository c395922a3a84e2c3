#pragma once

// Self-check suite behind `stateamp validate`: Monte Carlo agreement of the
// achievable-scheme formulas, containment of the frontier in the outer
// region, and the structural properties of the converse bounds.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "stateamp/inner_bound.hpp"
#include "stateamp/model.hpp"
#include "stateamp/oracle.hpp"
#include "stateamp/outer_bounds.hpp"
#include "stateamp/philox.hpp"
#include "stateamp/region.hpp"

namespace stateamp {

struct ValidationOptions {
  ChannelParams channel{7.7, 10.0, 1.0, 1.0};
  RegionConfig region;
  std::size_t oracle_n = 1'000'000;
  std::size_t oracle_draws = 200;
  std::size_t appendix_trials = 1000;
  std::uint64_t seed = 1;
  // Test hook: scales the closed-form distortion before it is compared with
  // the Monte Carlo estimate. 1.0 in normal operation.
  double distortion_scale = 1.0;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  double deviation = 0.0;
  nlohmann::json detail = nlohmann::json::object();
};

struct RandomDraw {
  ChannelParams channel;
  InnerParams params;
};

// Log-uniform channel parameters and uniform (alpha, beta), reproducible from
// (seed, index).
inline RandomDraw random_draw(std::uint64_t seed, std::uint64_t index) {
  const auto u = [&](std::uint64_t k) { return uniform01(seed, 1, 8 * index + k); };
  const auto log_uniform = [](double x, double lo, double hi) { return lo * std::pow(hi / lo, x); };
  RandomDraw d;
  d.channel.P = log_uniform(u(0), 0.1, 100.0);
  d.channel.Q = log_uniform(u(1), 0.5, 20.0);
  d.channel.N = log_uniform(u(2), 0.1, 5.0);
  d.channel.sigma_u2 = log_uniform(u(3), 0.01, 10.0);
  d.params.alpha = 2.0 * u(4);
  d.params.beta = 0.05 + 0.95 * u(5);
  return d;
}

inline nlohmann::json draw_json(const RandomDraw& d) {
  return {{"P", d.channel.P}, {"Q", d.channel.Q}, {"N", d.channel.N}, {"sigma_u2", d.channel.sigma_u2},
          {"alpha", d.params.alpha}, {"beta", d.params.beta}};
}

inline std::vector<CheckResult> check_oracle_agreement(const ValidationOptions& opt) {
  CheckResult dist{"oracle_distortion"}, rate{"oracle_rate"}, identity{"mi_identity"}, power{"power_constraint"};
  std::size_t dist_ok = 0, rate_ok = 0, power_ok = 0;
  double max_zd = 0.0, max_zr = 0.0, max_zp = 0.0, max_id = 0.0;
  nlohmann::json dist_fail = nlohmann::json::array(), rate_fail = nlohmann::json::array();
  for (std::size_t i = 0; i < opt.oracle_draws; ++i) {
    const RandomDraw d = random_draw(opt.seed, i);
    const DerivedParams dp = derive(d.channel);
    const InnerPoint pt = evaluate(dp, d.channel, d.params);
    const SampleBatch batch = sample(dp, d.channel, d.params, opt.oracle_n, opt.seed * 1000003u + i);

    const EmpiricalEstimate est = empirical_mmse(batch, Column::S, {Column::Y, Column::U});
    const double zd = std::abs(est.residual - pt.distortion * opt.distortion_scale) / est.standard_error;
    max_zd = std::max(max_zd, zd);
    if (zd <= 3.0) ++dist_ok;
    else if (dist_fail.size() < 5) dist_fail.push_back(draw_json(d));

    const EmpiricalRate er = empirical_rate(batch);
    const double zr = std::abs(er.rate - pt.raw_rate) / er.standard_error;
    max_zr = std::max(max_zr, zr);
    if (zr <= 3.0) ++rate_ok;
    else if (rate_fail.size() < 5) rate_fail.push_back(draw_json(d));

    const GaussianJoint joint = scheme_joint(dp, d.channel, d.params);
    const double mi = gaussian_mi(joint, {kU}, {kY}) - gaussian_mi(joint, {kU}, {kVt});
    max_id = std::max(max_id, std::abs(mi - pt.raw_rate));

    const auto [pw, pw_se] = empirical_power(batch);
    const double zp = std::abs(pw - d.channel.P) / pw_se;
    max_zp = std::max(max_zp, zp);
    if (zp <= 4.0) ++power_ok;
  }
  const double n = static_cast<double>(std::max<std::size_t>(opt.oracle_draws, 1));
  dist.deviation = max_zd;
  dist.passed = dist_ok >= 0.99 * n;
  dist.detail = {{"within_3se", dist_ok}, {"draws", opt.oracle_draws}, {"n", opt.oracle_n}, {"failures", dist_fail}};
  rate.deviation = max_zr;
  rate.passed = rate_ok >= 0.99 * n;
  rate.detail = {{"within_3se", rate_ok}, {"draws", opt.oracle_draws}, {"n", opt.oracle_n}, {"failures", rate_fail}};
  identity.deviation = max_id;
  identity.passed = max_id <= 1e-9;
  identity.detail = {{"tolerance", 1e-9}};
  power.deviation = max_zp;
  power.passed = power_ok == opt.oracle_draws;
  power.detail = {{"within_4se", power_ok}, {"draws", opt.oracle_draws}};
  return {dist, rate, identity, power};
}

inline CheckResult check_containment(const ValidationOptions& opt) {
  CheckResult c{"containment"};
  try {
    const RegionReport rep = build_region(opt.channel, opt.region);
    c.passed = true;
    c.deviation = rep.min_gap;
    c.detail = {{"min_gap", rep.min_gap}, {"max_gap", rep.max_gap}, {"frontier_points", rep.inner.size()}};
  } catch (const ContainmentViolation& e) {
    c.passed = false;
    c.deviation = e.inner_distortion() - e.lower_bound();
    c.detail = {{"rate", e.rate()}, {"inner", e.inner_distortion()}, {"lower_bound", e.lower_bound()}};
  }
  return c;
}

inline CheckResult check_f_properties(const DerivedParams& dp) {
  CheckResult c{"f_properties"};
  const std::size_t m = 10000;
  const std::vector<double> xs = linspace(0.0, dp.Qp, m);
  double min_first = 0.0, min_second = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) min_first = std::min(min_first, f_func(dp, xs[i + 1]) - f_func(dp, xs[i]));
  for (std::size_t i = 1; i + 1 < m; ++i)
    min_second = std::min(min_second, f_func(dp, xs[i + 1]) - 2.0 * f_func(dp, xs[i]) + f_func(dp, xs[i - 1]));
  const double at_threshold = f_func(dp, dp.Qp * dp.Np / (dp.Qp + dp.Np));
  const double at_top = f_func(dp, dp.Qp);
  c.passed = min_first >= -1e-12 && min_second >= -1e-9 && at_threshold == 0.0 && at_top == dp.Qp;
  c.deviation = std::min(min_first, min_second);
  c.detail = {{"min_first_difference", min_first},
              {"min_second_difference", min_second},
              {"f_threshold", at_threshold},
              {"f_top_minus_Qp", at_top - dp.Qp}};
  return c;
}

// D = Var(S - Shat) against f(D') with D' the MMSE of Vt from Shat, for
// random linear estimators Shat = a Y + b U.
inline CheckResult check_appendix_inequality(const ValidationOptions& opt) {
  CheckResult c{"estimator_inequality"};
  std::size_t violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < opt.appendix_trials; ++i) {
    const RandomDraw d = random_draw(opt.seed + 7, i);
    const DerivedParams dp = derive(d.channel);
    const double a = 4.0 * uniform01(opt.seed + 7, 2, 2 * i) - 2.0;
    const double b = 4.0 * uniform01(opt.seed + 7, 2, 2 * i + 1) - 2.0;
    const GaussianJoint joint = scheme_joint(dp, d.channel, d.params);
    const GaussianJoint est = linear_transform(joint, {{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, a, b}, {0, 1, -a, -b}});
    const double D = est.var(3);
    const double Dp = mmse_given(est, 1, {2}).residual_variance;
    const double margin = D - f_func(dp, Dp);
    worst = std::min(worst, margin);
    if (margin < -1e-9) ++violations;
  }
  c.passed = violations == 0;
  c.deviation = worst;
  c.detail = {{"trials", opt.appendix_trials}, {"violations", violations}};
  return c;
}

inline CheckResult check_extreme_cases(const ValidationOptions& opt) {
  CheckResult c{"extreme_cases"};
  const ChannelParams& cp = opt.channel;
  const DerivedParams dp = derive(cp);

  const auto neg_rate = [&](double alpha) { return -raw_rate(dp, cp, {alpha, 1.0}); };
  const ScalarMinimum best = grid_then_golden(neg_rate, 0.0, 4.0, 401, 1e-12);
  const double dev_a = std::abs(-best.value - half_log(1.0 + cp.P / (cp.N + dp.Np)));

  const double dev_b =
      std::abs(evaluate(dp, cp, {1.0, 0.0}).distortion - dp.Np * cp.N / (dp.Np + cp.N));

  ChannelParams sharp = cp;
  sharp.sigma_u2 = 1e-9;
  const DerivedParams dps = derive(sharp);
  const auto neg_rate_sharp = [&](double alpha) { return -raw_rate(dps, sharp, {alpha, 1.0}); };
  const ScalarMinimum best_sharp = grid_then_golden(neg_rate_sharp, 0.0, 4.0, 401, 1e-12);
  const double dev_c = std::abs(-best_sharp.value - half_log(1.0 + cp.P / cp.N));

  ChannelParams perfect = cp;
  perfect.sigma_u2 = 0.0;
  const DerivedParams dpp = derive(perfect);
  double dev_d = 0.0;
  for (double beta : linspace(0.0, 1.0, 11)) {
    const auto ua = u_useless_alpha(dpp, perfect, beta);
    dev_d = std::max(dev_d, ua ? std::abs(*ua - costa_alpha(perfect, beta)) : 1.0);
  }

  c.passed = dev_a <= 1e-4 && dev_b <= 1e-9 && dev_c <= 1e-4 && dev_d <= 1e-9;
  c.deviation = std::max({dev_a, dev_b, dev_c, dev_d});
  c.detail = {{"full_message_rate", dev_a},
              {"uncoded_distortion", dev_b},
              {"perfect_observation_rate", dev_c},
              {"remark_reduction", dev_d}};
  return c;
}

inline std::vector<CheckResult> run_validation(const ValidationOptions& opt) {
  std::vector<CheckResult> out;
  const DerivedParams dp = derive(opt.channel);
  CheckResult ident{"derived_identity"};
  ident.deviation = std::abs(dp.Qp + dp.Np - opt.channel.Q) / opt.channel.Q;
  ident.passed = ident.deviation <= 1e-12;
  out.push_back(ident);
  for (auto& r : check_oracle_agreement(opt)) out.push_back(std::move(r));
  out.push_back(check_containment(opt));
  out.push_back(check_f_properties(dp));
  out.push_back(check_appendix_inequality(opt));
  out.push_back(check_extreme_cases(opt));
  return out;
}

inline nlohmann::json to_json(const std::vector<CheckResult>& checks) {
  nlohmann::json arr = nlohmann::json::array();
  bool all = true;
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name}, {"passed", c.passed}, {"deviation", c.deviation}, {"detail", c.detail}});
    all = all && c.passed;
  }
  return {{"passed", all}, {"checks", arr}};
}

}  // namespace stateamp
