// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if all
// of them pass. Tolerances are fixed below and never adjusted at run time.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "commands.hpp"
#include "oracles.hpp"
#include "stateamp/inner_bound.hpp"
#include "stateamp/outer_bounds.hpp"
#include "stateamp/region.hpp"
#include "stateamp/validation.hpp"

using namespace stateamp;

namespace {

constexpr double kContainmentTol = 1e-9;
constexpr double kRateTol = 1e-4;
constexpr double kUncodedTol = 1e-9;
constexpr double kRemarkTol = 1e-9;
constexpr double kAlphaShift = 1e-3;
constexpr double kDistortionGain = 1e-4;
constexpr double kEnvelopeTol = 1e-6;
constexpr std::size_t kBruteGrid = 10000;
constexpr std::size_t kRandomChannels = 20;
constexpr std::uint64_t kRandomChannelSeed = 2024;

const ChannelParams kFig3{7.7, 10.0, 1.0, 1.0};
const ChannelParams kFig4{77.0, 10.0, 1.0, 1.0};

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

oracle::Channel oc(const ChannelParams& cp) { return {cp.P, cp.Q, cp.N, cp.sigma_u2}; }

Outcome derived_parameters() {
  const DerivedParams dp = derive(kFig3);
  const std::string q = fmt("%.2f", dp.Qp), n = fmt("%.2f", dp.Np);
  return {q == "9.09" && n == "0.91", "Qp=" + q + " Np=" + n};
}

Outcome oracle_agreement() {
  ValidationOptions opt;  // 200 draws, n = 1e6
  const auto r = check_oracle_agreement(opt);
  const auto& d = r[0];
  const auto& rate = r[1];
  std::ostringstream s;
  s << "distortion " << d.detail["within_3se"].get<std::size_t>() << "/" << opt.oracle_draws
    << " within 3 SE, rate " << rate.detail["within_3se"].get<std::size_t>() << "/" << opt.oracle_draws
    << " within 3 SE (n=" << opt.oracle_n << ")";
  return {d.passed && rate.passed, s.str()};
}

Outcome containment() {
  std::vector<ChannelParams> channels = {kFig3, kFig4};
  for (std::size_t i = 0; i < kRandomChannels; ++i) channels.push_back(random_draw(kRandomChannelSeed, i).channel);
  double worst = std::numeric_limits<double>::infinity();
  std::size_t points = 0;
  for (const auto& cp : channels) {
    RegionConfig cfg;
    cfg.containment_tol = kContainmentTol;
    try {
      const RegionReport rep = build_region(cp, cfg);
      points += rep.inner.size();
      // Independent re-check of every frontier point against the curves.
      for (const auto& p : rep.inner) {
        const auto lb = interpolate(rep.combined, p.rate);
        if (!lb) return {false, "frontier point outside the outer rate range at R=" + fmt("%.6g", p.rate)};
        worst = std::min(worst, p.distortion - *lb);
      }
      worst = std::min(worst, rep.min_gap);
    } catch (const ContainmentViolation& e) {
      return {false, e.what()};
    }
  }
  return {worst >= -kContainmentTol,
          std::to_string(channels.size()) + " channels, " + std::to_string(points) + " frontier points, min gap " +
              fmt("%.3g", worst)};
}

Outcome extreme_cases() {
  ValidationOptions opt;
  opt.channel = kFig3;
  const CheckResult c = check_extreme_cases(opt);
  const double a = c.detail["full_message_rate"], b = c.detail["uncoded_distortion"];
  const double cc = c.detail["perfect_observation_rate"], d = c.detail["remark_reduction"];
  const bool ok = a <= kRateTol && b <= kUncodedTol && cc <= kRateTol && d <= kRemarkTol;
  return {ok, "(a) " + fmt("%.2g", a) + " (b) " + fmt("%.2g", b) + " (c) " + fmt("%.2g", cc) + " (d) " +
                  fmt("%.2g", d)};
}

// At fixed beta, the dirty-paper coefficient reaches some rate R_c. Among all
// alpha reaching R_c, find the one with the smallest distortion.
Outcome varying_alpha() {
  const DerivedParams dp = derive(kFig3);
  double best_gain = 0.0, at_beta = 0.0, at_rate = 0.0, shift = 0.0;
  for (double beta : linspace(0.02, 1.0, 50)) {
    const double ac = costa_alpha(kFig3, beta);
    const InnerPoint costa = evaluate(dp, kFig3, {ac, beta});
    if (!costa.decodable) continue;
    const auto opt = min_distortion_at_rate(dp, kFig3, beta, costa.raw_rate);
    if (!opt) continue;
    const double gain = costa.distortion - opt->distortion;
    const double da = std::abs(opt->params.alpha - ac);
    if (da > kAlphaShift && gain > best_gain) {
      best_gain = gain;
      at_beta = beta;
      at_rate = costa.raw_rate;
      shift = da;
    }
  }
  return {best_gain > kDistortionGain, "beta=" + fmt("%.3f", at_beta) + " R=" + fmt("%.4f", at_rate) +
                                           " |alpha-costa|=" + fmt("%.4f", shift) + " D gain " +
                                           fmt("%.4g", best_gain)};
}

Outcome f_properties() {
  const CheckResult a = check_f_properties(derive(kFig3));
  const CheckResult b = check_f_properties(derive(kFig4));
  return {a.passed && b.passed, "min differences " + fmt("%.3g", std::min(a.deviation, b.deviation))};
}

Outcome estimator_inequality() {
  ValidationOptions opt;
  opt.appendix_trials = 1000;
  const CheckResult c = check_appendix_inequality(opt);
  return {c.passed, std::to_string(c.detail["violations"].get<std::size_t>()) + " violations in " +
                        std::to_string(opt.appendix_trials) + " trials, min margin " + fmt("%.3g", c.deviation)};
}

Outcome envelope_optimality() {
  double worst2 = 0.0, worst3 = 0.0;
  std::size_t compared = 0, mismatched = 0;
  for (const auto& cp : {kFig3, kFig4}) {
    const DerivedParams dp = derive(cp);
    for (double R : outer_rate_grid(cp, dp)) {
      const auto lib2 = thm2_lower_bound(cp, dp, R);
      const auto ref2 = oracle::thm2_brute(oc(cp), R, kBruteGrid);
      if (lib2.has_value() != ref2.has_value()) ++mismatched;
      if (lib2 && ref2) {
        worst2 = std::max(worst2, std::abs(*lib2 - *ref2));
        ++compared;
      }
      const auto lib3 = thm3_lower_bound(cp, dp, R);
      const auto ref3 = oracle::thm3_brute(oc(cp), R, kBruteGrid);
      if (lib3.has_value() != ref3.has_value()) ++mismatched;
      if (lib3 && ref3) {
        worst3 = std::max(worst3, std::abs(*lib3 - *ref3));
        ++compared;
      }
    }
  }
  return {worst2 <= kEnvelopeTol && worst3 <= kEnvelopeTol && mismatched == 0,
          std::to_string(compared) + " comparisons, max |diff| noise-partition " + fmt("%.2g", worst2) +
              " correlation " + fmt("%.2g", worst3) + ", feasibility mismatches " + std::to_string(mismatched)};
}

Outcome regimes() {
  const RegionReport a = build_region(kFig3);
  const RegionReport b = build_region(kFig4);
  double dmin = std::numeric_limits<double>::infinity(), rate_at = 0.0;
  for (const auto& p : b.inner) dmin = std::min(dmin, p.distortion);
  for (const auto& p : b.inner)
    if (p.distortion <= dmin + 1e-10) rate_at = std::max(rate_at, p.rate);
  return {a.regime == Regime::kLowPower && b.regime == Regime::kHighPower && rate_at > 0.0,
          std::string("P=7.7 ") + to_string(a.regime) + ", P=77 " + to_string(b.regime) + " with R=" +
              fmt("%.4f", rate_at) + " at D=" + fmt("%.6f", dmin)};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / ("stateamp_accept_" + std::to_string(::getpid()));
  cli::RunConfig c;
  c.formats = {"csv", "json"};
  std::ostringstream log;
  c.out = (base / "a").string();
  const int ra = cli::cmd_region(c, log);
  c.out = (base / "b").string();
  const int rb = cli::cmd_region(c, log);
  const auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  const std::string ca = slurp(base / "a" / "region.csv"), cb = slurp(base / "b" / "region.csv");
  const std::string ja = slurp(base / "a" / "report.json"), jb = slurp(base / "b" / "report.json");
  fs::remove_all(base);
  const bool ok = ra == 0 && rb == 0 && !ca.empty() && !ja.empty() && ca == cb && ja == jb;
  return {ok, "csv " + std::to_string(ca.size()) + " bytes " + (ca == cb ? "identical" : "differ") + ", json " +
                  std::to_string(ja.size()) + " bytes " + (ja == jb ? "identical" : "differ")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"derived parameters", derived_parameters},
      {"oracle agreement", oracle_agreement},
      {"containment", containment},
      {"extreme-case reductions", extreme_cases},
      {"varying alpha beats the dirty-paper choice", varying_alpha},
      {"f convex and non-decreasing", f_properties},
      {"estimator inequality", estimator_inequality},
      {"envelope optimality", envelope_optimality},
      {"regime detection", regimes},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %2zu  %-44s %s [%.1fs]\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.passed) ++failed;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
