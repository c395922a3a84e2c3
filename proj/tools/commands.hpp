#pragma once

// Subcommand implementations for the `stateamp` tool, kept apart from the
// argument parsing so tests can drive them directly.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stateamp/inner_bound.hpp"
#include "stateamp/model.hpp"
#include "stateamp/oracle.hpp"
#include "stateamp/region.hpp"
#include "stateamp/report_io.hpp"
#include "stateamp/validation.hpp"

namespace stateamp::cli {

enum ExitCode : int { kOk = 0, kValidationFailure = 1, kUsageError = 2, kConsistencyViolation = 3 };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  ChannelParams channel{7.7, 10.0, 1.0, 1.0};
  std::size_t beta_grid = 512;
  std::size_t rate_targets = 512;
  std::size_t nbar_grid = 1024;
  std::size_t r_samples = 400;
  std::size_t oracle_n = 1'000'000;
  std::size_t oracle_draws = 200;
  std::uint64_t seed = 1;
  std::string out = ".";
  std::vector<std::string> formats{"csv", "svg", "json"};
  bool convexify = false;
  double log_base = 2.0;

  void validate() const {
    try {
      channel.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (beta_grid < 2) throw ConfigError("beta-grid must be >= 2");
    if (rate_targets < 2) throw ConfigError("rate-targets must be >= 2");
    if (nbar_grid < 2) throw ConfigError("nbar-grid must be >= 2");
    if (r_samples < 2) throw ConfigError("r-samples must be >= 2");
    if (oracle_n < 10000) throw ConfigError("oracle-n must be >= 10000");
    if (!(log_base > 1.0) || !std::isfinite(log_base)) throw ConfigError("log-base must be > 1");
    if (formats.empty()) throw ConfigError("format list is empty");
    for (const auto& f : formats)
      if (f != "csv" && f != "svg" && f != "json") throw ConfigError("unknown format '" + f + "'");
  }

  bool wants(const std::string& fmt) const {
    for (const auto& f : formats)
      if (f == fmt) return true;
    return false;
  }

  RegionConfig region_config() const {
    RegionConfig rc;
    rc.frontier.beta_points = beta_grid;
    rc.frontier.rate_targets = rate_targets;
    rc.envelope.nbar_points = nbar_grid;
    rc.rate_samples = r_samples;
    rc.convexify = convexify;
    rc.seed = seed;
    return rc;
  }
};

inline Provenance provenance(const RunConfig& c, const std::string& command) {
  std::ostringstream cfg;
  cfg << "P=" << fmt12(c.channel.P) << " Q=" << fmt12(c.channel.Q) << " N=" << fmt12(c.channel.N)
      << " sigma_u2=" << fmt12(c.channel.sigma_u2) << " beta_grid=" << c.beta_grid
      << " rate_targets=" << c.rate_targets << " nbar_grid=" << c.nbar_grid << " r_samples=" << c.r_samples
      << " convexify=" << (c.convexify ? 1 : 0) << " log_base=" << fmt12(c.log_base);
  std::ostringstream seed;
  seed << "seed=" << c.seed << " generator=" << Philox4x32::kName;
  return {{"stateamp " + command, "config: " + cfg.str(), seed.str()}};
}

inline nlohmann::json config_json(const RunConfig& c) {
  return {{"channel", to_json(c.channel)},
          {"beta_grid", c.beta_grid},
          {"rate_targets", c.rate_targets},
          {"nbar_grid", c.nbar_grid},
          {"r_samples", c.r_samples},
          {"oracle_n", c.oracle_n},
          {"oracle_draws", c.oracle_draws},
          {"seed", c.seed},
          {"convexify", c.convexify},
          {"log_base", c.log_base}};
}

// Writes region.csv, region.svg and report.json (as selected) into c.out.
inline int cmd_region(const RunConfig& c, std::ostream& log) {
  try {
    c.validate();
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return kUsageError;
  }
  RegionReport rep;
  try {
    rep = build_region(c.channel, c.region_config());
  } catch (const ContainmentViolation& e) {
    log << "error: " << e.what() << "\n";
    return kConsistencyViolation;
  }
  const std::filesystem::path dir(c.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const Provenance prov = provenance(c, "region");
  const auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error(std::string("cannot write ") + (dir / name).string());
    return f;
  };
  if (c.wants("csv")) {
    auto f = open("region.csv");
    write_region_csv(f, rep, prov, c.log_base);
  }
  if (c.wants("svg")) {
    auto f = open("region.svg");
    write_region_svg(f, rep, prov, c.log_base);
  }
  if (c.wants("json")) {
    auto f = open("report.json");
    nlohmann::json j = to_json(rep, c.log_base);
    j["config"] = config_json(c);
    f << j.dump(2) << "\n";
  }
  log << "regime: " << to_string(rep.regime) << "\n"
      << "frontier points: " << rep.inner.size() << "\n"
      << "gap: min " << fmt12(rep.min_gap) << " max " << fmt12(rep.max_gap) << "\n";
  return kOk;
}

// Prints a JSON pass/fail report; exit 1 if any check fails.
inline int cmd_validate(const RunConfig& c, std::ostream& out, std::ostream& log, double distortion_scale = 1.0) {
  try {
    c.validate();
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return kUsageError;
  }
  ValidationOptions opt;
  opt.channel = c.channel;
  opt.region = c.region_config();
  opt.oracle_n = c.oracle_n;
  opt.oracle_draws = c.oracle_draws;
  opt.seed = c.seed;
  opt.distortion_scale = distortion_scale;
  const auto checks = run_validation(opt);
  nlohmann::json j = to_json(checks);
  j["config"] = config_json(c);
  out << j.dump(2) << "\n";
  bool ok = true;
  for (const auto& ch : checks) {
    if (!ch.passed) {
      log << "FAIL " << ch.name << " deviation=" << fmt12(ch.deviation) << " detail=" << ch.detail.dump() << "\n";
      ok = false;
    }
  }
  return ok ? kOk : kValidationFailure;
}

inline int cmd_point(const RunConfig& c, double alpha, double beta, bool as_json, std::ostream& out,
                     std::ostream& log) {
  try {
    c.validate();
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be >= 0");
    if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must be in [0, 1]");
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return kUsageError;
  }
  const DerivedParams dp = derive(c.channel);
  const InnerParams ip{alpha, beta};
  const InnerPoint pt = evaluate(dp, c.channel, ip);
  const SchemeStatistics st = scheme_statistics(dp, c.channel, ip);
  const auto ua = u_useless_alpha(dp, c.channel, beta);
  const double ca = costa_alpha(c.channel, beta);

  if (as_json) {
    nlohmann::json j = to_json(pt, c.log_base);
    j["raw_rate"] = convert_rate(pt.raw_rate, c.log_base);
    j["r"] = {st.r[0], st.r[1]};
    j["Sigma"] = {{st.Sigma(0, 0), st.Sigma(0, 1)}, {st.Sigma(1, 0), st.Sigma(1, 1)}};
    j["costa_alpha"] = ca;
    j["u_useless_alpha"] = ua ? nlohmann::json(*ua) : nlohmann::json(nullptr);
    j["derived"] = to_json(dp);
    out << j.dump(2) << "\n";
    return kOk;
  }
  const auto line = [&](const std::string& key, const std::string& value) {
    out << std::left << std::setw(18) << key << value << "\n";
  };
  line("Qp", fmt12(dp.Qp));
  line("Np", fmt12(dp.Np));
  line("alpha", fmt12(alpha));
  line("beta", fmt12(beta));
  line("g", fmt12(pt.g));
  line("rate", fmt12(convert_rate(pt.rate, c.log_base)));
  line("raw_rate", fmt12(convert_rate(pt.raw_rate, c.log_base)));
  line("distortion", fmt12(pt.distortion));
  line("decodable", pt.decodable ? "true" : "false");
  line("degenerate", pt.degenerate ? "true" : "false");
  line("r", "[" + fmt12(st.r[0]) + ", " + fmt12(st.r[1]) + "]");
  line("Sigma", "[[" + fmt12(st.Sigma(0, 0)) + ", " + fmt12(st.Sigma(0, 1)) + "], [" + fmt12(st.Sigma(1, 0)) + ", " +
                    fmt12(st.Sigma(1, 1)) + "]]");
  line("costa_alpha", fmt12(ca));
  line("u_useless_alpha", ua ? fmt12(*ua) : "none");
  return kOk;
}

// Writes the raw Monte Carlo batch for (alpha, beta) to oracle.csv in c.out.
inline int cmd_oracle_dump(const RunConfig& c, double alpha, double beta, std::ostream& log) {
  try {
    c.validate();
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be >= 0");
    if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must be in [0, 1]");
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return kUsageError;
  }
  const DerivedParams dp = derive(c.channel);
  const SampleBatch b = sample(dp, c.channel, {alpha, beta}, c.oracle_n, c.seed);
  const std::filesystem::path dir(c.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream f(dir / "oracle.csv", std::ios::binary);
  if (!f) {
    log << "error: cannot write " << (dir / "oracle.csv").string() << "\n";
    return kUsageError;
  }
  write_batch_csv(f, b);
  log << "wrote " << b.n << " samples to " << (dir / "oracle.csv").string() << "\n";
  return kOk;
}

}  // namespace stateamp::cli
