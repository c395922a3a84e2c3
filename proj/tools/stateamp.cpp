// stateamp: inner and outer bounds on the rate / state-distortion region of the
// Gaussian state-amplification channel with a noisy state observation.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using stateamp::cli::RunConfig;

void add_channel_options(CLI::App& app, RunConfig& c) {
  app.add_option("--p", c.channel.P, "input power P")->capture_default_str();
  app.add_option("--q", c.channel.Q, "state variance Q")->capture_default_str();
  app.add_option("--n", c.channel.N, "channel noise variance N")->capture_default_str();
  app.add_option("--sigma-u2", c.channel.sigma_u2, "observation noise variance")->capture_default_str();
  app.add_option("--seed", c.seed, "random seed")->capture_default_str();
  app.add_option("--out", c.out, "output directory")->capture_default_str();
  app.add_option("--log-base", c.log_base, "logarithm base for reported rates")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Inner and outer bounds on the Gaussian state-amplification region"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a key = value file");
  add_channel_options(app, cfg);
  app.add_option("--beta-grid", cfg.beta_grid, "beta grid size for the frontier")->capture_default_str();
  app.add_option("--rate-targets", cfg.rate_targets, "target rates for the frontier")->capture_default_str();
  app.add_option("--nbar-grid", cfg.nbar_grid, "noise-split grid size")->capture_default_str();
  app.add_option("--r-samples", cfg.r_samples, "rate samples for the outer curves")->capture_default_str();
  app.add_option("--oracle-n", cfg.oracle_n, "Monte Carlo samples per draw")->capture_default_str();
  app.add_option("--oracle-draws", cfg.oracle_draws, "random draws for validate")->capture_default_str();
  app.add_option("--format", cfg.formats, "comma separated subset of csv,svg,json")
      ->delimiter(',')
      ->check(CLI::IsMember({"csv", "svg", "json"}));
  app.add_flag("--convexify", cfg.convexify, "allow time sharing between frontier points");

  auto* region = app.add_subcommand("region", "compute the region and write csv/svg/json");
  region->fallthrough();

  auto* validate = app.add_subcommand("validate", "run the self-check suite and print a JSON report");
  validate->fallthrough();
  bool perturb = false;
  validate->add_flag("--perturb-distortion", perturb)->group("");

  double alpha = 0.0, beta = 1.0;
  bool as_json = false;
  auto* point = app.add_subcommand("point", "evaluate the achievable scheme at one (alpha, beta)");
  point->fallthrough();
  point->add_option("--alpha", alpha, "inflation factor")->required();
  point->add_option("--beta", beta, "power fraction for the analog part")->required();
  point->add_flag("--json", as_json, "print JSON");

  auto* dump = app.add_subcommand("oracle-dump", "write raw Monte Carlo samples to oracle.csv");
  dump->fallthrough();
  dump->add_option("--alpha", alpha, "inflation factor")->required();
  dump->add_option("--beta", beta, "power fraction for the analog part")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return stateamp::cli::kUsageError;
  }

  try {
    if (*region) return stateamp::cli::cmd_region(cfg, std::cerr);
    if (*validate) return stateamp::cli::cmd_validate(cfg, std::cout, std::cerr, perturb ? 1.01 : 1.0);
    if (*point) return stateamp::cli::cmd_point(cfg, alpha, beta, as_json, std::cout, std::cerr);
    if (*dump) return stateamp::cli::cmd_oracle_dump(cfg, alpha, beta, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return stateamp::cli::kUsageError;
  }
  return stateamp::cli::kUsageError;
}
