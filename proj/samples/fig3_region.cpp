// Computes the region for the P = 7.7, Q = 10, N = 1, sigma_u^2 = 1 channel and
// prints a coarse table of the achievable and converse distortions.
//
//   ./fig3_region [P]
//
// Pass P = 77 to see the high-power behaviour.

#include <cstdio>
#include <cstdlib>

#include "stateamp/region.hpp"

int main(int argc, char** argv) {
  stateamp::ChannelParams cp{7.7, 10.0, 1.0, 1.0};
  if (argc > 1) cp.P = std::atof(argv[1]);

  stateamp::RegionConfig cfg;
  cfg.frontier.beta_points = 128;
  cfg.frontier.rate_targets = 128;
  cfg.rate_samples = 40;
  const stateamp::RegionReport rep = stateamp::build_region(cp, cfg);

  std::printf("P=%g Q=%g N=%g sigma_u2=%g  regime: %s\n", cp.P, cp.Q, cp.N, cp.sigma_u2,
              stateamp::to_string(rep.regime));
  std::printf("%10s %12s %12s\n", "R [bits]", "D inner", "D outer");
  for (const auto& row : rep.rows) {
    if (!row.inner || !row.combined) continue;
    std::printf("%10.5f %12.6f %12.6f\n", row.rate, *row.inner, *row.combined);
  }
  std::printf("largest gap: %.6g\n", rep.max_gap);
  return 0;
}
