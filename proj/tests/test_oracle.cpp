#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "stateamp/inner_bound.hpp"
#include "stateamp/oracle.hpp"
#include "stateamp/philox.hpp"

using namespace stateamp;

namespace {

const ChannelParams kFig3{7.7, 10.0, 1.0, 1.0};

}  // namespace

// Known-answer vectors from the Random123 distribution (kat_vectors).
TEST(Philox, KnownAnswers) {
  using B = Philox4x32::Block;
  EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, UniformsAreOpenAndCentred) {
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(9, 0, i);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_GT(to_open_unit(0, 0), 0.0);
  EXPECT_LT(to_open_unit(0xffffffff, 0xffffffff), 1.0);
}

TEST(Sample, StructuralIdentitiesHoldPerRow) {
  const DerivedParams dp = derive(kFig3);
  const InnerParams ip{0.6, 0.4};
  const SampleBatch b = sample(dp, kFig3, ip, 5000, 3);
  const double k = 1.0 + b.g;
  for (std::size_t t = 0; t < b.n; ++t) {
    const double vt = b.col(Column::Vt)[t], w = b.col(Column::W)[t], z = b.col(Column::Z)[t],
                 xt = b.col(Column::Xt)[t];
    EXPECT_EQ(b.col(Column::S)[t], vt + w);
    EXPECT_NEAR(b.col(Column::Y)[t], k * vt + xt + w + z, 1e-12);
    EXPECT_NEAR(b.col(Column::U)[t], xt + ip.alpha * k * vt, 1e-12);
  }
}

TEST(Sample, DeterministicAndPrefixStable) {
  const DerivedParams dp = derive(kFig3);
  const SampleBatch a = sample(dp, kFig3, {0.5, 0.5}, 200000, 17);
  const SampleBatch b = sample(dp, kFig3, {0.5, 0.5}, 200000, 17);
  const SampleBatch c = sample(dp, kFig3, {0.5, 0.5}, 70000, 17);
  const SampleBatch d = sample(dp, kFig3, {0.5, 0.5}, 70000, 18);
  for (std::size_t col = 0; col < kColumnCount; ++col) {
    EXPECT_EQ(a.columns[col], b.columns[col]);
    for (std::size_t t = 0; t < c.n; ++t) ASSERT_EQ(a.columns[col][t], c.columns[col][t]);
  }
  EXPECT_NE(c.columns[0], d.columns[0]);
}

TEST(Sample, RejectsTinyBatches) {
  const DerivedParams dp = derive(kFig3);
  EXPECT_THROW(sample(dp, kFig3, {0.5, 0.5}, 1, 1), std::invalid_argument);
}

TEST(EmpiricalMmse, SelfObservation) {
  const DerivedParams dp = derive(kFig3);
  const SampleBatch b = sample(dp, kFig3, {0.5, 0.5}, 10000, 1);
  EXPECT_NEAR(empirical_mmse(b, Column::S, {Column::S}).residual, 0.0, 1e-20);
}

TEST(EmpiricalMmse, DropsCollinearObservation) {
  const DerivedParams dp = derive(kFig3);
  // beta = 0, alpha = 0: U is identically zero.
  const SampleBatch b = sample(dp, kFig3, {0.0, 0.0}, 10000, 1);
  const EmpiricalEstimate e = empirical_mmse(b, Column::S, {Column::Y, Column::U});
  EXPECT_TRUE(e.dropped_last);
  EXPECT_EQ(e.coefficients.size(), 1u);
}

TEST(EmpiricalMmse, MatchesClosedForm) {
  const DerivedParams dp = derive(kFig3);
  const InnerParams ip{1.0, 0.5};
  const SampleBatch b = sample(dp, kFig3, ip, 1'000'000, 5);
  const EmpiricalEstimate e = empirical_mmse(b, Column::S, {Column::Y, Column::U});
  const double want = evaluate(dp, kFig3, ip).distortion;
  EXPECT_LE(std::abs(e.residual - want), 3.0 * e.standard_error) << e.residual << " vs " << want;
}

TEST(EmpiricalCovariance, MatchesSchemeStatistics) {
  const DerivedParams dp = derive(kFig3);
  const InnerParams ip{0.5, 0.5};
  const SampleBatch b = sample(dp, kFig3, ip, 1'000'000, 6);
  const SchemeStatistics st = scheme_statistics(dp, kFig3, ip);
  const auto check = [&](Column x, Column y, double want) {
    const auto& a = b.col(x);
    const auto& c = b.col(y);
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t t = 0; t < b.n; ++t) {
      const double p = a[t] * c[t];
      s1 += p;
      s2 += p * p;
    }
    const double n = static_cast<double>(b.n);
    const double mean = s1 / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    EXPECT_LE(std::abs(mean - want), 3.0 * se) << mean << " vs " << want;
  };
  check(Column::S, Column::Y, st.r[0]);
  check(Column::S, Column::U, st.r[1]);
  check(Column::Y, Column::Y, st.Sigma(0, 0));
  check(Column::Y, Column::U, st.Sigma(0, 1));
  check(Column::U, Column::U, st.Sigma(1, 1));
}

TEST(EmpiricalRate, MatchesClosedForm) {
  const DerivedParams dp = derive(kFig3);
  for (const InnerParams ip : {InnerParams{0.5, 0.5}, InnerParams{0.9, 1.0}, InnerParams{0.2, 0.3}}) {
    const SampleBatch b = sample(dp, kFig3, ip, 1'000'000, 7);
    const EmpiricalRate r = empirical_rate(b);
    EXPECT_LE(std::abs(r.rate - raw_rate(dp, kFig3, ip)), 3.0 * r.standard_error);
  }
}

TEST(EmpiricalPower, FullMessagePower) {
  const DerivedParams dp = derive(kFig3);
  const std::size_t n = 1'000'000;
  const SampleBatch b = sample(dp, kFig3, {0.5, 1.0}, n, 8);
  double s = 0.0;
  for (double x : b.col(Column::Xt)) s += x * x;
  const double var = s / static_cast<double>(n);
  EXPECT_LE(std::abs(var - kFig3.P), 4.0 * kFig3.P * std::sqrt(2.0 / static_cast<double>(n)));
  const auto [p, se] = empirical_power(b);
  EXPECT_LE(std::abs(p - kFig3.P), 4.0 * se);
}

TEST(EmpiricalMmse, ErrorShrinksLikeInverseRootN) {
  const DerivedParams dp = derive(kFig3);
  const InnerParams ip{0.7, 0.6};
  const double want = evaluate(dp, kFig3, ip).distortion;
  const auto rms = [&](std::size_t n) {
    double s = 0.0;
    const int seeds = 20;
    for (int k = 0; k < seeds; ++k) {
      const SampleBatch b = sample(dp, kFig3, ip, n, 1000 + k);
      const double e = empirical_mmse(b, Column::S, {Column::Y, Column::U}).residual - want;
      s += e * e;
    }
    return std::sqrt(s / seeds);
  };
  const double ratio = rms(10000) / rms(1'000'000);
  // sqrt(100) = 10 in expectation.
  EXPECT_GE(ratio, 5.0);
  EXPECT_LE(ratio, 20.0);
}

TEST(WriteBatchCsv, HeaderAndRows) {
  const DerivedParams dp = derive(kFig3);
  const SampleBatch b = sample(dp, kFig3, {0.5, 0.5}, 10, 2);
  std::ostringstream os;
  write_batch_csv(os, b);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_NE(line.find("philox4x32-10"), std::string::npos);
  EXPECT_NE(line.find("seed=2"), std::string::npos);
  std::getline(is, line);
  EXPECT_EQ(line.rfind("# P=7.7", 0), 0u);
  std::getline(is, line);
  EXPECT_EQ(line, "Vt,W,Z,Xt,S,Y,U");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 10);
}
