#pragma once

// Monte Carlo ground truth for the inner-bound formulas. Samples the physical
// signal model directly and measures covariances, least-squares estimators
// and Gaussian mutual information from the draws.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stateamp/detail/parallel.hpp"
#include "stateamp/inner_bound.hpp"
#include "stateamp/model.hpp"
#include "stateamp/philox.hpp"

namespace stateamp {

enum class Column : std::size_t { Vt = 0, W, Z, Xt, S, Y, U };
inline constexpr std::size_t kColumnCount = 7;
inline constexpr std::array<const char*, kColumnCount> kColumnNames = {"Vt", "W", "Z", "Xt", "S", "Y", "U"};

struct SampleBatch {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  ChannelParams channel;
  InnerParams params;
  double g = 0.0;
  std::array<std::vector<double>, kColumnCount> columns;

  const std::vector<double>& col(Column c) const { return columns[static_cast<std::size_t>(c)]; }
};

inline constexpr std::size_t kSampleChunk = 1u << 16;

// Sample i uses Philox blocks 2i and 2i+1 of the seed's stream, so the batch
// is a pure function of (seed, n) whatever the worker count.
inline SampleBatch sample(const DerivedParams& dp, const ChannelParams& cp, const InnerParams& ip, std::size_t n,
                          std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("sample: need n >= 2");
  ip.validate();
  SampleBatch b;
  b.n = n;
  b.seed = seed;
  b.channel = cp;
  b.params = ip;
  b.g = analog_gain(dp, cp, ip.beta);
  for (auto& c : b.columns) c.resize(n);

  const double sd_vt = std::sqrt(dp.Qp), sd_w = std::sqrt(dp.Np), sd_z = std::sqrt(cp.N);
  const double sd_xt = std::sqrt(ip.beta * cp.P);
  const double k = 1.0 + b.g;
  const std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  parallel_for(chunks, [&](std::size_t chunk) {
    const std::size_t end = std::min(n, (chunk + 1) * kSampleChunk);
    for (std::size_t i = chunk * kSampleChunk; i < end; ++i) {
      const auto a = normal_pair(seed, 0, 2 * static_cast<std::uint64_t>(i));
      const auto c = normal_pair(seed, 0, 2 * static_cast<std::uint64_t>(i) + 1);
      const double vt = sd_vt * a[0], w = sd_w * a[1], z = sd_z * c[0], xt = sd_xt * c[1];
      b.columns[0][i] = vt;
      b.columns[1][i] = w;
      b.columns[2][i] = z;
      b.columns[3][i] = xt;
      b.columns[4][i] = vt + w;
      b.columns[5][i] = k * vt + xt + w + z;
      b.columns[6][i] = xt + ip.alpha * k * vt;
    }
  });
  return b;
}

// Second-moment matrix (1/n) sum x x^T of the chosen columns. The model is
// zero-mean, so no centering.
inline SmallMatrix empirical_covariance(const SampleBatch& b, const std::vector<Column>& cols) {
  SmallMatrix m(cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) {
    for (std::size_t j = i; j < cols.size(); ++j) {
      const auto& x = b.col(cols[i]);
      const auto& y = b.col(cols[j]);
      double s = 0.0;
      for (std::size_t t = 0; t < b.n; ++t) s += x[t] * y[t];
      m(i, j) = s / static_cast<double>(b.n);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

struct EmpiricalEstimate {
  std::vector<double> coefficients;
  double residual = 0.0;        // mean squared residual
  double standard_error = 0.0;  // of `residual`
  bool dropped_last = false;    // Gram matrix was singular; last observation dropped
};

// Least-squares fit of `target` on `observations` (no intercept).
inline EmpiricalEstimate empirical_mmse(const SampleBatch& b, Column target, std::vector<Column> observations) {
  if (b.n < 1000) throw std::invalid_argument("empirical_mmse: need at least 1e3 samples");
  EmpiricalEstimate est;
  std::vector<double> coef;
  while (true) {
    if (observations.empty()) break;
    std::vector<Column> all = observations;
    all.push_back(target);
    const SmallMatrix m = empirical_covariance(b, all);
    const std::size_t k = observations.size();
    std::vector<std::size_t> obs_idx(k);
    for (std::size_t i = 0; i < k; ++i) obs_idx[i] = i;
    try {
      const SmallMatrix inv = inverse(m.sub(obs_idx));
      coef.assign(k, 0.0);
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < k; ++i) coef[j] += m(k, i) * inv(i, j);
      break;
    } catch (const SingularMatrixError&) {
      observations.pop_back();
      est.dropped_last = true;
    }
  }
  est.coefficients = coef;
  const auto& y = b.col(target);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t t = 0; t < b.n; ++t) {
    double e = y[t];
    for (std::size_t j = 0; j < observations.size(); ++j) e -= coef[j] * b.col(observations[j])[t];
    const double e2 = e * e;
    s1 += e2;
    s2 += e2 * e2;
  }
  const double n = static_cast<double>(b.n);
  est.residual = s1 / n;
  const double var = std::max(0.0, s2 / n - est.residual * est.residual);
  est.standard_error = std::sqrt(var / n);
  return est;
}

struct EmpiricalRate {
  double rate = 0.0;            // I(U;Y) - I(U;Vt), unclamped
  double standard_error = 0.0;  // delta method on the two residual variances
};

inline EmpiricalRate empirical_rate(const SampleBatch& b) {
  if (b.n < 10000) throw std::invalid_argument("empirical_rate: need at least 1e4 samples");
  // Order: U, Y, Vt
  const GaussianJoint joint(empirical_covariance(b, {Column::U, Column::Y, Column::Vt}));
  EmpiricalRate out;
  out.rate = gaussian_mi(joint, {0}, {1}) - gaussian_mi(joint, {0}, {2});

  // rate = (1/2) log(m1 / m2), m1 = Var(U | Vt), m2 = Var(U | Y).
  const auto& c = joint.cov();
  const double c1 = c(0, 2) / c(2, 2), c2 = c(0, 1) / c(1, 1);
  const double m1 = c(0, 0) - c1 * c(0, 2), m2 = c(0, 0) - c2 * c(0, 1);
  const auto& u = b.col(Column::U);
  const auto& y = b.col(Column::Y);
  const auto& v = b.col(Column::Vt);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t t = 0; t < b.n; ++t) {
    const double e1 = u[t] - c1 * v[t], e2 = u[t] - c2 * y[t];
    const double q = e1 * e1 / m1 - e2 * e2 / m2;
    s1 += q;
    s2 += q * q;
  }
  const double n = static_cast<double>(b.n);
  const double var_q = std::max(0.0, s2 / n - (s1 / n) * (s1 / n));
  out.standard_error = 0.5 * std::sqrt(var_q / n) / std::log(kRateLogBase);
  return out;
}

// Mean transmit power (1/n) sum (g Vt + Xt)^2 and its standard error.
inline std::pair<double, double> empirical_power(const SampleBatch& b) {
  const auto& v = b.col(Column::Vt);
  const auto& x = b.col(Column::Xt);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t t = 0; t < b.n; ++t) {
    const double p = (b.g * v[t] + x[t]) * (b.g * v[t] + x[t]);
    s1 += p;
    s2 += p * p;
  }
  const double n = static_cast<double>(b.n);
  const double mean = s1 / n;
  return {mean, std::sqrt(std::max(0.0, s2 / n - mean * mean) / n)};
}

// One row per sample, comment header with the parameters and generator.
inline void write_batch_csv(std::ostream& os, const SampleBatch& b) {
  char buf[64];
  os << "# generator=" << Philox4x32::kName << " seed=" << b.seed << " n=" << b.n << "\n";
  std::snprintf(buf, sizeof buf, "%.12g", b.channel.P);
  os << "# P=" << buf;
  std::snprintf(buf, sizeof buf, "%.12g", b.channel.Q);
  os << " Q=" << buf;
  std::snprintf(buf, sizeof buf, "%.12g", b.channel.N);
  os << " N=" << buf;
  std::snprintf(buf, sizeof buf, "%.12g", b.channel.sigma_u2);
  os << " sigma_u2=" << buf;
  std::snprintf(buf, sizeof buf, "%.12g", b.params.alpha);
  os << " alpha=" << buf;
  std::snprintf(buf, sizeof buf, "%.12g", b.params.beta);
  os << " beta=" << buf << "\n";
  for (std::size_t c = 0; c < kColumnCount; ++c) os << (c ? "," : "") << kColumnNames[c];
  os << "\n";
  for (std::size_t t = 0; t < b.n; ++t) {
    for (std::size_t c = 0; c < kColumnCount; ++c) {
      std::snprintf(buf, sizeof buf, "%.12g", b.columns[c][t]);
      os << (c ? "," : "") << buf;
    }
    os << "\n";
  }
}

}  // namespace stateamp
