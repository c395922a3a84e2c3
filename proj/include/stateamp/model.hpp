#pragma once

// Problem instance, the observable/unobservable state split, and the Gaussian
// conditioning and mutual-information utilities shared by the other modules.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stateamp/detail/small_matrix.hpp"

namespace stateamp {

// Logarithm base for every rate in the library. The bound formulas use
// kRateLogBase^(2R), so switching this to e gives a consistent nats build.
inline constexpr double kRateLogBase = 2.0;

// (1/2) log_b(x): the Gaussian capacity-style expression.
inline double half_log(double x) { return 0.5 * std::log(x) / std::log(kRateLogBase); }

// b^(2R), the inverse of half_log.
inline double rate_exp(double rate) { return std::pow(kRateLogBase, 2.0 * rate); }

// Re-express a rate given in library units in another logarithm base.
inline double convert_rate(double rate, double target_base) {
  return rate * std::log(kRateLogBase) / std::log(target_base);
}

struct ChannelParams {
  double P = 0.0;         // transmit power
  double Q = 1.0;         // state variance
  double N = 1.0;         // channel noise variance
  double sigma_u2 = 0.0;  // state-observation noise variance

  void validate() const {
    if (!(Q > 0.0) || !std::isfinite(Q)) throw std::invalid_argument("ChannelParams: Q must be > 0");
    if (!(N > 0.0) || !std::isfinite(N)) throw std::invalid_argument("ChannelParams: N must be > 0");
    if (!(P >= 0.0) || !std::isfinite(P)) throw std::invalid_argument("ChannelParams: P must be >= 0");
    if (!(sigma_u2 >= 0.0) || !std::isfinite(sigma_u2))
      throw std::invalid_argument("ChannelParams: sigma_u2 must be >= 0");
  }

  // Largest admissible |E[X V]|, from Cauchy-Schwarz and the power constraint.
  double max_correlation() const { return std::sqrt(P * (Q + sigma_u2)); }
};

// Equivalent model S = Vt + W with Vt = lambda * V observable at the sender.
struct DerivedParams {
  double Qp = 0.0;      // Var(Vt)
  double Np = 0.0;      // Var(W)
  double lambda = 1.0;  // Q / (Q + sigma_u2)
};

inline DerivedParams derive(const ChannelParams& cp) {
  cp.validate();
  const double denom = cp.Q + cp.sigma_u2;
  DerivedParams dp;
  dp.lambda = cp.Q / denom;
  dp.Qp = cp.Q * dp.lambda;
  // Np = Q - Qp, written so that Qp + Np == Q to rounding.
  dp.Np = cp.Q * (cp.sigma_u2 / denom);
  return dp;
}

// Zero-mean jointly Gaussian vector described by its covariance.
class GaussianJoint {
 public:
  static constexpr double kPsdTol = 1e-9;
  static constexpr double kSymTol = 1e-12;

  explicit GaussianJoint(SmallMatrix cov) : cov_(std::move(cov)) {
    const double scale = std::max(1.0, std::abs(cov_.trace()));
    if (!cov_.is_symmetric(kSymTol * scale)) {
      throw std::invalid_argument("GaussianJoint: covariance is not symmetric");
    }
    const auto ev = symmetric_eigenvalues(cov_);
    if (ev.front() < -kPsdTol * std::abs(cov_.trace())) {
      throw std::invalid_argument("GaussianJoint: covariance is not positive semidefinite (min eigenvalue " +
                                  std::to_string(ev.front()) + ")");
    }
  }

  std::size_t dim() const { return cov_.dim(); }
  const SmallMatrix& cov() const { return cov_; }
  double var(std::size_t i) const { return cov_(i, i); }

 private:
  SmallMatrix cov_;
};

// Covariance of A x for a k-by-dim coefficient matrix A.
inline GaussianJoint linear_transform(const GaussianJoint& joint,
                                      const std::vector<std::vector<double>>& rows) {
  SmallMatrix out(rows.size());
  const std::size_t n = joint.dim();
  for (std::size_t a = 0; a < rows.size(); ++a) {
    if (rows[a].size() != n) throw std::invalid_argument("linear_transform: row length mismatch");
  }
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = a; b < rows.size(); ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s += rows[a][i] * joint.cov()(i, j) * rows[b][j];
      out(a, b) = s;
      out(b, a) = s;
    }
  }
  return GaussianJoint(out);
}

struct LinearEstimate {
  std::vector<double> coefficients;  // one per observed index, in the given order
  double residual_variance = 0.0;
};

// Best linear (= MMSE for Gaussians) estimate of one variable from others.
// Throws SingularMatrixError when the observation block cannot be inverted;
// callers decide whether to drop an observation and retry.
inline LinearEstimate mmse_given(const GaussianJoint& joint, std::size_t target,
                                 const std::vector<std::size_t>& observed) {
  if (observed.empty()) return {{}, joint.var(target)};
  for (std::size_t o : observed) {
    if (o >= joint.dim()) throw std::out_of_range("mmse_given: observed index out of range");
  }
  if (target >= joint.dim()) throw std::out_of_range("mmse_given: target index out of range");

  const SmallMatrix inv = inverse(joint.cov().sub(observed));
  const std::size_t k = observed.size();
  LinearEstimate est;
  est.coefficients.assign(k, 0.0);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) est.coefficients[j] += joint.cov()(target, observed[i]) * inv(i, j);

  double explained = 0.0;
  for (std::size_t j = 0; j < k; ++j) explained += est.coefficients[j] * joint.cov()(observed[j], target);
  est.residual_variance = std::max(0.0, joint.var(target) - explained);
  return est;
}

// I(X_A; X_B) in library log units.
inline double gaussian_mi(const GaussianJoint& joint, const std::vector<std::size_t>& set_a,
                          const std::vector<std::size_t>& set_b) {
  if (set_a.empty() || set_b.empty()) throw std::invalid_argument("gaussian_mi: empty index set");
  for (std::size_t a : set_a)
    for (std::size_t b : set_b)
      if (a == b) throw std::invalid_argument("gaussian_mi: index sets must be disjoint");

  std::vector<std::size_t> both = set_a;
  both.insert(both.end(), set_b.begin(), set_b.end());
  const SmallMatrix cab = joint.cov().sub(both);
  const double det_ab = determinant(cab);
  const double scale = std::pow(std::abs(cab.trace()), static_cast<double>(cab.dim()));
  if (!(det_ab > kSingularTol * scale)) {
    throw SingularMatrixError("gaussian_mi: joint covariance of A and B is singular");
  }
  const double det_a = determinant(joint.cov().sub(set_a));
  const double det_b = determinant(joint.cov().sub(set_b));
  return half_log(det_a * det_b / det_ab);
}

}  // namespace stateamp
