#pragma once

// Reference computations used by the tests. None of these call into the
// library's closed forms: covariances are rebuilt from the structural
// equations, the bound formulas are transcribed in their literal (unguarded)
// shape, and the envelopes are found by brute-force search.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>

namespace oracle {

inline double log2_half(double x) { return 0.5 * std::log2(x); }

struct Channel {
  double P, Q, N, s2;
};

inline double qp(const Channel& c) { return c.Q * c.Q / (c.Q + c.s2); }
inline double np(const Channel& c) { return c.Q * c.s2 / (c.Q + c.s2); }
inline double lam(const Channel& c) { return c.Q / (c.Q + c.s2); }

// Each scheme variable as a coefficient vector over the independent sources
// (Vt, W, Xt, Z); the source variances are (Qp, Np, beta P, N).
struct Scheme {
  std::array<double, 4> var;
  std::array<double, 4> S, Y, U, Vt;
};

inline Scheme scheme(const Channel& c, double alpha, double beta) {
  const double Qp = qp(c), Np = np(c);
  const double g = std::sqrt((1.0 - beta) * c.P / Qp);
  Scheme s;
  s.var = {Qp, Np, beta * c.P, c.N};
  s.Vt = {1, 0, 0, 0};
  s.S = {1, 1, 0, 0};
  // X = Xt + g Vt, Y = X + S + Z
  s.Y = {1 + g, 1, 1, 1};
  s.U = {alpha * (1 + g), 0, 1, 0};
  return s;
}

inline double cov(const Scheme& s, const std::array<double, 4>& a, const std::array<double, 4>& b) {
  double v = 0.0;
  for (int i = 0; i < 4; ++i) v += a[i] * b[i] * s.var[i];
  return v;
}

// E[(S - E[S | Y, U])^2] by solving the 2x2 normal equations with Cramer's rule.
inline double distortion(const Channel& c, double alpha, double beta) {
  const Scheme s = scheme(c, alpha, beta);
  const double yy = cov(s, s.Y, s.Y), uu = cov(s, s.U, s.U), yu = cov(s, s.Y, s.U);
  const double sy = cov(s, s.S, s.Y), su = cov(s, s.S, s.U);
  const double det = yy * uu - yu * yu;
  const double ss = cov(s, s.S, s.S);
  if (std::abs(det) <= 1e-12 * (yy * uu)) return ss - sy * sy / yy;
  const double a = (sy * uu - su * yu) / det;
  const double b = (su * yy - sy * yu) / det;
  return ss - a * sy - b * su;
}

// I(U;Y) - I(U;Vt) in bits, each term from the 2x2 log-det formula.
inline double rate(const Channel& c, double alpha, double beta) {
  const Scheme s = scheme(c, alpha, beta);
  const auto mi = [&](const std::array<double, 4>& a, const std::array<double, 4>& b) {
    const double aa = cov(s, a, a), bb = cov(s, b, b), ab = cov(s, a, b);
    return log2_half(aa * bb / (aa * bb - ab * ab));
  };
  return mi(s.U, s.Y) - mi(s.U, s.Vt);
}

// ---------------------------------------------------------------------------
// Converse bounds, literal transcription.

inline double es(const Channel& c, double nbar) {
  return c.Q * nbar * c.s2 / (c.Q * nbar + c.Q * c.s2 + nbar * c.s2);
}

inline double thm2_rmax(const Channel& c, double nbar, double rbar) {
  return log2_half(((c.Q + c.s2) * (c.P + c.N + es(c, nbar)) - rbar * rbar) / ((c.Q + c.s2) * (c.N - nbar)));
}

// (1 + 2^{2R} Q (Nbar + s2)(N - Nbar) / (Nbar s2 (P+Q+N+2 lambda rbar))) E_S,
// as printed; needs s2 > 0. At Nbar = 0 the product is 0/0; E_S / Nbar -> 1
// there, which leaves 2^{2R} Q N / (P+Q+N+2 lambda rbar).
inline double thm2_d(const Channel& c, double nbar, double rbar, double R) {
  const double k = c.P + c.Q + c.N + 2.0 * lam(c) * rbar;
  if (nbar == 0.0) return std::pow(2.0, 2.0 * R) * c.Q * c.N / k;
  return (1.0 + std::pow(2.0, 2.0 * R) * c.Q * (nbar + c.s2) * (c.N - nbar) / (nbar * c.s2 * k)) * es(c, nbar);
}

inline double f(const Channel& c, double x) {
  const double Qp = qp(c), Np = np(c);
  const double v = std::sqrt(x) - std::sqrt(Np / Qp) * std::sqrt(Qp - x);
  return v > 0.0 ? v * v : 0.0;
}

inline double thm3_rmax(const Channel& c, double rbar) {
  return log2_half((c.s2 * (c.N + c.P + c.Q) + c.Q * (c.N + c.P) - rbar * rbar) / ((c.Q + c.s2) * (c.N + np(c))));
}

inline double thm3_d(const Channel& c, double rbar, double R) {
  return f(c, qp(c) * (c.N + np(c)) * std::pow(2.0, 2.0 * R) / (c.P + c.Q + c.N + 2.0 * lam(c) * rbar));
}

// ---------------------------------------------------------------------------
// Brute-force envelopes.

// Largest rbar on a uniform grid over [0, sqrt(P(Q+s2))] with feasible(rbar),
// then bisection between it and the next grid point. Returns empty if no grid
// point is feasible. Both distortion bounds decrease in rbar, so the minimum
// over feasible rbar sits at this boundary.
template <class Feasible>
std::optional<double> largest_feasible_rbar(const Channel& c, std::size_t points, Feasible feasible) {
  const double rmax = std::sqrt(c.P * (c.Q + c.s2));
  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < points; ++i) {
    const double r = rmax * static_cast<double>(i) / static_cast<double>(points - 1);
    if (feasible(r)) last = i;
  }
  if (!last) return std::nullopt;
  if (*last + 1 == points) return rmax;
  double lo = rmax * static_cast<double>(*last) / static_cast<double>(points - 1);
  double hi = rmax * static_cast<double>(*last + 1) / static_cast<double>(points - 1);
  for (int it = 0; it < 100 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

// min over rbar of the correlation bound by grid search over rbar.
inline std::optional<double> thm3_brute(const Channel& c, double R, std::size_t rbar_points = 10000) {
  const auto r = largest_feasible_rbar(c, rbar_points, [&](double rb) { return R <= thm3_rmax(c, rb); });
  if (!r) return std::nullopt;
  // Scan the grid too, in case the bound were not monotone in rbar.
  const double rmax = std::sqrt(c.P * (c.Q + c.s2));
  double best = thm3_d(c, *r, R);
  for (std::size_t i = 0; i < rbar_points; ++i) {
    const double rb = rmax * static_cast<double>(i) / static_cast<double>(rbar_points - 1);
    if (rb <= *r) best = std::min(best, thm3_d(c, rb, R));
  }
  return best;
}

// Inner minimum over rbar for one partition by bisection on feasibility.
inline std::optional<double> thm2_partition(const Channel& c, double nbar, double R) {
  const double rmax = std::sqrt(c.P * (c.Q + c.s2));
  const auto feasible = [&](double rb) { return R <= thm2_rmax(c, nbar, rb); };
  if (!feasible(0.0)) return std::nullopt;
  double rb = rmax;
  if (!feasible(rmax)) {
    double lo = 0.0, hi = rmax;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (feasible(mid) ? lo : hi) = mid;
    }
    rb = lo;
  }
  return thm2_d(c, nbar, rb, R);
}

// max over Nbar in [0, N] on a uniform grid, polished by golden-section
// search around the best grid point. Empty if some partition is infeasible.
inline std::optional<double> thm2_brute(const Channel& c, double R, std::size_t nbar_points = 10000) {
  double best = -std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  const auto nb = [&](std::size_t i) { return c.N * static_cast<double>(i) / static_cast<double>(nbar_points - 1); };
  for (std::size_t i = 0; i < nbar_points; ++i) {
    const auto v = thm2_partition(c, nb(i), R);
    if (!v) return std::nullopt;
    if (*v > best) {
      best = *v;
      arg = i;
    }
  }
  double a = nb(arg == 0 ? 0 : arg - 1);
  double b = nb(std::min(arg + 1, nbar_points - 1));
  const auto val = [&](double x) {
    const auto v = thm2_partition(c, x, R);
    return v ? *v : -std::numeric_limits<double>::infinity();
  };
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = val(x1), f2 = val(x2);
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = val(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = val(x2);
    }
  }
  return std::max({best, f1, f2});
}

}  // namespace oracle
