#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace stateamp {

struct ScalarMinimum {
  double x = 0.0;
  double value = std::numeric_limits<double>::infinity();
};

// Golden-section minimization of a unimodal function on [lo, hi]. Stops once
// the bracket is narrower than `width`. The returned point is the best one
// evaluated, including the bracket ends.
template <typename F>
ScalarMinimum golden_section_minimize(F&& f, double lo, double hi, double width = 1e-8,
                                      int max_iter = 200) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  ScalarMinimum best{lo, f(lo)};
  const double fhi = f(hi);
  if (fhi < best.value) best = {hi, fhi};

  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > width; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  if (fc < best.value) best = {c, fc};
  if (fd < best.value) best = {d, fd};
  return best;
}

// Uniform grid scan followed by golden refinement between the neighbours of
// the best grid point. Tolerates mild multimodality at grid resolution.
template <typename F>
ScalarMinimum grid_then_golden(F&& f, double lo, double hi, std::size_t points, double width = 1e-8) {
  if (points < 2) points = 2;
  const double step = (hi - lo) / static_cast<double>(points - 1);
  std::size_t arg = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points; ++i) {
    const double v = f(lo + step * static_cast<double>(i));
    if (v < best) {
      best = v;
      arg = i;
    }
  }
  const double a = lo + step * static_cast<double>(arg == 0 ? 0 : arg - 1);
  const double b = lo + step * static_cast<double>(arg + 1 >= points ? points - 1 : arg + 1);
  ScalarMinimum refined = golden_section_minimize(f, a, b, width);
  const double xg = lo + step * static_cast<double>(arg);
  if (best <= refined.value) return {xg, best};
  return refined;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = hi;
  return out;
}

}  // namespace stateamp
