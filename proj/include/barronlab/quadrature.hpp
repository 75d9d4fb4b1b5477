#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

namespace barronlab {

namespace detail {

template <class F>
double simpson_step(F& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature on [a, b], started from `panels` equal panels
/// so that oscillatory integrands are resolved before refinement kicks in.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol,
                        int panels = 1, int max_depth = 40) {
  if (panels < 1) throw std::invalid_argument("adaptive_simpson: panels < 1");
  if (b == a) return 0.0;
  const double h = (b - a) / panels;
  const double panel_tol = tol / panels;
  double total = 0.0;
  double x0 = a;
  double f0 = f(x0);
  for (int p = 0; p < panels; ++p) {
    const double x1 = (p + 1 == panels) ? b : a + (p + 1) * h;
    const double xm = 0.5 * (x0 + x1);
    const double fm = f(xm);
    const double f1 = f(x1);
    const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
    total += detail::simpson_step(f, x0, x1, f0, fm, f1, whole, panel_tol,
                                  max_depth);
    x0 = x1;
    f0 = f1;
  }
  return total;
}

/// Trapezoid rule on uniformly spaced samples.
inline double trapezoid(std::span<const double> samples, double spacing) {
  if (samples.size() < 2) return 0.0;
  double s = 0.5 * (samples.front() + samples.back());
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) s += samples[i];
  return s * spacing;
}

}  // namespace barronlab
