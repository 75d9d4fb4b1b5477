#include "barronlab/special.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <memory>
#include <numbers>

#include "barronlab/errors.hpp"
#include "barronlab/quadrature.hpp"

namespace barronlab {

namespace {

constexpr double kPi = std::numbers::pi;

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

bool is_integer(double v) { return std::abs(v - std::round(v)) < 1e-12; }

double falling(int p, int j) {
  double r = 1.0;
  for (int i = 0; i < j; ++i) r *= (p - i);
  return r;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double bisect(const std::function<double(double)>& fn, double lo, double hi) {
  double flo = fn(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi));
       ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = fn(mid);
    if ((fm >= 0) == (flo >= 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw InvalidInput("log_gamma: argument must be positive");
  if (x < 0.5) {
    return std::log(kPi / std::abs(std::sin(kPi * x))) - log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (z + i);
  const double t = z + 7.5;
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

double gamma_fn(double x) {
  if (x <= 0.0 && is_integer(x)) throw DomainError("gamma_fn: pole");
  if (x < 0.5) return kPi / (std::sin(kPi * x) * gamma_fn(1.0 - x));
  return std::exp(log_gamma(x));
}

std::string to_string(BesselMethod m) {
  switch (m) {
    case BesselMethod::series:
      return "series";
    case BesselMethod::recurrence:
      return "recurrence";
    case BesselMethod::krasikov:
      return "krasikov";
  }
  return "unknown";
}

double bessel_switchover(double order) { return std::max(2.0 * order, 20.0); }

BesselEval bessel_j_series(double order, double x, double tolerance) {
  if (!(order >= 0.0) || !(x >= 0.0) || !std::isfinite(x)) {
    throw InvalidInput("bessel_j: requires order >= 0 and finite x >= 0");
  }
  BesselEval out{order, x, 0.0, BesselMethod::series, 0.0};
  if (x == 0.0) {
    out.value = (order == 0.0) ? 1.0 : 0.0;
    return out;
  }
  using ld = long double;
  const ld half = static_cast<ld>(x) / 2;
  const ld q = half * half;
  ld term = std::exp(static_cast<ld>(order) * std::log(half) -
                     static_cast<ld>(log_gamma(order + 1.0)));
  ld sum = term;
  ld largest = std::abs(term);
  int m = 0;
  for (; m < 2000; ++m) {
    term *= -q / ((m + 1) * (m + 1 + static_cast<ld>(order)));
    sum += term;
    largest = std::max(largest, std::abs(term));
    if (m > half && std::abs(term) <= LDBL_EPSILON * std::abs(sum)) break;
  }
  const double cancellation =
      static_cast<double>(largest * LDBL_EPSILON * 64 + std::abs(term));
  // log_gamma carries ~1e-15 relative error, which scales every term alike.
  out.value = static_cast<double>(sum);
  out.error_bound = cancellation + std::abs(out.value) * 2e-14;
  if (out.error_bound > tolerance) {
    throw AccuracyError("bessel_j: series cancellation exceeds tolerance",
                        out.value, out.error_bound);
  }
  return out;
}

BesselEval bessel_j_recurrence(double order, double x) {
  if (!(order >= 0.0) || !(x > 0.0) || !std::isfinite(x)) {
    throw InvalidInput("bessel_j_recurrence: requires order >= 0, x > 0");
  }
  BesselEval out{order, x, 0.0, BesselMethod::recurrence, 1e-13};
  if (is_integer(order)) {
    // Miller: backward recurrence normalised by J0 + 2 Σ J_{2i} = 1.
    const int n = static_cast<int>(std::lround(order));
    const int top = std::max(n, static_cast<int>(x));
    const int start =
        2 * ((top + 20 + static_cast<int>(std::sqrt(40.0 * top))) / 2);
    double jp = 0.0;
    double j = 1e-300;
    double sum = 0.0;
    double ans = 0.0;
    for (int k = start; k > 0; --k) {
      const double jm = 2.0 * k / x * j - jp;
      jp = j;
      j = jm;
      if (std::abs(j) > 1e250) {
        j *= 1e-250;
        jp *= 1e-250;
        ans *= 1e-250;
        sum *= 1e-250;
      }
      if (k - 1 >= 2 && (k - 1) % 2 == 0) sum += 2.0 * j;
      if (k - 1 == n) ans = j;
    }
    out.value = ans / (j + sum);
    return out;
  }
  if (is_integer(order - 0.5)) {
    const int l = static_cast<int>(std::lround(order - 0.5));
    if (!(x > l)) return bessel_j_series(order, x);
    // Spherical Bessel j_l by upward recurrence, stable for x > l.
    double jm = std::sin(x) / x;
    double j = std::sin(x) / (x * x) - std::cos(x) / x;
    if (l == 0) j = jm;
    for (int i = 1; i < l; ++i) {
      const double jn = (2.0 * i + 1.0) / x * j - jm;
      jm = j;
      j = jn;
    }
    out.value = std::sqrt(2.0 * x / kPi) * j;
    return out;
  }
  throw InvalidInput("bessel_j_recurrence: order must be a multiple of 1/2");
}

KrasikovTerms krasikov_terms(int d, double x) {
  if (d < 2) throw DomainError("krasikov_terms: requires d >= 2");
  if (!(x >= d)) throw DomainError("krasikov_terms: requires x >= d");
  const double s = std::sqrt(static_cast<double>(d) * d - 1.0) / (2.0 * x);
  KrasikovTerms t;
  t.c = std::sqrt(1.0 - s * s);
  t.f = t.c + s * std::asin(s);
  return t;
}

BesselEval krasikov_bessel(int d, double x) {
  const KrasikovTerms t = krasikov_terms(d, x);
  BesselEval out{0.5 * d, x, 0.0, BesselMethod::krasikov, std::pow(x, -1.5)};
  out.value = std::sqrt(2.0 / (kPi * t.c * x)) *
              std::cos(-(d + 1) * kPi / 4.0 + t.f * x);
  return out;
}

BesselEval bessel_j(double order, double x, BesselMode mode) {
  if (!(order >= 0.0) || !(x >= 0.0) || !std::isfinite(order) ||
      !std::isfinite(x)) {
    throw InvalidInput("bessel_j: requires finite order >= 0 and x >= 0");
  }
  if (x <= bessel_switchover(order)) return bessel_j_series(order, x);
  const double twice = 2.0 * order;
  if (is_integer(twice)) {
    const int d = static_cast<int>(std::lround(twice));
    if (mode == BesselMode::certified && d >= 2) return krasikov_bessel(d, x);
    return bessel_j_recurrence(order, x);
  }
  return bessel_j_series(order, x);
}

// ---------------------------------------------------------------------------

double Profile1D::derivative(int order, double x) const {
  if (order < 0 || order > max_order_) {
    throw InvalidInput("Profile1D: derivative order out of range");
  }
  return derivative_(order, x);
}

Profile1D Profile1D::scaled(double factor) const {
  auto inner = derivative_;
  return Profile1D(
      [inner, factor](int k, double x) { return factor * inner(k, x); },
      lower_, upper_, max_order_);
}

Profile1D Profile1D::translated(double shift) const {
  auto inner = derivative_;
  return Profile1D(
      [inner, shift](int k, double x) { return inner(k, x - shift); },
      lower_ + shift, upper_ + shift, max_order_);
}

BumpFamily::BumpFamily(int m) : m_(m), normalizer_(1.0) {
  if (m < 2) throw InvalidInput("BumpFamily: smoothness m must be >= 2");
  const int p = m + 1;
  const double integral = adaptive_simpson(
      [p](double x) { return std::pow(4.0 * x * (1.0 - x), p); }, 0.0, 1.0,
      1e-15, 16);
  normalizer_ = 1.0 / integral;
  if (std::abs(normalizer_ / beta_normalizer() - 1.0) > 1e-10) {
    throw std::logic_error("BumpFamily: quadrature normaliser disagrees with "
                           "the Beta-function value");
  }
}

double BumpFamily::beta_normalizer() const {
  const int p = m_ + 1;
  const double log_beta = 2.0 * std::lgamma(p + 1.0) - std::lgamma(2.0 * p + 2);
  return std::exp(-p * std::log(4.0) - log_beta);
}

double BumpFamily::density_derivative(int k, double x) const {
  if (x < 0.0 || x > 1.0 || k < 0) return 0.0;
  const int p = m_ + 1;
  double s = 0.0;
  for (int j = 0; j <= k; ++j) {
    const int i = k - j;
    if (j > p || i > p) continue;
    const double u = falling(p, j) * std::pow(x, p - j);
    const double v =
        ((i % 2) ? -1.0 : 1.0) * falling(p, i) * std::pow(1.0 - x, p - i);
    s += binomial(k, j) * u * v;
  }
  return normalizer_ * std::pow(4.0, p) * s;
}

double BumpFamily::step(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x > 0.5) return 1.0 - step(1.0 - x);
  const int p = m_ + 1;
  double s = 0.0;
  for (int j = 0; j <= p; ++j) {
    s += ((j % 2) ? -1.0 : 1.0) * binomial(p, j) * std::pow(x, p + 1 + j) /
         (p + 1 + j);
  }
  return std::clamp(normalizer_ * std::pow(4.0, p) * s, 0.0, 1.0);
}

double BumpFamily::step_derivative(int k, double x) const {
  return k == 0 ? step(x) : density_derivative(k - 1, x);
}

double BumpFamily::plateau_derivative(int k, double x) const {
  const double a = std::abs(x);
  if (a < 1.0) return k == 0 ? 1.0 : 0.0;
  if (a > 2.0) return 0.0;
  const double sign = (x >= 0.0) ? -1.0 : 1.0;
  return std::pow(sign, k) * step_derivative(k, 2.0 - a);
}

Profile1D bump_density(int m, double K) {
  if (!(K > 0.0)) throw InvalidInput("bump_density: K must be positive");
  auto fam = std::make_shared<const BumpFamily>(m);
  return Profile1D(
      [fam, K](int k, double x) {
        return fam->density_derivative(k, x / K) / std::pow(K, k + 1);
      },
      0.0, K, 2 * (m + 1));
}

Profile1D smooth_step(int m) {
  auto fam = std::make_shared<const BumpFamily>(m);
  return Profile1D([fam](int k, double x) { return fam->step_derivative(k, x); },
                   0.0, 1.0, 2 * m + 3);
}

Profile1D plateau(int m, double K) {
  if (!(K > 0.0)) throw InvalidInput("plateau: K must be positive");
  auto fam = std::make_shared<const BumpFamily>(m);
  return Profile1D(
      [fam, K](int k, double x) {
        return fam->plateau_derivative(k, x / K) / std::pow(K, k);
      },
      -2.0 * K, 2.0 * K, 2 * m + 3);
}

TestFunctionFamily describe(int m, TestFunctionKind kind, double K) {
  return {m, kind, K, BumpFamily(m).normalizer()};
}

std::vector<double> derivative_maxima(const Profile1D& p, int order,
                                      int lattice) {
  std::vector<double> out(order + 1, 0.0);
  const double h = (p.upper() - p.lower()) / (lattice - 1);
  for (int i = 0; i < lattice; ++i) {
    const double x = p.lower() + i * h;
    for (int k = 0; k <= order; ++k) {
      out[k] = std::max(out[k], std::abs(p.derivative(k, x)));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

double cos_condition(int n, double K3, double r) {
  // K3 * r >= n up to rounding when K3, r >= sqrt(n).
  double x = K3 * r;
  if (x < n && x >= n * (1.0 - 1e-12)) x = n;
  const KrasikovTerms t = krasikov_terms(n, x);
  return std::cos(-(n + 1) * kPi / 4.0 + t.f * x);
}

CosInterval scan_cos_interval(int n, double K3, double start_at) {
  if (n % 4 != 3) throw InvalidInput("scan_cos_interval: n must be 3 mod 4");
  const double root_n = std::sqrt(static_cast<double>(n));
  if (K3 < root_n * (1 - 1e-12) || start_at < root_n * (1 - 1e-12)) {
    throw InvalidInput("scan_cos_interval: requires K3 >= sqrt(n) and "
                       "start_at >= sqrt(n)");
  }
  const double threshold = 1.0 / std::sqrt(2.0);
  const auto excess = [&](double r) {
    return cos_condition(n, K3, r) - threshold;
  };
  const double h = kPi / (64.0 * K3);
  const double limit = start_at + 10.0 * (4.0 * kPi / (K3 * std::sqrt(0.75)));
  const double min_length = kPi / (2.0 * K3);

  bool inside = excess(start_at) >= 0.0;
  double run_start = start_at;
  bool partial = inside;
  for (long i = 1;; ++i) {
    const double r = start_at + i * h;
    if (r > limit) break;
    const bool now = excess(r) >= 0.0;
    if (now && !inside) {
      run_start = bisect(excess, r - h, r);
      partial = false;
    } else if (!now && inside) {
      const double run_end = bisect(excess, r - h, r);
      const double length = run_end - run_start;
      if (!partial || length >= min_length) {
        const double margin = 1e-9 * length;
        return {run_start + margin, length - 2.0 * margin};
      }
    }
    inside = now;
  }
  throw SearchError("scan_cos_interval: no interval found within the "
                    "guaranteed search window");
}

}  // namespace barronlab
