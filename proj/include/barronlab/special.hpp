#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace barronlab {

// ---------------------------------------------------------------------------
// Gamma function

/// log Γ(x) for x > 0 via the Lanczos approximation (g = 7, 9 terms).
double log_gamma(double x);
/// Γ(x) for real x not a non-positive integer.
double gamma_fn(double x);

// ---------------------------------------------------------------------------
// Bessel functions of the first kind

enum class BesselMethod { series, recurrence, krasikov };

/// `accurate` picks the power series below the switchover and an exact
/// three-term recurrence above it; `certified` substitutes the Krasikov
/// closed form wherever it applies (order d/2, d >= 2, x >= switchover).
enum class BesselMode { accurate, certified };

struct BesselEval {
  double order = 0.0;
  double argument = 0.0;
  double value = 0.0;
  BesselMethod method = BesselMethod::series;
  double error_bound = 0.0;
};

std::string to_string(BesselMethod m);

/// max(2α, 20): series below, asymptotic or recurrence above.
double bessel_switchover(double order);

/// J_α(x) for α >= 0, x >= 0.
///
/// Throws AccuracyError (with the best available value) when α is not a
/// multiple of 1/2 and x is so large that the series loses all precision.
BesselEval bessel_j(double order, double x,
                    BesselMode mode = BesselMode::accurate);

/// Power series summed in extended precision. Throws AccuracyError when the
/// cancellation estimate exceeds `tolerance`.
BesselEval bessel_j_series(double order, double x, double tolerance = 1e-10);

/// Exact recurrences: Miller's backward recurrence for integer order,
/// spherical-Bessel upward recurrence for half-integer order (x > order).
BesselEval bessel_j_recurrence(double order, double x);

struct KrasikovTerms {
  double c = 1.0;
  double f = 1.0;
};

/// c_{d,x} and f_{d,x}; throws DomainError when d < 2 or x < d.
KrasikovTerms krasikov_terms(int d, double x);

/// Closed-form approximation of J_{d/2}(x) with error bound x^{-3/2}.
BesselEval krasikov_bessel(int d, double x);

// ---------------------------------------------------------------------------
// One-dimensional profiles

/// A real function of one variable with derivatives on demand. Outside
/// [lower, upper] the function is constant on each side (zero for densities
/// and plateaus, 0 and 1 for the step).
class Profile1D {
 public:
  using DerivativeFn = std::function<double(int order, double x)>;

  Profile1D() = default;
  Profile1D(DerivativeFn derivative, double lower, double upper,
            int max_order)
      : derivative_(std::move(derivative)),
        lower_(lower),
        upper_(upper),
        max_order_(max_order) {}

  double operator()(double x) const { return derivative_(0, x); }
  double derivative(int order, double x) const;

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  int max_order() const { return max_order_; }

  Profile1D scaled(double factor) const;
  Profile1D translated(double shift) const;

 private:
  DerivativeFn derivative_ = [](int, double) { return 0.0; };
  double lower_ = 0.0;
  double upper_ = 0.0;
  int max_order_ = 0;
};

/// f(x) = f_1(‖x‖); the radial profile of a radial function on R^n.
using RadialProfile = Profile1D;

// ---------------------------------------------------------------------------
// Compactly supported test functions

enum class TestFunctionKind { density, step, plateau };

struct TestFunctionFamily {
  int smoothness = 2;
  TestFunctionKind kind = TestFunctionKind::density;
  double scale = 1.0;
  double normalizer = 1.0;
};

/// g(x) = C_m 4^{m+1} x^{m+1} (1-x)^{m+1} on [0, 1] together with its
/// antiderivative G and the plateau b(x) = G(2 - |x|).
class BumpFamily {
 public:
  explicit BumpFamily(int m);

  int smoothness() const { return m_; }
  /// C_m, from adaptive quadrature.
  double normalizer() const { return normalizer_; }
  /// 1 / (4^{m+1} B(m+2, m+2)), the closed form used to validate C_m.
  double beta_normalizer() const;

  double density(double x) const { return density_derivative(0, x); }
  double density_derivative(int k, double x) const;
  double step(double x) const;
  double step_derivative(int k, double x) const;
  double plateau(double x) const { return plateau_derivative(0, x); }
  double plateau_derivative(int k, double x) const;

 private:
  int m_;
  double normalizer_;
};

/// (1/K) g(x/K): nonnegative, supported on [0, K], unit integral.
Profile1D bump_density(int m, double K);
/// G: 0 below 0, 1 above 1, nondecreasing.
Profile1D smooth_step(int m);
/// b(x/K): 1 on [-K, K], 0 outside [-2K, 2K].
Profile1D plateau(int m, double K);

TestFunctionFamily describe(int m, TestFunctionKind kind, double K);

/// max |p^{(k)}| over a uniform lattice on [lower, upper], for k = 0..order.
std::vector<double> derivative_maxima(const Profile1D& p, int order,
                                      int lattice = 4001);

// ---------------------------------------------------------------------------
// Interval on which the Bessel phase is favourable

struct CosInterval {
  double start = 0.0;   // K1
  double length = 0.0;  // ε
};

/// First interval [K1, K1 + ε], K1 >= start_at, on which
/// cos(-(n+1)π/4 + f_{n, K3 r} K3 r) >= 1/√2 throughout.
CosInterval scan_cos_interval(int n, double K3, double start_at);

/// cos(-(n+1)π/4 + f_{n, K3 r} K3 r).
double cos_condition(int n, double K3, double r);

}  // namespace barronlab
