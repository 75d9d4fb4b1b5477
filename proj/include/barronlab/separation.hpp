#pragma once

// A radial function f(x) = f₁(‖x‖) whose Barron constant is large although
// f = h ∘ ‖·‖² with both factors having modest Barron constants.

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "barronlab/barron.hpp"
#include "barronlab/special.hpp"

namespace barronlab {

struct SeparationConfig {
  int n = 3;
  double C1 = 1.0;
  double C2 = 2.0;
  double C3 = 4.0;
  int smoothness = 4;  // m of the bump density used for f₁

  // Derived by resolve().
  double K1 = 0.0;
  double K2 = 0.0;
  double K3 = 0.0;
  double eps = 0.0;

  /// Checks n ≡ 3 (mod 4), C1·C3 ≥ 3/2, C2 > C1 ≥ 1, C3 ≥ 1, then fills K1, ε
  /// (first favourable cosine interval at or beyond C1√n), K2 = C2·n and
  /// K3 = C3√n, and checks K2 > K1 + ε. Throws InvalidInput on violation.
  SeparationConfig& resolve();
  /// resolve() on a copy.
  SeparationConfig resolved() const;

  friend bool operator==(const SeparationConfig&, const SeparationConfig&) = default;
};

/// Integer polynomial in n, lowest degree first.
using IntPolynomial = std::vector<std::int64_t>;
using Rational = boost::multiprecision::cpp_rational;

std::int64_t evaluate(const IntPolynomial& p, std::int64_t n);
double evaluate(const IntPolynomial& p, double n);

/// ((I - Δ)^k f)(x) = Σ c_{i,j} n^j f₁^{(i)}(r) / r^j for radial f.
///
/// c_{i,j} is a rational function of n of the form P_{i,j}(n) / n^j with P
/// an integer polynomial; `terms` stores P_{i,j} = n^j c_{i,j}.
struct LaplacianCoeffs {
  int order = 0;
  std::map<std::pair<int, int>, IntPolynomial> terms;

  /// c_{i,j} at dimension n, exactly.
  Rational coefficient(int i, int j, std::int64_t n) const;
  /// Σ |c_{i,j}| at dimension n, exactly.
  Rational abs_sum(std::int64_t n) const;
  /// The recursion's guarantee needs k ≤ n/4 + 1.
  bool valid_for(int n) const { return 4 * (order - 1) <= n; }
};

LaplacianCoeffs radial_laplacian_coeffs(int k);

/// Σ_{i,j} P_{i,j}(n) f₁^{(i)}(r) / r^j at each r. Throws DomainError at
/// r = 0 when a term with j > 0 has a nonzero derivative there, and
/// InvalidInput when the profile lacks derivatives of order 2k.
Eigen::VectorXd apply_radial_operator(const LaplacianCoeffs& coeffs,
                                      const RadialProfile& profile, int n,
                                      const Eigen::VectorXd& radii);

/// f₁ = bump density of smoothness m on [K1, K1 + ε].
RadialProfile build_f(const SeparationConfig& config);

/// g(x) = b(‖x‖ / K2) with the plateau of smoothness (n + 1) / 2.
RadialProfile build_g(const SeparationConfig& config);

struct FourierL1Bound {
  double bound = 0.0;          // upper bound on ∫|ĝ|
  double sobolev_norm = 0.0;   // (∫ [(I-Δ)^{(n+1)/4} g]²)^{1/2}
  double prefactor = 0.0;      // (Γ(1/2) / (2^n π^{n/2} Γ((n+1)/2)))^{1/2}
  std::optional<double> grid_estimate;  // Σ|ĝ|Δω on a full grid (n = 3 only)
};

/// Upper bound on ∫|ĝ| for radial g supported in the ball of radius
/// `support`, through the Sobolev-weighted Cauchy-Schwarz bound with
/// k = (n + 1) / 2. Requires n ≡ 3 (mod 4).
FourierL1Bound g_l1_fourier_bound(const RadialProfile& g, int n, double support,
                                  bool with_grid_estimate = false, int grid_resolution = 48);
FourierL1Bound g_l1_fourier_bound(const SeparationConfig& config,
                                  bool with_grid_estimate = false);

/// Surface area of the unit sphere in R^n.
double sphere_area(int n);

struct SpectralShell {
  double lower = 0.0;   // shell in ‖ω‖ around the peak of |f̂| nearest K3
  double upper = 0.0;
  double peak = 0.0;    // |f̂| at the peak
  double at_k3 = 0.0;   // f̂ at ‖ω‖ = K3
  double weighted_mass = 0.0;  // ∫_shell ‖ω‖ |f̂| dω
};

/// Scans |f̂| over one oscillation period around K3 for its largest value and
/// widens to the interval where |f̂| stays above half of it.
SpectralShell spectral_shell(const SeparationConfig& config, int lattice = 400);

/// 2K2 ∫‖ω‖|f̂| / ∫|ĝ| on the ball of radius 2K2, the numerator truncated at
/// the quadrature cutoff (truncation only lowers it).
BarronEstimate f_lower_bound(const SeparationConfig& config, int points_per_period = 16);

/// 2K2 ∫‖ω‖|f̂| using f as its own extension. Radial quadrature runs period
/// by period up to 2π(m+2)/ε and a power-law tail estimate is added. Infinite
/// (with a warning) when the integral diverges, i.e. m ≤ (n - 1) / 2.
BarronEstimate f_upper_bound(const SeparationConfig& config, int points_per_period = 16);

struct FactorBounds {
  BarronEstimate square_norm;  // ‖x‖² on the ball of radius r
  BarronEstimate one_dim;      // y ↦ f₁(√y) on [-s, s]
};

FactorBounds factor_upper_bounds(const SeparationConfig& config, double r, double s,
                                 int lattice = 20001);

struct SeparationRow {
  SeparationConfig config;
  double lower_f = 0.0;
  double upper_sq = 0.0;
  double upper_1d = 0.0;
  double ratio = 0.0;         // lower_f / (upper_sq + upper_1d)
  double upper_f = 0.0;       // direct upper bound on C_f for the sandwich
  double g_bound = 0.0;
  double shell_lower = 0.0;
  double shell_upper = 0.0;
  double shell_mass = 0.0;     // ∫_shell ‖ω‖|f̂|, diagnostic
  double theory_lower_pow2 = 0.0;  // 2^{-n} C1^{n/2-3} C3^{n/2} C2^{-(n/2-1)} n^{1/2}
  double theory_lower_pow5 = 0.0;  // same with 5^{-n/2}
  double theory_sq = 0.0;          // n r³
  double theory_1d = 0.0;          // s C1^{1/2} C3^{3/2} n²
  friend bool operator==(const SeparationRow&, const SeparationRow&) = default;
};

struct SeparationReport {
  std::vector<SeparationRow> rows;
  /// Per n: whether the ratio is strictly increasing along the C3 grid.
  std::map<int, bool> increasing_in_c3;
  /// Per n: smallest C3 with ratio > 1 among the grid and the doubling
  /// sequence max(3/2C1, 1)·2^k up to search_limit, if any.
  std::map<int, std::optional<double>> smallest_c3_above_one;
  /// Largest C3 tried by the search.
  double search_limit = 0.0;
  friend bool operator==(const SeparationReport&, const SeparationReport&) = default;
};

SeparationRow separation_row(SeparationConfig config);

/// One row per (n, C3); r = 2K2 and s = r² for the factor bounds.
SeparationReport separation_report(const std::vector<int>& ns, const std::vector<double>& c3s,
                                   double C1 = 1.0, double C2 = 2.0,
                                   double search_limit = 64.0);

/// CSV with columns n, C1, C2, C3, K1, eps, lower_f, upper_sq, upper_1d, ratio
/// followed by diagnostic columns.
std::string separation_csv(const SeparationReport& report);

}  // namespace barronlab
