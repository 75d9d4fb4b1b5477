#pragma once

// Numeric bounds on Barron constants C_{f,B} = inf_F ∫ ‖ω‖_B |F̂(ω)| dω and
// the calculus used to combine them.

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "barronlab/special.hpp"
#include "barronlab/spectral.hpp"

namespace barronlab {

enum class Direction { upper, lower };

std::string to_string(Direction d);

struct BarronEstimate {
  Direction direction = Direction::upper;
  double value = 0.0;
  BoundedSetd set = BoundedSetd::ball(1, 1.0);
  std::string method;      // extension recipe or derivation chain
  int resolution = 0;      // spatial points per axis, 0 if not grid based
  double cutoff = 0.0;     // frequency cutoff, 0 if not grid based
  int freq_resolution = 0;
  double tail_estimate = 0.0;
  std::string warning;     // empty when the estimate looks reliable
  friend bool operator==(const BarronEstimate&, const BarronEstimate&) = default;
};

/// Bounds on ∫|f̂| (a) and ∫‖ω‖|f̂| (c).
struct GammaPair {
  double a = 0.0;
  double c = 0.0;
  friend bool operator==(const GammaPair&, const GammaPair&) = default;
};

/// Σ_k ‖ω_k‖_B |F̂(ω_k)| Δω for one explicit extension F.
BarronEstimate upper_bound_from_extension(const GridFunctiond& F,
                                          const BoundedSetd& B, double cutoff,
                                          int freq_resolution,
                                          std::string recipe = "explicit extension");

/// r ∫‖((∇f) g)^‖ / ∫|ĝ| with supp g inside the ball of radius r.
BarronEstimate lower_bound(const std::vector<GridFunctiond>& grad_f,
                           const GridFunctiond& g, double r, double cutoff,
                           int freq_resolution);

/// a = 2^{-1/2}(∫h² + h'²)^{1/2}, c = 2^{-1/2}(∫h'² + h''²)^{1/2} by the
/// trapezoid rule on a uniform lattice.
GammaPair l1_fourier_bound_1d(std::span<const double> h,
                              std::span<const double> h1,
                              std::span<const double> h2, double spacing);

/// Σ|β_i| value_i over upper estimates sharing one set.
BarronEstimate combine_subadditive(
    const std::vector<std::pair<double, BarronEstimate>>& terms);

/// x ↦ h(<a,x>) on the ball of radius r in R^n keeps the bound of h on [-r,r].
BarronEstimate ridge_lift(const BarronEstimate& h, const Eigen::VectorXd& a,
                          int n);

/// g ∈ Γ(a, c) ⇒ g^k ∈ Γ(a^k, k a^{k-1} c).
GammaPair power_rule(GammaPair g, int k);

struct IdentityExtension {
  double r = 0.0;
  GammaPair pair;
  Profile1D extension;  // x · b_(r)(x), supported on [-2r, 2r]
};

/// Extension of x ↦ x from [-r, r] using the m = 2 plateau.
IdentityExtension identity_extension(double r, int lattice = 20001);

/// Upper bound on C_{‖x‖², rB_n}: identity extension, square, ridge lift per
/// coordinate and sum over the n coordinates.
BarronEstimate square_norm_bound(int n, double r);

/// diam(K) Σ|c_i| ‖a_i‖ for a finite network (a_i as columns). Diagnostic
/// only; no bound is asserted.
double weak_converse_diagnostic(double diameter, const Eigen::VectorXd& c,
                                const Eigen::MatrixXd& a);

/// f · b_(r)(‖x‖) sampled on the cube of half-width `half_width` (default
/// 2.05 r) with a plateau of smoothness m. Equals f on the ball of radius r.
GridFunctiond windowed_extension(
    const std::function<double(const Eigen::VectorXd&)>& f, int n, double r,
    int resolution, int m = 4, double half_width = 0.0);

}  // namespace barronlab
