#pragma once

// Wasserstein distances between finitely supported measures.

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace barronlab {

/// Points are columns of `points`; one weight per point.
struct EmpiricalMeasure {
  Eigen::MatrixXd points;
  Eigen::VectorXd weights;

  EmpiricalMeasure() = default;
  EmpiricalMeasure(Eigen::MatrixXd pts, Eigen::VectorXd w);
  /// Equal weights 1/N on the columns of `pts`.
  static EmpiricalMeasure uniform(Eigen::MatrixXd pts);
  static EmpiricalMeasure dirac(const Eigen::VectorXd& x);

  int dimension() const { return static_cast<int>(points.rows()); }
  int size() const { return static_cast<int>(points.cols()); }
  double mass() const { return weights.sum(); }
  /// Throws InvalidInput unless weights are nonnegative, points finite and,
  /// when `probability`, the mass is 1 within 1e-12.
  void validate(bool probability = true) const;
  /// Rescales to unit mass; `excluded` receives 1 - mass.
  EmpiricalMeasure normalized(double* excluded = nullptr) const;

  friend bool operator==(const EmpiricalMeasure&, const EmpiricalMeasure&) = default;
};

struct Coupling {
  Eigen::MatrixXd gamma;  // |μ| x |ν|

  /// Largest absolute deviation of row/column sums from the marginals.
  double marginal_violation(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) const;
};

/// Pairwise ‖x_i - y_j‖₂^p.
Eigen::MatrixXd cost_matrix(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, int p);

struct TransportResult {
  double value = 0.0;  // W_p
  double cost = 0.0;   // Σ γ_ij c_ij = W_p^p
  Coupling coupling;
};

inline constexpr int kExactSupportBudget = 2000;

/// Exact W_p for p ∈ {1,2} by successive shortest paths on the
/// transportation network. Throws InvalidInput when |μ|+|ν| exceeds the
/// budget (use wasserstein_sinkhorn there).
TransportResult wasserstein_exact(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, int p);

struct SinkhornResult {
  double value = 0.0;  // (Σ γ_ij c_ij)^{1/p} for the regularized plan; approximate
  bool converged = false;
  int iterations = 0;
  double marginal_violation = 0.0;
};

SinkhornResult wasserstein_sinkhorn(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                    int p, double regularization, int max_iterations = 10000);

using VectorMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using ScalarTest = std::function<double(const Eigen::VectorXd&)>;

/// √(mean ‖F_i - G_i‖²) for paired images (columns); an upper bound on W₂
/// between the two pushforwards.
double coupling_from_map(const Eigen::MatrixXd& f_images, const Eigen::MatrixXd& g_images);
double coupling_from_map(const Eigen::MatrixXd& samples, const VectorMap& f, const VectorMap& g);

/// Images of each column of `samples` under f.
Eigen::MatrixXd push_forward(const Eigen::MatrixXd& samples, const VectorMap& f);

struct LipschitzCheck {
  double discrepancy = 0.0;  // |E_μ φ - E_ν φ|
  double bound = 0.0;        // L · W₁(μ, ν)
};

/// Throws InvalidInput if φ violates the Lipschitz bound on sampled pairs of
/// support points, and AssertionFailure if discrepancy > bound + 1e-9.
LipschitzCheck lipschitz_discrepancy(const ScalarTest& phi, double lipschitz,
                                     const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

/// Largest ratio |φ(x) - φ(y)| / ‖x - y‖ over pairs of support points of μ
/// and ν (all pairs up to 400 points, a fixed stride beyond that).
double observed_lipschitz(const ScalarTest& phi, const EmpiricalMeasure& mu,
                          const EmpiricalMeasure& nu);

/// max over candidates of E_μ φ - E_ν φ; each candidate spot-checked to be 1-Lipschitz.
double kr_dual_lower(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                     const std::vector<ScalarTest>& candidates);

/// sup over the class of |E_μ f - E_ν f|.
double mmd_discrepancy(const std::vector<ScalarTest>& functions, const EmpiricalMeasure& mu,
                       const EmpiricalMeasure& nu);

double expectation(const ScalarTest& f, const EmpiricalMeasure& mu);

/// CSV rows "weight,x1,...,xn" with an optional header line starting with a letter.
EmpiricalMeasure read_measure_csv(std::istream& in);
EmpiricalMeasure read_measure_csv(const std::string& path);
void write_measure_csv(std::ostream& out, const EmpiricalMeasure& mu);

}  // namespace barronlab
