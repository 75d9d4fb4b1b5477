#pragma once

// Two-layer sigmoidal networks f_k(x) = c0 + Σ c_i σ(<a_i, x> + b_i) with an
// L¹ budget on the outer coefficients, fitted greedily.

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace barronlab {

enum class Activation { logistic, scaled_tanh, relu_difference };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// σ(z), valued in [0, 1].
double activate(Activation a, double z);
/// σ'(z); for relu_difference the one-sided derivative from the right.
double activate_derivative(Activation a, double z);

struct TwoLayerNet {
  int input_dim = 0;
  Eigen::MatrixXd a;  // input_dim x k, one column per node
  Eigen::VectorXd b;  // k
  Eigen::VectorXd c;  // k
  double c0 = 0.0;
  Activation activation = Activation::logistic;
  double budget = std::numeric_limits<double>::infinity();

  int nodes() const { return static_cast<int>(c.size()); }
  double budget_used() const { return c.cwiseAbs().sum(); }
  /// Throws InvalidInput on shape mismatch, non-finite values or budget excess.
  void validate() const;

  friend bool operator==(const TwoLayerNet&, const TwoLayerNet&) = default;
};

double eval_net(const TwoLayerNet& net, const Eigen::VectorXd& x);
/// One output per column of `points`.
Eigen::VectorXd eval_net(const TwoLayerNet& net, const Eigen::MatrixXd& points);

/// Hidden-layer activations, one row per node and one column per point.
Eigen::MatrixXd hidden_layer(const TwoLayerNet& net, const Eigen::MatrixXd& points);

struct FitReport {
  double mse = 0.0;            // Σ w_i (y_i - f_k(x_i))²
  double budget_used = 0.0;
  double budget = 0.0;
  int nodes = 0;
  int iterations = 0;          // inner optimiser iterations, all nodes
  std::uint64_t seed = 0;
  double target_bound = 0.0;   // (2C)² / k
  bool overfit_warning = false;
  std::vector<double> mse_path;  // mse after each greedy node
  friend bool operator==(const FitReport&, const FitReport&) = default;
};

struct FitOptions {
  int restarts = 64;
  int refined_candidates = 4;   // best restarts passed to local refinement
  int refine_iterations = 40;
  int coefficient_iterations = 3000;
  friend bool operator==(const FitOptions&, const FitOptions&) = default;
};

/// Greedy fit of k nodes against targets y at points X (columns) with
/// nonnegative weights w (Σw ≤ 1). Σ|c_i| ≤ 2C holds after every step.
std::pair<TwoLayerNet, FitReport> fit_two_layer(
    const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
    double C, int k, Activation activation, std::uint64_t seed,
    const FitOptions& options = {});

struct VectorFit {
  std::vector<TwoLayerNet> nets;
  std::vector<FitReport> reports;
  double aggregate_rms = 0.0;  // (Σ_j mse_j)^{1/2}
};

/// Independent scalar fits of each row of Y (m x N), sharing X and w.
VectorFit vector_fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                     const Eigen::VectorXd& w, double C, int k,
                     Activation activation, std::uint64_t seed,
                     const FitOptions& options = {});

/// Euclidean projection onto {c : Σ|c_i| ≤ radius}.
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double radius);

}  // namespace barronlab
