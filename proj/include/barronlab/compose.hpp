#pragma once

// Layer-by-layer approximation of a composition f_l ∘ … ∘ f_1 of Lipschitz
// Barron maps by a deep sigmoidal network, with exclusion-set bookkeeping.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "barronlab/netfit.hpp"
#include "barronlab/rng.hpp"
#include "barronlab/transport.hpp"

namespace barronlab {

/// One map f_i : K_{i-1} → K_i. All K_i are origin-centred balls.
struct LayerSpec {
  std::string name;
  VectorMap map;
  int in_dim = 0;
  int out_dim = 0;
  double out_radius = 0.0;   // K_i
  double barron = 0.0;       // C_i, valid on K_{i-1} + sB
  std::string barron_source = "analytic";  // or "numeric"
  double lipschitz = 1.0;
};

/// x ↦ α sin(Wx + φ) componentwise. Lipschitz constant α‖W‖₂; on a ball of
/// radius R component j has Barron constant α‖w_j‖R; |f_j| ≤ α.
LayerSpec sine_layer(std::string name, const Eigen::MatrixXd& W, const Eigen::VectorXd& phase,
                     double amplitude, double in_radius);

using BaseSampler = std::function<Eigen::MatrixXd(int count, Rng& rng)>;

/// Uniform on the ball of radius `radius` in R^dim.
BaseSampler uniform_ball_sampler(int dim, double radius);

struct ComposePlan {
  double margin = 1.0;    // s
  double accuracy = 0.5;  // ε
  double base_radius = 1.0;  // K_0
  int base_dim = 0;
  BaseSampler sampler;
  int samples = 10000;
  Activation activation = Activation::logistic;
  FitOptions fit;
  std::vector<int> node_counts;  // r_i = ⌈4C_i²m_i/ε²⌉ nodes per output component
  std::vector<int> out_dims;     // m_i
  std::vector<double> barron;    // C_i
  double diameter = 0.0;         // D of K_l

  int depth() const { return static_cast<int>(node_counts.size()); }
  /// Throws InvalidInput unless s, ε > 0, the node counts follow
  /// ⌈4C_i²m_i/ε²⌉ and the per-layer vectors agree in length.
  void validate() const;
};

/// ⌈4C²m/ε²⌉.
int node_count(double C, int m, double eps);

/// Fills node counts, dimensions, Barron constants and D from the layers.
/// Throws InvalidInput when consecutive dimensions disagree or a map has
/// Lipschitz bound above 1.
ComposePlan make_plan(const std::vector<LayerSpec>& layers, double margin, double accuracy,
                      double base_radius, BaseSampler sampler, int samples = 10000);

/// Composition f_{l:1}.
VectorMap compose_maps(const std::vector<LayerSpec>& layers);

/// h_i = σ(W_i h_{i-1} + b_i).
struct DenseLayer {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// g = g_l ∘ … ∘ g_1 with each g_i a vector of two-layer networks. The
/// collapsed form merges every output layer into the next hidden layer.
struct LayeredNet {
  int input_dim = 0;
  Activation activation = Activation::logistic;
  std::vector<std::vector<TwoLayerNet>> blocks;  // g_i, one net per output
  std::vector<DenseLayer> hidden;                // collapsed, one per block
  Eigen::MatrixXd out_weight;
  Eigen::VectorXd out_bias;
  Eigen::VectorXd shift;  // added to the final output

  int depth() const { return static_cast<int>(hidden.size()); }
  int output_dim() const { return static_cast<int>(out_bias.size()); }

  /// Collapsed evaluation, one column per point.
  Eigen::MatrixXd evaluate(const Eigen::MatrixXd& points) const;
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;
  /// Block-by-block evaluation of g_{i:1} (without the shift unless
  /// i = depth()).
  Eigen::MatrixXd evaluate_chain(const Eigen::MatrixXd& points, int upto = -1) const;

  friend bool operator==(const LayeredNet&, const LayeredNet&) = default;
};

/// Builds the collapsed form from blocks; throws InvalidInput on a
/// dimension mismatch between consecutive blocks.
LayeredNet collapse(std::vector<std::vector<TwoLayerNet>> blocks, int input_dim,
                    Activation activation);

struct ErrorLedger {
  std::vector<double> fit_rms;             // per layer, on its fitting set
  std::vector<int> survivors;              // |S_i|
  std::vector<double> excluded_fraction;   // 1 - |S_i| / N
  std::vector<double> exclusion_bound;     // (Σ_{j<i} j²) ε²/s²
  std::vector<double> exclusion_slack;     // 3 √(p(1-p)/N) at p = bound
  double on_s_rms = 0.0;                   // (1/N Σ_{S_l} ‖f - g‖²)^{1/2}
  double unconditional_rms = 0.0;          // (1/N Σ ‖f - g‖²)^{1/2}
  double main_bound = 0.0;                 // error_bound(plan)
  double range_theory = 0.0;               // 2C_l√m_l + D
  double range_measured = 0.0;             // output diameter of g plus D
  double shift_norm = 0.0;
  std::vector<std::string> barron_sources;
  std::uint64_t seed = 0;
  friend bool operator==(const ErrorLedger&, const ErrorLedger&) = default;
};

struct ComposeResult {
  LayeredNet net;
  ErrorLedger ledger;
  Eigen::MatrixXd samples;          // base samples, columns
  std::vector<bool> in_final_set;   // membership in S_l
};

/// Seed of the fit of layer i (0-based) under the build seed.
std::uint64_t layer_seed(std::uint64_t seed, int layer);

/// Base samples drawn by build_layered for this seed.
Eigen::MatrixXd draw_base_samples(const ComposePlan& plan, std::uint64_t seed);

/// Membership in S_l for each column: S_1 = everything, then
/// S_i = S_{i-1} ∩ {g_{i-1:1}(x) ∈ K_{i-1} + sB}.
std::vector<bool> surviving_set(const LayeredNet& net, const std::vector<LayerSpec>& layers,
                                const ComposePlan& plan, const Eigen::MatrixXd& samples,
                                std::vector<int>* survivors_per_layer = nullptr);

/// Fits layer after layer on the survivors, with sub-probability weights 1/N,
/// collapses, then applies the recentering shift. Throws DegenerateMargin
/// when a layer has no survivors.
ComposeResult build_layered(const ComposePlan& plan, const std::vector<LayerSpec>& layers,
                            std::uint64_t seed);

/// Mean of f(x) - g(x) over the marked columns; stored into net.shift (on
/// top of any existing shift). Throws InvalidInput when nothing is marked.
Eigen::VectorXd recentering_shift(LayeredNet& net, const Eigen::MatrixXd& samples,
                                  const Eigen::MatrixXd& targets, const std::vector<bool>& mask);

/// lε √((2C_l√m_l + D)² l / (3s²) + 1).
double error_bound(const ComposePlan& plan);

struct MeasuredError {
  double on_s_rms = 0.0;
  double unconditional_rms = 0.0;
  double excluded_fraction = 0.0;
  double bound = 0.0;
  friend bool operator==(const MeasuredError&, const MeasuredError&) = default;
};

MeasuredError measured_error(const LayeredNet& net, const std::vector<LayerSpec>& layers,
                             const ComposePlan& plan, const Eigen::MatrixXd& fresh_samples);

struct WassersteinCertificate {
  double coupling_bound = 0.0;      // (E‖f(X) - g(X)‖²)^{1/2} on all samples
  double subsample_coupling = 0.0;  // same on the subsample
  double exact_w2 = 0.0;            // exact empirical W₂ on the subsample
  int subsample = 0;
  double main_bound = 0.0;
  friend bool operator==(const WassersteinCertificate&, const WassersteinCertificate&) = default;
};

/// Exact W₂ between the empirical pushforwards f#μ̂ and g#μ̂ on the first
/// `max_points` samples (the exact solver's budget), plus the coupling
/// bound from sharing X.
WassersteinCertificate wasserstein_certificate(const LayeredNet& net,
                                               const std::vector<LayerSpec>& layers,
                                               const ComposePlan& plan,
                                               const Eigen::MatrixXd& samples,
                                               int max_points = 1000);

}  // namespace barronlab
