#include "barronlab/compose.hpp"

#include <algorithm>
#include <cmath>

#include "barronlab/errors.hpp"
#include "barronlab/transport.hpp"

namespace barronlab {

namespace {

constexpr std::uint64_t kSampleStream = 0x62617365ULL;
constexpr std::uint64_t kLayerStream = 0x6c61796572ULL;

Eigen::MatrixXd apply(const VectorMap& f, const Eigen::MatrixXd& points, int out_dim) {
  Eigen::MatrixXd out(out_dim, points.cols());
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const Eigen::VectorXd y = f(points.col(j));
    if (y.size() != out_dim) throw InvalidInput("layer map returned the wrong dimension");
    out.col(j) = y;
  }
  return out;
}

Eigen::MatrixXd apply_block(const std::vector<TwoLayerNet>& block, const Eigen::MatrixXd& points) {
  Eigen::MatrixXd out(block.size(), points.cols());
  for (std::size_t j = 0; j < block.size(); ++j) out.row(j) = eval_net(block[j], points).transpose();
  return out;
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& m, const std::vector<bool>& mask) {
  const auto count = std::count(mask.begin(), mask.end(), true);
  Eigen::MatrixXd out(m.rows(), count);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (mask[j]) out.col(k++) = m.col(j);
  }
  return out;
}

// Assumptions on f_i checked on the samples that reach it: images in K_i and
// Lipschitz bound on consecutive pairs.
void spot_check(const LayerSpec& layer, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& images) {
  const double tol = 1e-9;
  for (Eigen::Index j = 0; j < images.cols(); ++j) {
    if (images.col(j).norm() > layer.out_radius * (1.0 + tol)) {
      throw InvalidInput("layer '" + layer.name + "' maps a sample outside its output ball");
    }
  }
  for (Eigen::Index j = 0; j + 1 < images.cols() && j < 2000; ++j) {
    const double dx = (inputs.col(j) - inputs.col(j + 1)).norm();
    const double dy = (images.col(j) - images.col(j + 1)).norm();
    if (dy > layer.lipschitz * dx * (1.0 + tol) + 1e-14) {
      throw InvalidInput("layer '" + layer.name + "' exceeds its Lipschitz bound on samples");
    }
  }
}

double bounding_diagonal(const Eigen::MatrixXd& points) {
  if (points.cols() == 0) return 0.0;
  return (points.rowwise().maxCoeff() - points.rowwise().minCoeff()).norm();
}

}  // namespace

LayerSpec sine_layer(std::string name, const Eigen::MatrixXd& W, const Eigen::VectorXd& phase,
                     double amplitude, double in_radius) {
  if (W.rows() != phase.size()) throw InvalidInput("sine_layer: one phase per output");
  if (!(amplitude > 0.0) || !(in_radius > 0.0)) {
    throw InvalidInput("sine_layer: amplitude and radius must be positive");
  }
  LayerSpec layer;
  layer.name = std::move(name);
  layer.in_dim = static_cast<int>(W.cols());
  layer.out_dim = static_cast<int>(W.rows());
  layer.map = [W, phase, amplitude](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return amplitude * (W * x + phase).array().sin().matrix();
  };
  layer.lipschitz = amplitude * Eigen::JacobiSVD<Eigen::MatrixXd>(W).singularValues()(0);
  layer.barron = amplitude * W.rowwise().norm().maxCoeff() * in_radius;
  layer.barron_source = "analytic";
  layer.out_radius = amplitude * std::sqrt(static_cast<double>(layer.out_dim));
  return layer;
}

BaseSampler uniform_ball_sampler(int dim, double radius) {
  if (dim < 1 || !(radius > 0.0)) throw InvalidInput("uniform_ball_sampler: bad dimension or radius");
  return [dim, radius](int count, Rng& rng) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit;
    Eigen::MatrixXd out(dim, count);
    for (int j = 0; j < count; ++j) {
      Eigen::VectorXd v(dim);
      for (int d = 0; d < dim; ++d) v[d] = normal(rng);
      const double r = radius * std::pow(unit(rng), 1.0 / dim);
      out.col(j) = r * v / v.norm();
    }
    return out;
  };
}

int node_count(double C, int m, double eps) {
  if (!(C > 0.0) || m < 1 || !(eps > 0.0)) throw InvalidInput("node_count: need C, m, eps > 0");
  return static_cast<int>(std::ceil(4.0 * C * C * m / (eps * eps)));
}

void ComposePlan::validate() const {
  if (!(margin > 0.0) || !(accuracy > 0.0)) throw InvalidInput("ComposePlan: s and eps must be > 0");
  if (!(base_radius > 0.0) || base_dim < 1) throw InvalidInput("ComposePlan: bad base ball");
  if (samples < 1) throw InvalidInput("ComposePlan: need at least one sample");
  if (!sampler) throw InvalidInput("ComposePlan: missing base sampler");
  const std::size_t l = node_counts.size();
  if (l == 0 || out_dims.size() != l || barron.size() != l) {
    throw InvalidInput("ComposePlan: per-layer vectors must be nonempty and of equal length");
  }
  for (std::size_t i = 0; i < l; ++i) {
    if (node_counts[i] != node_count(barron[i], out_dims[i], accuracy)) {
      throw InvalidInput("ComposePlan: node count of layer " + std::to_string(i + 1) +
                         " differs from ceil(4 C^2 m / eps^2)");
    }
  }
  if (!(diameter > 0.0)) throw InvalidInput("ComposePlan: diameter must be > 0");
}

ComposePlan make_plan(const std::vector<LayerSpec>& layers, double margin, double accuracy,
                      double base_radius, BaseSampler sampler, int samples) {
  if (layers.empty()) throw InvalidInput("make_plan: no layers");
  ComposePlan plan;
  plan.margin = margin;
  plan.accuracy = accuracy;
  plan.base_radius = base_radius;
  plan.base_dim = layers.front().in_dim;
  plan.sampler = std::move(sampler);
  plan.samples = samples;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& L = layers[i];
    if (i > 0 && L.in_dim != layers[i - 1].out_dim) {
      throw InvalidInput("make_plan: layer " + std::to_string(i + 1) + " input dimension mismatch");
    }
    if (!(L.lipschitz <= 1.0 + 1e-12)) {
      throw InvalidInput("make_plan: layer '" + L.name + "' has Lipschitz bound above 1");
    }
    if (!(L.out_radius > 0.0)) throw InvalidInput("make_plan: output radius must be > 0");
    plan.out_dims.push_back(L.out_dim);
    plan.barron.push_back(L.barron);
    plan.node_counts.push_back(node_count(L.barron, L.out_dim, accuracy));
  }
  plan.diameter = 2.0 * layers.back().out_radius;
  plan.validate();
  return plan;
}

VectorMap compose_maps(const std::vector<LayerSpec>& layers) {
  return [layers](const Eigen::VectorXd& x) {
    Eigen::VectorXd y = x;
    for (const LayerSpec& L : layers) y = L.map(y);
    return y;
  };
}

Eigen::MatrixXd LayeredNet::evaluate(const Eigen::MatrixXd& points) const {
  if (points.rows() != input_dim) throw InvalidInput("LayeredNet: input dimension mismatch");
  Eigen::MatrixXd h = points;
  for (const DenseLayer& layer : hidden) {
    Eigen::MatrixXd z = (layer.weight * h).colwise() + layer.bias;
    h = z.unaryExpr([this](double v) { return activate(activation, v); });
  }
  Eigen::MatrixXd out = (out_weight * h).colwise() + out_bias;
  if (shift.size() == out.rows()) out.colwise() += shift;
  return out;
}

Eigen::VectorXd LayeredNet::evaluate(const Eigen::VectorXd& x) const {
  return evaluate(Eigen::MatrixXd(x)).col(0);
}

Eigen::MatrixXd LayeredNet::evaluate_chain(const Eigen::MatrixXd& points, int upto) const {
  const int l = static_cast<int>(blocks.size());
  if (upto < 0) upto = l;
  if (upto > l) throw InvalidInput("LayeredNet: chain index beyond depth");
  Eigen::MatrixXd y = points;
  for (int i = 0; i < upto; ++i) y = apply_block(blocks[i], y);
  if (upto == l && shift.size() == y.rows()) y.colwise() += shift;
  return y;
}

LayeredNet collapse(std::vector<std::vector<TwoLayerNet>> blocks, int input_dim,
                    Activation activation) {
  if (blocks.empty()) throw InvalidInput("collapse: no blocks");
  LayeredNet net;
  net.input_dim = input_dim;
  net.activation = activation;
  int in = input_dim;
  Eigen::MatrixXd prev_out;  // C_{i-1}: m_{i-1} x H_{i-1}
  Eigen::VectorXd prev_bias;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& block = blocks[i];
    if (block.empty()) throw InvalidInput("collapse: empty block");
    int total = 0;
    for (const TwoLayerNet& f : block) {
      if (f.input_dim != in) throw InvalidInput("collapse: block input dimension mismatch");
      if (f.activation != activation) throw InvalidInput("collapse: mixed activations");
      total += f.nodes();
    }
    Eigen::MatrixXd A(total, in);  // rows a_t^T
    Eigen::VectorXd b(total);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(block.size()), total);
    Eigen::VectorXd c0(block.size());
    int offset = 0;
    for (std::size_t j = 0; j < block.size(); ++j) {
      const TwoLayerNet& f = block[j];
      A.middleRows(offset, f.nodes()) = f.a.transpose();
      b.segment(offset, f.nodes()) = f.b;
      C.row(j).segment(offset, f.nodes()) = f.c.transpose();
      c0[j] = f.c0;
      offset += f.nodes();
    }
    DenseLayer layer;
    if (i == 0) {
      layer.weight = A;
      layer.bias = b;
    } else {
      // a·(c0 + C h) + b = (aᵀC) h + (a·c0 + b)
      layer.weight = A * prev_out;
      layer.bias = A * prev_bias + b;
    }
    net.hidden.push_back(std::move(layer));
    prev_out = C;
    prev_bias = c0;
    in = static_cast<int>(block.size());
  }
  net.out_weight = prev_out;
  net.out_bias = prev_bias;
  net.shift = Eigen::VectorXd::Zero(prev_bias.size());
  net.blocks = std::move(blocks);
  return net;
}

std::uint64_t layer_seed(std::uint64_t seed, int layer) {
  return derive_seed(seed, {kLayerStream, static_cast<std::uint64_t>(layer)});
}

Eigen::MatrixXd draw_base_samples(const ComposePlan& plan, std::uint64_t seed) {
  plan.validate();
  Rng rng(derive_seed(seed, {kSampleStream}));
  Eigen::MatrixXd X = plan.sampler(plan.samples, rng);
  if (X.rows() != plan.base_dim || X.cols() != plan.samples) {
    throw InvalidInput("base sampler returned the wrong shape");
  }
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (!X.col(j).allFinite() || X.col(j).norm() > plan.base_radius * (1.0 + 1e-12)) {
      throw InvalidInput("base sample outside K_0");
    }
  }
  return X;
}

std::vector<bool> surviving_set(const LayeredNet& net, const std::vector<LayerSpec>& layers,
                                const ComposePlan& plan, const Eigen::MatrixXd& samples,
                                std::vector<int>* survivors_per_layer) {
  const int l = net.depth();
  if (static_cast<int>(layers.size()) != l) throw InvalidInput("surviving_set: depth mismatch");
  std::vector<bool> mask(samples.cols(), true);
  if (survivors_per_layer) survivors_per_layer->assign(1, static_cast<int>(samples.cols()));
  Eigen::MatrixXd y = samples;
  for (int i = 1; i < l; ++i) {
    y = apply_block(net.blocks[i - 1], y);
    const double radius = layers[i - 1].out_radius + plan.margin;
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      if (mask[j] && y.col(j).norm() > radius) mask[j] = false;
    }
    if (survivors_per_layer) {
      survivors_per_layer->push_back(static_cast<int>(std::count(mask.begin(), mask.end(), true)));
    }
  }
  return mask;
}

ComposeResult build_layered(const ComposePlan& plan, const std::vector<LayerSpec>& layers,
                            std::uint64_t seed) {
  plan.validate();
  const int l = plan.depth();
  if (static_cast<int>(layers.size()) != l) throw InvalidInput("build_layered: layer count differs from plan");
  if (layers.front().in_dim != plan.base_dim) throw InvalidInput("build_layered: base dimension mismatch");

  ComposeResult result;
  result.samples = draw_base_samples(plan, seed);
  const Eigen::MatrixXd& X = result.samples;
  const int N = static_cast<int>(X.cols());
  const double eps2 = plan.accuracy * plan.accuracy;
  const double s2 = plan.margin * plan.margin;
  ErrorLedger& ledger = result.ledger;
  ledger.seed = seed;

  std::vector<bool> mask(N, true);
  Eigen::MatrixXd current = X;  // g_{i-1:1}(X)
  Eigen::MatrixXd truth = X;    // f_{i-1:1}(X)
  std::vector<std::vector<TwoLayerNet>> blocks;
  double square_sum = 0.0;
  for (int i = 0; i < l; ++i) {
    const LayerSpec& layer = layers[i];
    if (i > 0) {
      const double radius = layers[i - 1].out_radius + plan.margin;
      for (int j = 0; j < N; ++j) {
        if (mask[j] && current.col(j).norm() > radius) mask[j] = false;
      }
    }
    const int alive = static_cast<int>(std::count(mask.begin(), mask.end(), true));
    if (alive == 0) {
      throw DegenerateMargin("no samples survive to layer " + std::to_string(i + 1) +
                             "; increase s or decrease eps");
    }
    ledger.survivors.push_back(alive);
    const double excluded = 1.0 - static_cast<double>(alive) / N;
    ledger.excluded_fraction.push_back(excluded);
    const double bound = square_sum * eps2 / s2;
    ledger.exclusion_bound.push_back(bound);
    const double p = std::min(bound, 1.0);
    ledger.exclusion_slack.push_back(3.0 * std::sqrt(p * (1.0 - p) / N));
    square_sum += static_cast<double>(i + 1) * (i + 1);

    const Eigen::MatrixXd next_truth = apply(layer.map, truth, layer.out_dim);
    spot_check(layer, truth, next_truth);
    const Eigen::MatrixXd inputs = select_columns(current, mask);
    const Eigen::MatrixXd targets = apply(layer.map, inputs, layer.out_dim);
    // Sub-probability weights: survivors keep their original mass 1/N.
    const Eigen::VectorXd w = Eigen::VectorXd::Constant(inputs.cols(), 1.0 / N);
    VectorFit fit = vector_fit(inputs, targets, w, layer.barron, plan.node_counts[i],
                               plan.activation, layer_seed(seed, i), plan.fit);
    ledger.fit_rms.push_back(fit.aggregate_rms);
    ledger.barron_sources.push_back(layer.barron_source);
    current = apply_block(fit.nets, current);
    truth = next_truth;
    blocks.push_back(std::move(fit.nets));
  }

  result.net = collapse(std::move(blocks), plan.base_dim, plan.activation);
  recentering_shift(result.net, X, truth, mask);
  ledger.shift_norm = result.net.shift.norm();

  const Eigen::MatrixXd G = result.net.evaluate(X);
  const Eigen::VectorXd sq = (truth - G).colwise().squaredNorm().transpose();
  double on_s = 0.0;
  for (int j = 0; j < N; ++j) {
    if (mask[j]) on_s += sq[j];
  }
  ledger.on_s_rms = std::sqrt(on_s / N);
  ledger.unconditional_rms = std::sqrt(sq.sum() / N);
  ledger.main_bound = error_bound(plan);
  const int m_l = plan.out_dims.back();
  ledger.range_theory = 2.0 * plan.barron.back() * std::sqrt(static_cast<double>(m_l)) + plan.diameter;
  ledger.range_measured = bounding_diagonal(G) + plan.diameter;
  result.in_final_set = std::move(mask);
  return result;
}

Eigen::VectorXd recentering_shift(LayeredNet& net, const Eigen::MatrixXd& samples,
                                  const Eigen::MatrixXd& targets, const std::vector<bool>& mask) {
  if (samples.cols() != targets.cols() || static_cast<Eigen::Index>(mask.size()) != samples.cols()) {
    throw InvalidInput("recentering_shift: samples, targets and mask must agree in length");
  }
  const Eigen::MatrixXd G = net.evaluate(samples);
  if (targets.rows() != G.rows()) throw InvalidInput("recentering_shift: target dimension mismatch");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(G.rows());
  int count = 0;
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    if (!mask[j]) continue;
    mean += targets.col(j) - G.col(j);
    ++count;
  }
  if (count == 0) throw InvalidInput("recentering_shift: no surviving samples");
  mean /= count;
  if (net.shift.size() != mean.size()) net.shift = Eigen::VectorXd::Zero(mean.size());
  net.shift += mean;
  return mean;
}

double error_bound(const ComposePlan& plan) {
  plan.validate();
  const double l = plan.depth();
  const double range = 2.0 * plan.barron.back() * std::sqrt(static_cast<double>(plan.out_dims.back())) +
                       plan.diameter;
  return l * plan.accuracy *
         std::sqrt(range * range * l / (3.0 * plan.margin * plan.margin) + 1.0);
}

MeasuredError measured_error(const LayeredNet& net, const std::vector<LayerSpec>& layers,
                             const ComposePlan& plan, const Eigen::MatrixXd& fresh_samples) {
  const std::vector<bool> mask = surviving_set(net, layers, plan, fresh_samples);
  const Eigen::MatrixXd F = apply(compose_maps(layers), fresh_samples, layers.back().out_dim);
  const Eigen::MatrixXd G = net.evaluate(fresh_samples);
  const Eigen::VectorXd sq = (F - G).colwise().squaredNorm().transpose();
  const double N = static_cast<double>(fresh_samples.cols());
  MeasuredError out;
  double on_s = 0.0;
  int kept = 0;
  for (Eigen::Index j = 0; j < sq.size(); ++j) {
    if (mask[j]) {
      on_s += sq[j];
      ++kept;
    }
  }
  out.on_s_rms = std::sqrt(on_s / N);
  out.unconditional_rms = std::sqrt(sq.sum() / N);
  out.excluded_fraction = 1.0 - kept / N;
  out.bound = error_bound(plan);
  return out;
}

WassersteinCertificate wasserstein_certificate(const LayeredNet& net,
                                               const std::vector<LayerSpec>& layers,
                                               const ComposePlan& plan,
                                               const Eigen::MatrixXd& samples, int max_points) {
  if (max_points < 1 || 2 * max_points > kExactSupportBudget) {
    throw InvalidInput("wasserstein_certificate: max_points must lie in [1, exact budget / 2]");
  }
  const Eigen::MatrixXd F = apply(compose_maps(layers), samples, layers.back().out_dim);
  const Eigen::MatrixXd G = net.evaluate(samples);
  WassersteinCertificate out;
  out.coupling_bound = coupling_from_map(F, G);
  const int M = std::min<int>(max_points, static_cast<int>(samples.cols()));
  out.subsample = M;
  const Eigen::MatrixXd Fs = F.leftCols(M);
  const Eigen::MatrixXd Gs = G.leftCols(M);
  out.subsample_coupling = coupling_from_map(Fs, Gs);
  out.exact_w2 = wasserstein_exact(EmpiricalMeasure::uniform(Fs), EmpiricalMeasure::uniform(Gs), 2).value;
  out.main_bound = error_bound(plan);
  return out;
}

}  // namespace barronlab
