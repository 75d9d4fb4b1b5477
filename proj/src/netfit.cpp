#include "barronlab/netfit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "barronlab/errors.hpp"
#include "barronlab/rng.hpp"

namespace barronlab {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::logistic:
      return "logistic";
    case Activation::scaled_tanh:
      return "scaled_tanh";
    case Activation::relu_difference:
      return "relu_difference";
  }
  return "unknown";
}

Activation activation_from_string(const std::string& s) {
  if (s == "logistic") return Activation::logistic;
  if (s == "scaled_tanh") return Activation::scaled_tanh;
  if (s == "relu_difference") return Activation::relu_difference;
  throw InvalidInput("unknown activation '" + s + "'");
}

double activate(Activation a, double z) {
  switch (a) {
    case Activation::logistic:
      return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                      : std::exp(z) / (1.0 + std::exp(z));
    case Activation::scaled_tanh:
      return 0.5 * (1.0 + std::tanh(z));
    case Activation::relu_difference:
      // ReLU(z) - ReLU(z - 1)
      return std::max(z, 0.0) - std::max(z - 1.0, 0.0);
  }
  return 0.0;
}

double activate_derivative(Activation a, double z) {
  switch (a) {
    case Activation::logistic: {
      const double s = activate(a, z);
      return s * (1.0 - s);
    }
    case Activation::scaled_tanh: {
      const double t = std::tanh(z);
      return 0.5 * (1.0 - t * t);
    }
    case Activation::relu_difference:
      return (z >= 0.0 && z < 1.0) ? 1.0 : 0.0;
  }
  return 0.0;
}

void TwoLayerNet::validate() const {
  const Eigen::Index k = c.size();
  if (input_dim < 1 || a.rows() != input_dim || a.cols() != k || b.size() != k) {
    throw InvalidInput("TwoLayerNet: inconsistent shapes");
  }
  if (!a.allFinite() || !b.allFinite() || !c.allFinite() || !std::isfinite(c0)) {
    throw InvalidInput("TwoLayerNet: non-finite parameters");
  }
  if (budget_used() > budget) {
    throw InvalidInput("TwoLayerNet: coefficient budget exceeded");
  }
}

Eigen::MatrixXd hidden_layer(const TwoLayerNet& net, const Eigen::MatrixXd& points) {
  if (points.rows() != net.input_dim) {
    throw InvalidInput("eval_net: input dimension mismatch");
  }
  Eigen::MatrixXd z = net.a.transpose() * points;
  z.colwise() += net.b;
  return z.unaryExpr([&](double v) { return activate(net.activation, v); });
}

Eigen::VectorXd eval_net(const TwoLayerNet& net, const Eigen::MatrixXd& points) {
  Eigen::VectorXd out = hidden_layer(net, points).transpose() * net.c;
  out.array() += net.c0;
  return out;
}

double eval_net(const TwoLayerNet& net, const Eigen::VectorXd& x) {
  if (x.size() != net.input_dim) {
    throw InvalidInput("eval_net: input dimension mismatch");
  }
  double s = net.c0;
  for (int i = 0; i < net.nodes(); ++i) {
    s += net.c[i] * activate(net.activation, net.a.col(i).dot(x) + net.b[i]);
  }
  return s;
}

Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double radius) {
  if (!(radius >= 0.0)) throw InvalidInput("project_l1_ball: negative radius");
  if (v.cwiseAbs().sum() <= radius) return v;
  if (radius == 0.0) return Eigen::VectorXd::Zero(v.size());
  std::vector<double> u(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) u[i] = std::abs(v[i]);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - radius) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    out[i] = std::copysign(std::max(std::abs(v[i]) - theta, 0.0), v[i]);
  }
  // Guard against rounding pushing the sum past the radius.
  const double s = out.cwiseAbs().sum();
  if (s > radius) out *= radius / s;
  return out;
}

namespace {

struct Problem {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXd& y;
  const Eigen::VectorXd& w;
  double total_weight;
  Activation activation;

  double mean(const Eigen::VectorXd& v) const { return w.dot(v) / total_weight; }
};

struct Candidate {
  Eigen::VectorXd a;
  double b = 0.0;
  double score = -1.0;
};

Eigen::VectorXd feature(const Problem& p, const Eigen::VectorXd& a, double b) {
  Eigen::VectorXd z = p.X.transpose() * a;
  z.array() += b;
  return z.unaryExpr([&](double v) { return activate(p.activation, v); });
}

/// Weighted SSE reduction from adding the centred feature with its best
/// coefficient in [-limit, limit].
double score(const Problem& p, const Eigen::VectorXd& residual,
             const Eigen::VectorXd& phi, double limit) {
  const Eigen::VectorXd centred = phi.array() - p.mean(phi);
  const double den = p.w.dot(centred.cwiseAbs2());
  if (!(den > 1e-14 * p.total_weight)) return -1.0;
  const double num = p.w.dot(residual.cwiseProduct(centred));
  const double c = std::clamp(num / den, -limit, limit);
  return 2.0 * c * num - c * c * den;
}

/// Levenberg-Marquardt on r ≈ c σ(<a,x> + b) + d with |c| ≤ limit.
Candidate refine(const Problem& p, const Eigen::VectorXd& residual,
                 Candidate start, double limit, int iterations, int& counter) {
  const Eigen::Index n = p.X.rows();
  const Eigen::Index N = p.X.cols();
  const Eigen::Index dim = n + 3;
  Eigen::VectorXd theta(dim);
  {
    const Eigen::VectorXd phi = feature(p, start.a, start.b);
    const Eigen::VectorXd centred = phi.array() - p.mean(phi);
    const double den = std::max(p.w.dot(centred.cwiseAbs2()), 1e-300);
    const double c = std::clamp(p.w.dot(residual.cwiseProduct(centred)) / den, -limit, limit);
    theta << start.a, start.b, c, p.mean(residual) - c * p.mean(phi);
  }
  const auto loss = [&](const Eigen::VectorXd& t, Eigen::VectorXd* err,
                        Eigen::MatrixXd* jac) {
    Eigen::VectorXd z = p.X.transpose() * t.head(n);
    z.array() += t[n];
    const double c = t[n + 1];
    const double d = t[n + 2];
    double total = 0.0;
    if (err) err->resize(N);
    if (jac) jac->resize(N, dim);
    for (Eigen::Index i = 0; i < N; ++i) {
      const double s = activate(p.activation, z[i]);
      const double e = residual[i] - c * s - d;
      total += p.w[i] * e * e;
      if (err) (*err)[i] = e;
      if (jac) {
        const double ds = c * activate_derivative(p.activation, z[i]);
        jac->row(i).head(n) = ds * p.X.col(i).transpose();
        (*jac)(i, n) = ds;
        (*jac)(i, n + 1) = s;
        (*jac)(i, n + 2) = 1.0;
      }
    }
    return total;
  };
  double lambda = 1e-3;
  Eigen::VectorXd err;
  Eigen::MatrixXd jac;
  double current = loss(theta, &err, &jac);
  for (int it = 0; it < iterations; ++it) {
    ++counter;
    const Eigen::MatrixXd Jw = jac.transpose() * p.w.asDiagonal();
    Eigen::MatrixXd JtJ = Jw * jac;
    const Eigen::VectorXd g = Jw * err;
    bool improved = false;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal().array() += lambda * (JtJ.diagonal().array() + 1e-12);
      const Eigen::VectorXd step = A.ldlt().solve(g);
      Eigen::VectorXd next = theta + step;
      next[n + 1] = std::clamp(next[n + 1], -limit, limit);
      if (!next.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const double trial = loss(next, nullptr, nullptr);
      if (trial < current) {
        theta = next;
        current = loss(theta, &err, &jac);
        lambda = std::max(lambda / 3.0, 1e-9);
        improved = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) break;
  }
  Candidate out;
  out.a = theta.head(n);
  out.b = theta[n];
  out.score = score(p, residual, feature(p, out.a, out.b), limit);
  return out;
}

/// min_c (yc - Φc c)ᵀ W (yc - Φc c) subject to ‖c‖₁ ≤ budget.
Eigen::VectorXd fit_coefficients(const Eigen::MatrixXd& gram,
                                 const Eigen::VectorXd& rhs, double budget,
                                 const Eigen::VectorXd& warm, int iterations,
                                 int& counter) {
  const auto objective = [&](const Eigen::VectorXd& c) {
    return c.dot(gram * c) - 2.0 * rhs.dot(c);
  };
  const Eigen::Index k = rhs.size();
  Eigen::MatrixXd reg = gram;
  reg.diagonal().array() += 1e-12 * (gram.trace() / k + 1e-300);
  Eigen::VectorXd free = reg.ldlt().solve(rhs);
  if (free.allFinite() && free.cwiseAbs().sum() <= budget) return free;

  const double L = std::max(
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly)
          .eigenvalues()
          .maxCoeff(),
      1e-300);
  Eigen::VectorXd c = project_l1_ball(warm, budget);
  Eigen::VectorXd yk = c;
  double t = 1.0;
  double best_value = objective(c);
  Eigen::VectorXd best = c;
  for (int it = 0; it < iterations; ++it) {
    ++counter;
    const Eigen::VectorXd grad = 2.0 * (gram * yk - rhs);
    const Eigen::VectorXd next = project_l1_ball(yk - grad / (2.0 * L), budget);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    yk = next + ((t - 1.0) / t_next) * (next - c);
    const double change = (next - c).cwiseAbs().maxCoeff();
    c = next;
    t = t_next;
    const double v = objective(c);
    if (v < best_value) {
      best_value = v;
      best = c;
    }
    if (change < 1e-13 * (1.0 + c.cwiseAbs().maxCoeff())) break;
  }
  return best;
}

}  // namespace

std::pair<TwoLayerNet, FitReport> fit_two_layer(
    const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
    double C, int k, Activation activation, std::uint64_t seed,
    const FitOptions& options) {
  const Eigen::Index n = X.rows();
  const Eigen::Index N = X.cols();
  if (n < 1 || N < 1) throw InvalidInput("fit_two_layer: empty sample set");
  if (y.size() != N || w.size() != N) {
    throw InvalidInput("fit_two_layer: targets and weights must match samples");
  }
  if (!X.allFinite() || !y.allFinite() || !w.allFinite()) {
    throw InvalidInput("fit_two_layer: non-finite input");
  }
  if ((w.array() < 0.0).any()) throw InvalidInput("fit_two_layer: negative weight");
  const double total = w.sum();
  if (!(total > 0.0)) throw InvalidInput("fit_two_layer: zero total weight");
  if (total > 1.0 + 1e-9) {
    throw InvalidInput("fit_two_layer: weights must sum to at most 1");
  }
  if (!(C >= 0.0)) throw InvalidInput("fit_two_layer: C must be nonnegative");
  if (k < 1) throw InvalidInput("fit_two_layer: k must be >= 1");

  const Problem p{X, y, w, total, activation};
  const double budget = 2.0 * C;
  FitReport report;
  report.seed = seed;
  report.budget = budget;
  report.nodes = k;
  report.target_bound = budget * budget / k;
  report.overfit_warning = 10.0 * k * (n + 2) > static_cast<double>(N);

  // Scale of the data for the direction-scale grid.
  const Eigen::VectorXd centre = X * w / total;
  double spread = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) spread += w[i] * (X.col(i) - centre).squaredNorm();
  spread = std::sqrt(spread / total);
  if (!(spread > 0.0)) spread = 1.0;
  const std::vector<double> scales = {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < N; ++i) {
    if (w[i] > 0.0) support.push_back(i);
  }

  TwoLayerNet net;
  net.input_dim = static_cast<int>(n);
  net.activation = activation;
  net.budget = budget;
  net.a.resize(n, 0);
  net.b.resize(0);
  net.c.resize(0);
  net.c0 = p.mean(y);

  const Eigen::VectorXd yc = y.array() - p.mean(y);
  Eigen::MatrixXd centred(0, N);  // centred features, one row per node
  Eigen::VectorXd prediction = Eigen::VectorXd::Constant(N, net.c0);

  for (int node = 0; node < k; ++node) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(node)}));
    std::normal_distribution<double> normal;
    std::uniform_int_distribution<std::size_t> pick(0, support.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_scale(0, scales.size() - 1);
    const Eigen::VectorXd residual = y - prediction;

    std::vector<Candidate> pool;
    pool.reserve(options.restarts);
    for (int r = 0; r < options.restarts; ++r) {
      Eigen::VectorXd u(n);
      for (Eigen::Index d = 0; d < n; ++d) u[d] = normal(rng);
      const double norm = u.norm();
      if (norm == 0.0) u = Eigen::VectorXd::Unit(n, 0);
      else u /= norm;
      const double s = scales[pick_scale(rng)] / spread;
      const Eigen::Index anchor = support[pick(rng)];
      Candidate cand;
      cand.a = s * u;
      cand.b = -cand.a.dot(X.col(anchor));
      if (activation == Activation::relu_difference) cand.b += 0.5;
      cand.score = score(p, residual, feature(p, cand.a, cand.b), budget);
      pool.push_back(std::move(cand));
    }
    std::stable_sort(pool.begin(), pool.end(),
                     [](const Candidate& l, const Candidate& r) { return l.score > r.score; });
    Candidate best = pool.front();
    const int refined = std::min<int>(options.refined_candidates, pool.size());
    for (int r = 0; r < refined; ++r) {
      if (pool[r].score < 0.0) continue;
      Candidate c = refine(p, residual, pool[r], budget, options.refine_iterations,
                           report.iterations);
      if (c.a.allFinite() && std::isfinite(c.b) && c.score > best.score) best = c;
    }

    // Append the node and refit all outer coefficients under the budget.
    const Eigen::VectorXd phi = feature(p, best.a, best.b);
    net.a.conservativeResize(n, node + 1);
    net.a.col(node) = best.a;
    net.b.conservativeResize(node + 1);
    net.b[node] = best.b;
    centred.conservativeResize(node + 1, N);
    centred.row(node) = (phi.array() - p.mean(phi)).transpose();

    const Eigen::MatrixXd weighted = centred * w.asDiagonal();
    const Eigen::MatrixXd gram = weighted * centred.transpose();
    const Eigen::VectorXd rhs = weighted * yc;
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(node + 1);
    warm.head(node) = net.c;
    Eigen::VectorXd c = fit_coefficients(gram, rhs, budget, warm,
                                         options.coefficient_iterations,
                                         report.iterations);
    c = project_l1_ball(c, budget);
    // Keep the previous coefficients if the refit did not improve on them.
    const auto sse = [&](const Eigen::VectorXd& coef) {
      return w.dot((yc - centred.transpose() * coef).cwiseAbs2());
    };
    if (sse(c) > sse(warm)) c = warm;
    net.c = c;
    // c0 = mean(y) - Σ c_i mean(φ_i).
    const Eigen::MatrixXd H = hidden_layer(net, X);
    const Eigen::VectorXd means = H * w / total;
    net.c0 = p.mean(y) - net.c.dot(means);
    prediction = H.transpose() * net.c;
    prediction.array() += net.c0;
    const double mse = w.dot((y - prediction).cwiseAbs2());
    report.mse_path.push_back(mse);
  }
  report.mse = w.dot((y - prediction).cwiseAbs2());
  report.budget_used = net.budget_used();
  net.validate();
  return {std::move(net), std::move(report)};
}

VectorFit vector_fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                     const Eigen::VectorXd& w, double C, int k,
                     Activation activation, std::uint64_t seed,
                     const FitOptions& options) {
  if (Y.cols() != X.cols()) {
    throw InvalidInput("vector_fit: targets must have one column per sample");
  }
  VectorFit out;
  double total = 0.0;
  for (Eigen::Index j = 0; j < Y.rows(); ++j) {
    const std::uint64_t s =
        j == 0 ? seed : derive_seed(seed, {0x766563ULL, static_cast<std::uint64_t>(j)});
    auto [net, report] = fit_two_layer(X, Y.row(j).transpose(), w, C, k, activation, s, options);
    total += report.mse;
    out.nets.push_back(std::move(net));
    out.reports.push_back(std::move(report));
  }
  out.aggregate_rms = std::sqrt(total);
  return out;
}

}  // namespace barronlab
