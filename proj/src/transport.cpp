#include "barronlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "barronlab/errors.hpp"

namespace barronlab {

EmpiricalMeasure::EmpiricalMeasure(Eigen::MatrixXd pts, Eigen::VectorXd w)
    : points(std::move(pts)), weights(std::move(w)) {
  if (points.cols() != weights.size()) {
    throw InvalidInput("EmpiricalMeasure: one weight per point required");
  }
}

EmpiricalMeasure EmpiricalMeasure::uniform(Eigen::MatrixXd pts) {
  const Eigen::Index N = pts.cols();
  if (N == 0) throw InvalidInput("EmpiricalMeasure: empty support");
  return EmpiricalMeasure(std::move(pts), Eigen::VectorXd::Constant(N, 1.0 / N));
}

EmpiricalMeasure EmpiricalMeasure::dirac(const Eigen::VectorXd& x) {
  return EmpiricalMeasure(Eigen::MatrixXd(x), Eigen::VectorXd::Ones(1));
}

void EmpiricalMeasure::validate(bool probability) const {
  if (points.cols() != weights.size() || points.cols() == 0) {
    throw InvalidInput("EmpiricalMeasure: empty support or weight count mismatch");
  }
  if (!points.allFinite() || !weights.allFinite()) {
    throw InvalidInput("EmpiricalMeasure: non-finite entries");
  }
  if ((weights.array() < 0.0).any()) throw InvalidInput("EmpiricalMeasure: negative weight");
  if (probability && std::abs(weights.sum() - 1.0) > 1e-12) {
    throw InvalidInput("EmpiricalMeasure: weights must sum to 1");
  }
}

EmpiricalMeasure EmpiricalMeasure::normalized(double* excluded) const {
  validate(false);
  const double m = mass();
  if (!(m > 0.0)) throw InvalidInput("EmpiricalMeasure: zero mass");
  if (excluded) *excluded = 1.0 - m;
  return EmpiricalMeasure(points, weights / m);
}

double Coupling::marginal_violation(const EmpiricalMeasure& mu,
                                    const EmpiricalMeasure& nu) const {
  const double rows = (gamma.rowwise().sum() - mu.weights).cwiseAbs().maxCoeff();
  const double cols = (gamma.colwise().sum().transpose() - nu.weights).cwiseAbs().maxCoeff();
  return std::max(rows, cols);
}

Eigen::MatrixXd cost_matrix(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, int p) {
  if (p != 1 && p != 2) throw InvalidInput("cost_matrix: p must be 1 or 2");
  if (mu.dimension() != nu.dimension()) {
    throw InvalidInput("cost_matrix: measures live in different dimensions");
  }
  Eigen::MatrixXd C(mu.size(), nu.size());
  for (int j = 0; j < nu.size(); ++j) {
    for (int i = 0; i < mu.size(); ++i) {
      const double d2 = (mu.points.col(i) - nu.points.col(j)).squaredNorm();
      C(i, j) = p == 2 ? d2 : std::sqrt(d2);
    }
  }
  return C;
}

namespace {

void check_pair(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  mu.validate();
  nu.validate();
  if (mu.dimension() != nu.dimension()) {
    throw InvalidInput("transport: measures live in different dimensions");
  }
}

// Successive shortest augmenting paths from surplus sources to deficit
// sinks. Arcs i -> j carry unbounded flow at cost C_ij; residual arcs
// j -> i exist where flow is positive. Dijkstra runs on reduced costs with
// node potentials; nodes are scanned in index order so ties resolve
// deterministically.
Eigen::MatrixXd solve_transport(const Eigen::MatrixXd& C, Eigen::VectorXd supply,
                                Eigen::VectorXd demand) {
  const int m = static_cast<int>(C.rows());
  const int n = static_cast<int>(C.cols());
  const int V = m + n;
  const double inf = std::numeric_limits<double>::infinity();
  constexpr double tiny = 1e-15;
  Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(m, n);
  std::vector<double> potential(V, 0.0), dist(V);
  std::vector<int> pred(V);
  std::vector<char> done(V);

  for (;;) {
    bool any_supply = false, any_demand = false;
    for (int i = 0; i < m; ++i) any_supply |= supply[i] > tiny;
    for (int j = 0; j < n; ++j) any_demand |= demand[j] > tiny;
    if (!any_supply || !any_demand) break;

    std::fill(dist.begin(), dist.end(), inf);
    std::fill(pred.begin(), pred.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (int i = 0; i < m; ++i) {
      if (supply[i] > tiny) dist[i] = 0.0;
    }
    int target = -1;
    double reach = inf;
    for (;;) {
      int u = -1;
      double best = inf;
      for (int v = 0; v < V; ++v) {
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      }
      if (u < 0) break;
      done[u] = 1;
      if (u >= m && demand[u - m] > tiny) {
        target = u;
        reach = best;
        break;
      }
      if (u < m) {
        for (int j = 0; j < n; ++j) {
          const int v = m + j;
          if (done[v]) continue;
          const double d = best + std::max(C(u, j) + potential[u] - potential[v], 0.0);
          if (d < dist[v]) {
            dist[v] = d;
            pred[v] = u;
          }
        }
      } else {
        const int j = u - m;
        for (int i = 0; i < m; ++i) {
          if (done[i] || flow(i, j) <= 0.0) continue;
          const double d = best + std::max(-C(i, j) + potential[u] - potential[i], 0.0);
          if (d < dist[i]) {
            dist[i] = d;
            pred[i] = u;
          }
        }
      }
    }
    if (target < 0) throw SearchError("wasserstein_exact: no augmenting path");
    for (int v = 0; v < V; ++v) potential[v] += std::min(dist[v], reach);

    // Bottleneck along the path.
    double delta = demand[target - m];
    int v = target;
    while (pred[v] >= 0) {
      const int u = pred[v];
      if (u >= m) delta = std::min(delta, flow(v, u - m));
      v = u;
    }
    delta = std::min(delta, supply[v]);
    demand[target - m] -= delta;
    supply[v] -= delta;
    v = target;
    while (pred[v] >= 0) {
      const int u = pred[v];
      if (u < m) {
        flow(u, v - m) += delta;
      } else {
        flow(v, u - m) -= delta;
        if (flow(v, u - m) < tiny) flow(v, u - m) = 0.0;
      }
      v = u;
    }
    if (supply[v] < tiny) supply[v] = 0.0;
    if (demand[target - m] < tiny) demand[target - m] = 0.0;
  }
  return flow;
}

}  // namespace

TransportResult wasserstein_exact(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                  int p) {
  check_pair(mu, nu);
  if (mu.size() + nu.size() > kExactSupportBudget) {
    throw InvalidInput("wasserstein_exact: support of " + std::to_string(mu.size() + nu.size()) +
                       " points exceeds the exact budget of " +
                       std::to_string(kExactSupportBudget) + "; use wasserstein_sinkhorn");
  }
  const Eigen::MatrixXd C = cost_matrix(mu, nu, p);
  TransportResult out;
  out.coupling.gamma = solve_transport(C, mu.weights, nu.weights);
  out.cost = std::max(out.coupling.gamma.cwiseProduct(C).sum(), 0.0);
  out.value = p == 2 ? std::sqrt(out.cost) : out.cost;
  return out;
}

namespace {

double log_sum_exp(const Eigen::ArrayXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v - m).exp().sum());
}

}  // namespace

SinkhornResult wasserstein_sinkhorn(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                    int p, double regularization, int max_iterations) {
  check_pair(mu, nu);
  if (!(regularization > 0.0)) throw InvalidInput("wasserstein_sinkhorn: regularization must be > 0");
  const Eigen::MatrixXd C = cost_matrix(mu, nu, p);
  const int m = mu.size();
  const int n = nu.size();
  const Eigen::ArrayXd log_a = mu.weights.array().log();
  const Eigen::ArrayXd log_b = nu.weights.array().log();
  Eigen::ArrayXd f = Eigen::ArrayXd::Zero(m);
  Eigen::ArrayXd g = Eigen::ArrayXd::Zero(n);
  const double eps = regularization;
  const auto plan = [&]() {
    Eigen::MatrixXd P(m, n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < m; ++i) P(i, j) = std::exp((f[i] + g[j] - C(i, j)) / eps);
    }
    return P;
  };

  SinkhornResult out;
  for (int it = 0; it < max_iterations; ++it) {
    for (int i = 0; i < m; ++i) {
      if (!std::isfinite(log_a[i])) { f[i] = -std::numeric_limits<double>::infinity(); continue; }
      f[i] = eps * log_a[i] - eps * log_sum_exp((g - C.row(i).transpose().array()) / eps);
    }
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(log_b[j])) { g[j] = -std::numeric_limits<double>::infinity(); continue; }
      g[j] = eps * log_b[j] - eps * log_sum_exp((f - C.col(j).array()) / eps);
    }
    out.iterations = it + 1;
    // Columns are exact after the g update; check the rows.
    if ((it + 1) % 10 == 0 || it + 1 == max_iterations) {
      const Eigen::MatrixXd P = plan();
      out.marginal_violation = (P.rowwise().sum() - mu.weights).cwiseAbs().maxCoeff();
      if (out.marginal_violation < 1e-8) {
        out.converged = true;
        break;
      }
    }
  }
  const Eigen::MatrixXd P = plan();
  Coupling cp{P};
  out.marginal_violation = cp.marginal_violation(mu, nu);
  const double cost = std::max(P.cwiseProduct(C).sum(), 0.0);
  out.value = p == 2 ? std::sqrt(cost) : cost;
  return out;
}

double coupling_from_map(const Eigen::MatrixXd& f_images, const Eigen::MatrixXd& g_images) {
  if (f_images.rows() != g_images.rows() || f_images.cols() != g_images.cols()) {
    throw InvalidInput("coupling_from_map: image shapes differ");
  }
  if (f_images.cols() == 0) throw InvalidInput("coupling_from_map: no samples");
  return std::sqrt((f_images - g_images).colwise().squaredNorm().mean());
}

Eigen::MatrixXd push_forward(const Eigen::MatrixXd& samples, const VectorMap& f) {
  if (samples.cols() == 0) return {};
  const Eigen::VectorXd first = f(samples.col(0));
  Eigen::MatrixXd out(first.size(), samples.cols());
  out.col(0) = first;
  for (Eigen::Index i = 1; i < samples.cols(); ++i) out.col(i) = f(samples.col(i));
  return out;
}

double coupling_from_map(const Eigen::MatrixXd& samples, const VectorMap& f, const VectorMap& g) {
  return coupling_from_map(push_forward(samples, f), push_forward(samples, g));
}

double expectation(const ScalarTest& f, const EmpiricalMeasure& mu) {
  double s = 0.0;
  for (int i = 0; i < mu.size(); ++i) s += mu.weights[i] * f(mu.points.col(i));
  return s;
}

double observed_lipschitz(const ScalarTest& phi, const EmpiricalMeasure& mu,
                          const EmpiricalMeasure& nu) {
  const int total = mu.size() + nu.size();
  const int stride = std::max(1, total / 400);
  std::vector<Eigen::VectorXd> pts;
  std::vector<double> vals;
  for (int k = 0; k < total; k += stride) {
    const Eigen::VectorXd x = k < mu.size() ? Eigen::VectorXd(mu.points.col(k))
                                            : Eigen::VectorXd(nu.points.col(k - mu.size()));
    vals.push_back(phi(x));
    pts.push_back(x);
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      const double d = (pts[a] - pts[b]).norm();
      if (d > 0.0) worst = std::max(worst, std::abs(vals[a] - vals[b]) / d);
    }
  }
  return worst;
}

LipschitzCheck lipschitz_discrepancy(const ScalarTest& phi, double lipschitz,
                                     const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  check_pair(mu, nu);
  if (!(lipschitz >= 0.0)) throw InvalidInput("lipschitz_discrepancy: L must be >= 0");
  if (observed_lipschitz(phi, mu, nu) > lipschitz * (1.0 + 1e-9) + 1e-12) {
    throw InvalidInput("lipschitz_discrepancy: test function exceeds its Lipschitz bound");
  }
  LipschitzCheck out;
  out.discrepancy = std::abs(expectation(phi, mu) - expectation(phi, nu));
  out.bound = lipschitz * wasserstein_exact(mu, nu, 1).value;
  if (out.discrepancy > out.bound + 1e-9) {
    throw AssertionFailure("lipschitz_discrepancy",
                           "mean discrepancy exceeds L * W1");
  }
  return out;
}

double kr_dual_lower(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                     const std::vector<ScalarTest>& candidates) {
  check_pair(mu, nu);
  double best = 0.0;
  bool first = true;
  for (const auto& phi : candidates) {
    if (observed_lipschitz(phi, mu, nu) > 1.0 + 1e-9) {
      throw InvalidInput("kr_dual_lower: candidate is not 1-Lipschitz");
    }
    const double v = expectation(phi, mu) - expectation(phi, nu);
    if (first || v > best) best = v;
    first = false;
  }
  return best;
}

double mmd_discrepancy(const std::vector<ScalarTest>& functions, const EmpiricalMeasure& mu,
                       const EmpiricalMeasure& nu) {
  check_pair(mu, nu);
  double best = 0.0;
  for (const auto& f : functions) {
    best = std::max(best, std::abs(expectation(f, mu) - expectation(f, nu)));
  }
  return best;
}

EmpiricalMeasure read_measure_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (std::isalpha(static_cast<unsigned char>(line[0]))) {
      if (rows.empty()) continue;  // header
      throw InvalidInput("read_measure_csv: unexpected text row");
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw InvalidInput("read_measure_csv: bad number '" + cell + "'");
      }
    }
    if (row.size() < 2) throw InvalidInput("read_measure_csv: need weight and coordinates");
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InvalidInput("read_measure_csv: ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput("read_measure_csv: no rows");
  const int n = static_cast<int>(rows.front().size()) - 1;
  Eigen::MatrixXd pts(n, rows.size());
  Eigen::VectorXd w(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    w[k] = rows[k][0];
    for (int d = 0; d < n; ++d) pts(d, k) = rows[k][d + 1];
  }
  EmpiricalMeasure mu(std::move(pts), std::move(w));
  mu.validate(false);
  return mu;
}

EmpiricalMeasure read_measure_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("read_measure_csv: cannot open " + path);
  return read_measure_csv(in);
}

void write_measure_csv(std::ostream& out, const EmpiricalMeasure& mu) {
  out << "weight";
  for (int d = 0; d < mu.dimension(); ++d) out << ",x" << d + 1;
  out << '\n' << std::setprecision(17);
  for (int k = 0; k < mu.size(); ++k) {
    out << mu.weights[k];
    for (int d = 0; d < mu.dimension(); ++d) out << ',' << mu.points(d, k);
    out << '\n';
  }
}

}  // namespace barronlab
