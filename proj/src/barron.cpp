#include "barronlab/barron.hpp"

#include <cmath>
#include <sstream>

#include "barronlab/errors.hpp"

namespace barronlab {

std::string to_string(Direction d) {
  return d == Direction::upper ? "upper" : "lower";
}

BarronEstimate upper_bound_from_extension(const GridFunctiond& F,
                                          const BoundedSetd& B, double cutoff,
                                          int freq_resolution,
                                          std::string recipe) {
  if (B.dimension() != F.dimension()) {
    throw InvalidInput("upper_bound_from_extension: set dimension mismatch");
  }
  const SpectrumGridd s = forward_ft(F, cutoff, freq_resolution);
  double total = 0.0;
  double tail = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    const double term = support_norm(B, s.node(k)) * std::abs(s.amplitudes()[k]);
    total += term;
    if (s.on_outer_shell(k)) tail += term;
  }
  BarronEstimate e;
  e.direction = Direction::upper;
  e.value = total * s.cell_volume();
  e.set = B;
  e.method = std::move(recipe);
  e.resolution = F.resolution();
  e.cutoff = cutoff;
  e.freq_resolution = freq_resolution;
  e.tail_estimate = tail * s.cell_volume();
  if (e.tail_estimate > 0.1 * e.value) {
    e.warning = "spectral tail exceeds 10% of the estimate; raise the cutoff";
  }
  return e;
}

BarronEstimate lower_bound(const std::vector<GridFunctiond>& grad_f,
                           const GridFunctiond& g, double r, double cutoff,
                           int freq_resolution) {
  const int n = g.dimension();
  if (static_cast<int>(grad_f.size()) != n) {
    throw InvalidInput("lower_bound: need one gradient component per axis");
  }
  if (!(r > 0.0)) throw InvalidInput("lower_bound: radius must be positive");
  for (const auto& c : grad_f) {
    if (!c.same_grid(g)) throw InvalidInput("lower_bound: grids differ");
  }
  // supp g must lie in the ball of radius r.
  const double scale = g.values().cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    if (g.point(k).norm() > r * (1.0 + 1e-12) &&
        std::abs(g.values()[k]) > 1e-12 * std::max(scale, 1e-300)) {
      throw InvalidInput("lower_bound: g does not vanish outside the ball");
    }
  }
  const SpectrumGridd sg = forward_ft(g, cutoff, freq_resolution);
  const double denominator = sg.amplitudes().cwiseAbs().sum() * sg.cell_volume();
  if (denominator < 1e-12) {
    throw InvalidInput("lower_bound: degenerate g, ∫|ĝ| below 1e-12");
  }
  Eigen::VectorXd squared = Eigen::VectorXd::Zero(sg.size());
  for (const auto& c : grad_f) {
    const SpectrumGridd sc = forward_ft(c.cwiseProduct(g), cutoff, freq_resolution);
    squared += sc.amplitudes().cwiseAbs2();
  }
  double numerator = 0.0;
  double tail = 0.0;
  for (Eigen::Index k = 0; k < sg.size(); ++k) {
    const double v = std::sqrt(squared[k]);
    numerator += v;
    if (sg.on_outer_shell(k)) tail += v;
  }
  numerator *= sg.cell_volume();
  BarronEstimate e;
  e.direction = Direction::lower;
  e.value = r * numerator / denominator;
  e.set = BoundedSetd::ball(n, r);
  e.method = "gradient times localiser";
  e.resolution = g.resolution();
  e.cutoff = cutoff;
  e.freq_resolution = freq_resolution;
  e.tail_estimate = r * tail * sg.cell_volume() / denominator;
  return e;
}

namespace {

double trapezoid_squares(std::span<const double> a, std::span<const double> b,
                         double spacing) {
  if (a.size() != b.size()) {
    throw InvalidInput("l1_fourier_bound_1d: sample arrays differ in length");
  }
  std::vector<double> s(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) s[i] = a[i] * a[i] + b[i] * b[i];
  return trapezoid(s, spacing);
}

}  // namespace

GammaPair l1_fourier_bound_1d(std::span<const double> h,
                              std::span<const double> h1,
                              std::span<const double> h2, double spacing) {
  if (!(spacing > 0.0)) throw InvalidInput("l1_fourier_bound_1d: spacing");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  return {inv_sqrt2 * std::sqrt(trapezoid_squares(h, h1, spacing)),
          inv_sqrt2 * std::sqrt(trapezoid_squares(h1, h2, spacing))};
}

BarronEstimate combine_subadditive(
    const std::vector<std::pair<double, BarronEstimate>>& terms) {
  if (terms.empty()) {
    throw InvalidInput("combine_subadditive: no terms");
  }
  BarronEstimate out = terms.front().second;
  out.value = 0.0;
  out.tail_estimate = 0.0;
  std::ostringstream method;
  method << "sum of " << terms.size() << " terms";
  for (const auto& [beta, e] : terms) {
    if (e.direction != Direction::upper) {
      throw InvalidInput("combine_subadditive: only upper estimates combine");
    }
    if (!(e.set == out.set)) {
      throw InvalidInput("combine_subadditive: estimates on different sets");
    }
    out.value += std::abs(beta) * e.value;
    out.tail_estimate += std::abs(beta) * e.tail_estimate;
    if (!e.warning.empty()) out.warning = e.warning;
  }
  out.method = method.str() + " [" + terms.front().second.method + "]";
  return out;
}

BarronEstimate ridge_lift(const BarronEstimate& h, const Eigen::VectorXd& a,
                          int n) {
  if (h.direction != Direction::upper) {
    throw InvalidInput("ridge_lift: needs an upper estimate");
  }
  if (a.size() != n) throw InvalidInput("ridge_lift: direction dimension");
  if (std::abs(a.norm() - 1.0) > 1e-10) {
    throw InvalidInput("ridge_lift: direction must be a unit vector");
  }
  if (h.set.dimension() != 1 || h.set.kind() != SetKind::ball) {
    throw InvalidInput("ridge_lift: expects a bound on an interval [-r, r]");
  }
  BarronEstimate out = h;
  out.set = BoundedSetd::ball(n, h.set.radius());
  out.method = "ridge of " + h.method;
  return out;
}

GammaPair power_rule(GammaPair g, int k) {
  if (k < 1) throw InvalidInput("power_rule: k must be >= 1");
  return {std::pow(g.a, k), k * std::pow(g.a, k - 1) * g.c};
}

IdentityExtension identity_extension(double r, int lattice) {
  if (!(r > 0.0)) throw InvalidInput("identity_extension: r must be > 0");
  if (lattice < 3) throw InvalidInput("identity_extension: lattice too small");
  const Profile1D b = plateau(2, r);
  const Profile1D h(
      [b](int k, double x) {
        // Leibniz on x · b(x).
        const double bk = b.derivative(k, x);
        return k == 0 ? x * bk : x * bk + k * b.derivative(k - 1, x);
      },
      -2.0 * r, 2.0 * r, b.max_order());
  const double dx = 4.0 * r / (lattice - 1);
  std::vector<double> v0(lattice), v1(lattice), v2(lattice);
  for (int i = 0; i < lattice; ++i) {
    const double x = -2.0 * r + i * dx;
    v0[i] = h.derivative(0, x);
    v1[i] = h.derivative(1, x);
    v2[i] = h.derivative(2, x);
  }
  return {r, l1_fourier_bound_1d(v0, v1, v2, dx), h};
}

BarronEstimate square_norm_bound(int n, double r) {
  if (n < 0) throw InvalidInput("square_norm_bound: n must be >= 0");
  if (!(r > 0.0)) throw InvalidInput("square_norm_bound: r must be > 0");
  BarronEstimate e;
  e.direction = Direction::upper;
  e.set = BoundedSetd::ball(std::max(n, 1), r);
  e.method = "square norm via identity extension";
  if (n == 0) return e;
  const GammaPair square = power_rule(identity_extension(r).pair, 2);
  BarronEstimate coordinate;
  coordinate.direction = Direction::upper;
  coordinate.set = BoundedSetd::ball(1, r);
  coordinate.value = r * square.c;
  coordinate.method = "y^2 from identity extension";
  std::vector<std::pair<double, BarronEstimate>> terms;
  for (int i = 0; i < n; ++i) {
    terms.emplace_back(1.0, ridge_lift(coordinate, Eigen::VectorXd::Unit(n, i), n));
  }
  e = combine_subadditive(terms);
  e.method = "square norm via identity extension";
  return e;
}

double weak_converse_diagnostic(double diameter, const Eigen::VectorXd& c,
                                const Eigen::MatrixXd& a) {
  if (c.size() != a.cols()) {
    throw InvalidInput("weak_converse_diagnostic: one weight vector per node");
  }
  return diameter * (c.cwiseAbs().array() * a.colwise().norm().transpose().array()).sum();
}

GridFunctiond windowed_extension(
    const std::function<double(const Eigen::VectorXd&)>& f, int n, double r,
    int resolution, int m, double half_width) {
  if (!(r > 0.0)) throw InvalidInput("windowed_extension: r must be > 0");
  if (half_width <= 0.0) half_width = 2.05 * r;
  const Profile1D b = plateau(m, r);
  return GridFunctiond::sample(
      Eigen::VectorXd::Zero(n), Eigen::VectorXd::Constant(n, half_width),
      resolution, [&](const Eigen::VectorXd& x) {
        const double w = b(x.norm());
        return w == 0.0 ? 0.0 : w * f(x);
      });
}

}  // namespace barronlab
