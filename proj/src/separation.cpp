#include "barronlab/separation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "barronlab/errors.hpp"
#include "barronlab/quadrature.hpp"
#include "barronlab/spectral.hpp"

namespace barronlab {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

SeparationConfig& SeparationConfig::resolve() {
  if (n < 3 || n % 4 != 3) throw InvalidInput("SeparationConfig: n must be 3 mod 4");
  if (!(C1 >= 1.0) || !(C2 > C1) || !(C3 >= 1.0) || !(C1 * C3 >= 1.5)) {
    throw InvalidInput("SeparationConfig: need C1*C3 >= 3/2, C2 > C1 >= 1, C3 >= 1");
  }
  if (smoothness < 2) throw InvalidInput("SeparationConfig: smoothness must be >= 2");
  const double root_n = std::sqrt(static_cast<double>(n));
  K3 = C3 * root_n;
  K2 = C2 * n;
  const CosInterval interval = scan_cos_interval(n, K3, C1 * root_n);
  K1 = interval.start;
  eps = interval.length;
  if (!(K2 > K1 + eps)) {
    throw InvalidInput("SeparationConfig: K2 must exceed K1 + eps so g = 1 on supp f");
  }
  return *this;
}

SeparationConfig SeparationConfig::resolved() const {
  SeparationConfig copy = *this;
  return copy.resolve();
}

std::int64_t evaluate(const IntPolynomial& p, std::int64_t n) {
  std::int64_t v = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * n + *it;
  return v;
}

double evaluate(const IntPolynomial& p, double n) {
  double v = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * n + static_cast<double>(*it);
  return v;
}

namespace {

/// p · (a + b n), accumulated into `out`.
void add_product(IntPolynomial& out, const IntPolynomial& p, std::int64_t a, std::int64_t b) {
  if (out.size() < p.size() + 1) out.resize(p.size() + 1, 0);
  for (std::size_t d = 0; d < p.size(); ++d) {
    out[d] += a * p[d];
    out[d + 1] += b * p[d];
  }
}

void trim(IntPolynomial& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

}  // namespace

Rational LaplacianCoeffs::coefficient(int i, int j, std::int64_t n) const {
  if (n < 1) throw InvalidInput("LaplacianCoeffs: n must be >= 1");
  const auto it = terms.find({i, j});
  if (it == terms.end()) return Rational(0);
  boost::multiprecision::cpp_int num = 0;
  for (auto c = it->second.rbegin(); c != it->second.rend(); ++c) num = num * n + *c;
  boost::multiprecision::cpp_int den = boost::multiprecision::pow(boost::multiprecision::cpp_int(n), j);
  return Rational(num, den);
}

Rational LaplacianCoeffs::abs_sum(std::int64_t n) const {
  Rational total = 0;
  for (const auto& [key, poly] : terms) total += abs(coefficient(key.first, key.second, n));
  return total;
}

LaplacianCoeffs radial_laplacian_coeffs(int k) {
  if (k < 0) throw InvalidInput("radial_laplacian_coeffs: k must be >= 0");
  LaplacianCoeffs c;
  c.terms[{0, 0}] = {1};
  for (int step = 0; step < k; ++step) {
    std::map<std::pair<int, int>, IntPolynomial> next;
    for (const auto& [key, p] : c.terms) {
      const auto [i, j] = key;
      // (I - Δ)(f^{(i)} r^{-j}) with Δφ = (n-1)/r φ' + φ'', written as
      // n^{j'} c' f^{(i')} r^{-j'}:
      //   f^{(i)} r^{-j}         : P
      //   f^{(i+1)} r^{-(j+1)}   : P (2j + 1 - n)
      //   f^{(i)} r^{-(j+2)}     : P j (n - 2 - j)
      //   f^{(i+2)} r^{-j}       : -P
      add_product(next[{i, j}], p, 1, 0);
      add_product(next[{i + 1, j + 1}], p, 2 * j + 1, -1);
      if (j > 0) add_product(next[{i, j + 2}], p, -static_cast<std::int64_t>(j) * (2 + j), j);
      add_product(next[{i + 2, j}], p, -1, 0);
    }
    c.terms.clear();
    for (auto& [key, p] : next) {
      trim(p);
      if (!p.empty()) c.terms[key] = std::move(p);
    }
  }
  c.order = k;
  return c;
}

Eigen::VectorXd apply_radial_operator(const LaplacianCoeffs& coeffs, const RadialProfile& profile,
                                      int n, const Eigen::VectorXd& radii) {
  if (profile.max_order() < 2 * coeffs.order) {
    throw InvalidInput("apply_radial_operator: profile lacks derivatives of order 2k");
  }
  Eigen::VectorXd out(radii.size());
  for (Eigen::Index t = 0; t < radii.size(); ++t) {
    const double r = radii[t];
    if (!(r >= 0.0)) throw InvalidInput("apply_radial_operator: radii must be >= 0");
    double s = 0.0;
    for (const auto& [key, p] : coeffs.terms) {
      const auto [i, j] = key;
      const double d = profile.derivative(i, r);
      if (d == 0.0) continue;
      if (j > 0 && r == 0.0) {
        throw DomainError("apply_radial_operator: singular term at r = 0");
      }
      s += evaluate(p, static_cast<double>(n)) * d / std::pow(r, j);
    }
    out[t] = s;
  }
  return out;
}

RadialProfile build_f(const SeparationConfig& config) {
  if (!(config.eps > 0.0)) throw InvalidInput("build_f: configuration not resolved");
  return bump_density(config.smoothness, config.eps).translated(config.K1);
}

RadialProfile build_g(const SeparationConfig& config) {
  if (!(config.K2 > 0.0)) throw InvalidInput("build_g: configuration not resolved");
  return plateau((config.n + 1) / 2, config.K2);
}

double sphere_area(int n) {
  return 2.0 * std::exp(0.5 * n * std::log(kPi) - log_gamma(0.5 * n));
}

FourierL1Bound g_l1_fourier_bound(const RadialProfile& g, int n, double support,
                                  bool with_grid_estimate, int grid_resolution) {
  if (n < 3 || n % 4 != 3) {
    throw InvalidInput("g_l1_fourier_bound: (n + 1) / 4 must be an integer (n = 3 mod 4)");
  }
  if (!(support > 0.0)) throw InvalidInput("g_l1_fourier_bound: support must be positive");
  const LaplacianCoeffs coeffs = radial_laplacian_coeffs((n + 1) / 4);
  const auto value = [&](double r) {
    return apply_radial_operator(coeffs, g, n, Eigen::VectorXd::Constant(1, r))[0];
  };
  // ∫ v(r)² r^{n-1} dr over [0, support], tolerance relative to the peak of v.
  double scale = 0.0;
  for (int t = 0; t <= 64; ++t) scale = std::max(scale, std::abs(value(support * (t + 0.5) / 65)));
  const double integral = adaptive_simpson(
      [&](double r) {
        if (r == 0.0) return 0.0;
        const double v = value(r);
        return v * v * std::pow(r, n - 1);
      },
      0.0, support, 1e-12 * std::max(scale * scale, 1e-300) * std::pow(support, n), 64);
  FourierL1Bound out;
  out.sobolev_norm = std::sqrt(sphere_area(n) * integral);
  out.prefactor = std::exp(0.5 * (log_gamma(0.5) - n * std::log(2.0) - 0.5 * n * std::log(kPi) -
                                  log_gamma(0.5 * (n + 1))));
  out.bound = out.prefactor * out.sobolev_norm;

  if (with_grid_estimate) {
    if (n != 3) throw InvalidInput("g_l1_fourier_bound: grid estimate only in n = 3");
    const double hw = 1.02 * support;
    const Eigen::Vector3d centre = Eigen::Vector3d::Zero();
    const auto grid = GridFunctiond::sample(
        centre, Eigen::Vector3d::Constant(hw), grid_resolution,
        [&](const Eigen::VectorXd& x) { return g(x.norm()); });
    const double cutoff = kPi / grid.spacing(0);
    const auto spectrum = forward_ft(grid, cutoff, grid_resolution);
    out.grid_estimate = spectrum.amplitudes().cwiseAbs().sum() * spectrum.cell_volume();
  }
  return out;
}

FourierL1Bound g_l1_fourier_bound(const SeparationConfig& config, bool with_grid_estimate) {
  return g_l1_fourier_bound(build_g(config), config.n, 2.0 * config.K2, with_grid_estimate);
}

namespace {

std::vector<double> spectrum(const RadialProfile& f, int n, const std::vector<double>& rho) {
  return radial_ft(f, n, rho).values;
}

/// Composite Simpson on an odd number of equally spaced samples.
double simpson(const std::vector<double>& y, double h) {
  const std::size_t N = y.size();
  if (N < 3 || N % 2 == 0) throw InvalidInput("simpson: need an odd number >= 3 of samples");
  double s = y.front() + y.back();
  for (std::size_t i = 1; i + 1 < N; ++i) s += (i % 2 ? 4.0 : 2.0) * y[i];
  return s * h / 3.0;
}

}  // namespace

SpectralShell spectral_shell(const SeparationConfig& config, int lattice) {
  if (lattice < 8) throw InvalidInput("spectral_shell: lattice too small");
  const RadialProfile f = build_f(config);
  const int n = config.n;
  const double K3 = config.K3;
  const double half_period = kPi / config.K1;
  const double lo = std::max(K3 - half_period, 0.5 * K3);
  const double hi = K3 + half_period;
  const double step = (hi - lo) / lattice;

  SpectralShell out;
  out.at_k3 = spectrum(f, n, {K3})[0];
  std::vector<double> rho(lattice + 1);
  for (int t = 0; t <= lattice; ++t) rho[t] = lo + t * step;
  const std::vector<double> v = spectrum(f, n, rho);
  int arg = 0;
  for (int t = 1; t <= lattice; ++t) {
    if (std::abs(v[t]) > std::abs(v[arg])) arg = t;
  }
  out.peak = std::abs(v[arg]);
  const double centre = rho[arg];
  const auto above = [&](double r) { return r > 0.0 && std::abs(spectrum(f, n, {r})[0]) >= 0.5 * out.peak; };
  // Walk out lattice step by lattice step, then bisect the crossing.
  const auto edge = [&](double direction) {
    double inside = centre;
    double outside = centre + direction * step;
    while (above(outside)) {
      inside = outside;
      outside += direction * step;
    }
    for (int it = 0; it < 50; ++it) {
      const double mid = 0.5 * (inside + outside);
      (above(mid) ? inside : outside) = mid;
    }
    return inside;
  };
  out.lower = edge(-1.0);
  out.upper = edge(1.0);

  const int N = 2 * lattice + 1;
  const double h = (out.upper - out.lower) / (N - 1);
  std::vector<double> grid(N);
  for (int t = 0; t < N; ++t) grid[t] = out.lower + t * h;
  const std::vector<double> vals = spectrum(f, n, grid);
  std::vector<double> integrand(N);
  for (int t = 0; t < N; ++t) integrand[t] = std::pow(grid[t], n) * std::abs(vals[t]);
  out.weighted_mass = sphere_area(n) * simpson(integrand, h);
  return out;
}

namespace {

struct WeightedSpectrum {
  double truncated = 0.0;  // ∫_{‖ω‖ ≤ cutoff} ‖ω‖|f̂|
  double tail = 0.0;       // power-law estimate of the remainder
  double cutoff = 0.0;
  bool converges = true;
};

// |f̂(ρ)| ~ ρ^{-(n-1)/2 - (m+2)}, so ρ^n |f̂| ~ ρ^{-decay}.
double spectrum_decay(const SeparationConfig& config) {
  return 0.5 * (config.n - 1) + config.smoothness + 2 - config.n;
}

// Radial quadrature period by period up to 2π(m+2)/ε, past which the bump's
// algebraic decay has set in; the remainder is estimated from the last
// period's envelope.
WeightedSpectrum weighted_spectrum(const SeparationConfig& config, int points_per_period) {
  if (points_per_period < 4 || points_per_period % 2) {
    throw InvalidInput("weighted spectrum: points_per_period must be even and >= 4");
  }
  const RadialProfile f = build_f(config);
  const int n = config.n;
  const double decay = spectrum_decay(config);
  WeightedSpectrum out;
  out.converges = decay > 1.0;
  const double period = 2.0 * kPi / config.K1;
  const double h = period / points_per_period;
  const double limit = 2.0 * kPi * (config.smoothness + 2) / config.eps;
  double total = 0.0;
  double envelope = 0.0;
  double start = 0.0;
  std::vector<double> rho(points_per_period + 1), integrand(points_per_period + 1);
  while (start < limit) {
    for (int t = 0; t <= points_per_period; ++t) rho[t] = start + t * h;
    const std::vector<double> v = spectrum(f, n, rho);
    envelope = 0.0;
    for (std::size_t t = 0; t < rho.size(); ++t) {
      integrand[t] = std::pow(rho[t], n) * std::abs(v[t]);
      envelope = std::max(envelope, integrand[t]);
    }
    total += simpson(integrand, h);
    start += period;
  }
  const double area = sphere_area(n);
  out.truncated = area * total;
  out.tail = out.converges ? area * envelope * start / (decay - 1.0)
                           : std::numeric_limits<double>::infinity();
  out.cutoff = start;
  return out;
}

BarronEstimate lower_from(const SeparationConfig& config, const WeightedSpectrum& w,
                          const FourierL1Bound& g, int points_per_period) {
  BarronEstimate e;
  e.direction = Direction::lower;
  e.set = BoundedSetd::ball(config.n, 2.0 * config.K2);
  e.value = 2.0 * config.K2 * w.truncated / g.bound;
  e.method = "plateau g = b(|x|/K2); int_{|w| <= cutoff} |w||f^| / Sobolev bound on int |g^|";
  e.cutoff = w.cutoff;
  e.resolution = points_per_period;
  return e;
}

BarronEstimate upper_from(const SeparationConfig& config, const WeightedSpectrum& w,
                          int points_per_period) {
  BarronEstimate e;
  e.direction = Direction::upper;
  e.set = BoundedSetd::ball(config.n, 2.0 * config.K2);
  e.method = "f as its own extension; radial quadrature of |w||f^| plus power-law tail";
  e.resolution = points_per_period;
  e.cutoff = w.cutoff;
  if (!w.converges) {
    e.value = std::numeric_limits<double>::infinity();
    e.warning = "integral of |w||f^| diverges for this smoothness and dimension";
    return e;
  }
  e.tail_estimate = 2.0 * config.K2 * w.tail;
  e.value = 2.0 * config.K2 * (w.truncated + w.tail);
  return e;
}

}  // namespace

BarronEstimate f_lower_bound(const SeparationConfig& config, int points_per_period) {
  return lower_from(config, weighted_spectrum(config, points_per_period),
                    g_l1_fourier_bound(config), points_per_period);
}

BarronEstimate f_upper_bound(const SeparationConfig& config, int points_per_period) {
  return upper_from(config, weighted_spectrum(config, points_per_period), points_per_period);
}

FactorBounds factor_upper_bounds(const SeparationConfig& config, double r, double s,
                                 int lattice) {
  if (!(r > 0.0) || !(s > 0.0)) throw InvalidInput("factor_upper_bounds: r, s must be positive");
  if (lattice < 3) throw InvalidInput("factor_upper_bounds: lattice too small");
  FactorBounds out;
  out.square_norm = square_norm_bound(config.n, r);

  // h(y) = f₁(√y), nonzero only on [K1², (K1+ε)²].
  const RadialProfile f = build_f(config);
  const double y0 = config.K1 * config.K1;
  const double y1 = (config.K1 + config.eps) * (config.K1 + config.eps);
  const double dy = (y1 - y0) / (lattice - 1);
  std::vector<double> h(lattice), h1(lattice), h2(lattice);
  for (int t = 0; t < lattice; ++t) {
    const double y = y0 + t * dy;
    const double x = std::sqrt(y);
    const double d1 = f.derivative(1, x);
    h[t] = f(x);
    h1[t] = d1 / (2.0 * x);
    h2[t] = f.derivative(2, x) / (4.0 * y) - d1 / (4.0 * y * x);
  }
  const GammaPair pair = l1_fourier_bound_1d(h, h1, h2, dy);
  BarronEstimate& e = out.one_dim;
  e.direction = Direction::upper;
  e.set = BoundedSetd::ball(1, s);
  e.value = s * pair.c;
  e.method = "y -> f1(sqrt y) as its own extension; 1-D Sobolev bound";
  e.resolution = lattice;
  return out;
}

SeparationRow separation_row(SeparationConfig config) {
  config.resolve();
  SeparationRow row;
  row.config = config;
  const int n = config.n;
  const double r = 2.0 * config.K2;
  const double s = r * r;
  const WeightedSpectrum w = weighted_spectrum(config, 16);
  const FourierL1Bound g = g_l1_fourier_bound(config);
  row.lower_f = lower_from(config, w, g, 16).value;
  const SpectralShell shell = spectral_shell(config);
  row.shell_lower = shell.lower;
  row.shell_upper = shell.upper;
  const FactorBounds factors = factor_upper_bounds(config, r, s);
  row.upper_sq = factors.square_norm.value;
  row.upper_1d = factors.one_dim.value;
  row.ratio = row.lower_f / (row.upper_sq + row.upper_1d);
  row.upper_f = upper_from(config, w, 16).value;
  row.g_bound = g.bound;
  row.shell_mass = shell.weighted_mass;
  const double half = 0.5 * n;
  const double core = (half - 3.0) * std::log(config.C1) + half * std::log(config.C3) -
                      (half - 1.0) * std::log(config.C2) + 0.5 * std::log(n);
  row.theory_lower_pow2 = std::exp(core - n * std::log(2.0));
  row.theory_lower_pow5 = std::exp(core - half * std::log(5.0));
  row.theory_sq = n * r * r * r;
  row.theory_1d = s * std::sqrt(config.C1) * std::pow(config.C3, 1.5) * n * n;
  return row;
}

SeparationReport separation_report(const std::vector<int>& ns, const std::vector<double>& c3s,
                                   double C1, double C2, double search_limit) {
  SeparationReport report;
  report.search_limit = search_limit;
  for (int n : ns) {
    std::vector<double> ratios;
    for (double c3 : c3s) {
      SeparationConfig cfg;
      cfg.n = n;
      cfg.C1 = C1;
      cfg.C2 = C2;
      cfg.C3 = c3;
      report.rows.push_back(separation_row(cfg));
      ratios.push_back(report.rows.back().ratio);
    }
    bool increasing = true;
    for (std::size_t t = 1; t < ratios.size(); ++t) increasing &= ratios[t] > ratios[t - 1];
    report.increasing_in_c3[n] = increasing;

    // Ascending scan over the grid merged with a doubling sequence; grid rows
    // are reused, configurations violating the constraints are skipped.
    std::map<double, std::optional<double>> candidates;
    for (const SeparationRow& row : report.rows) {
      if (row.config.n == n) candidates[row.config.C3] = row.ratio;
    }
    for (double c3 = std::max(1.5 / C1, 1.0); c3 <= search_limit; c3 *= 2.0) {
      candidates.try_emplace(c3, std::nullopt);
    }
    std::optional<double> found;
    for (auto& [c3, ratio] : candidates) {
      if (!ratio) {
        SeparationConfig cfg;
        cfg.n = n;
        cfg.C1 = C1;
        cfg.C2 = C2;
        cfg.C3 = c3;
        try {
          cfg.resolve();
        } catch (const InvalidInput&) {
          continue;
        }
        const double r = 2.0 * cfg.K2;
        const FactorBounds fb = factor_upper_bounds(cfg, r, r * r);
        ratio = f_lower_bound(cfg).value / (fb.square_norm.value + fb.one_dim.value);
      }
      if (*ratio > 1.0) {
        found = c3;
        break;
      }
    }
    report.smallest_c3_above_one[n] = found;
  }
  return report;
}

std::string separation_csv(const SeparationReport& report) {
  std::ostringstream out;
  out << "n,C1,C2,C3,K1,eps,lower_f,upper_sq,upper_1d,ratio,upper_f,g_bound,shell_lower,"
         "shell_upper,shell_mass,theory_lower_pow2,theory_lower_pow5,theory_sq,theory_1d\n";
  out << std::setprecision(12);
  for (const SeparationRow& r : report.rows) {
    const SeparationConfig& c = r.config;
    out << c.n << ',' << c.C1 << ',' << c.C2 << ',' << c.C3 << ',' << c.K1 << ',' << c.eps << ','
        << r.lower_f << ',' << r.upper_sq << ',' << r.upper_1d << ',' << r.ratio << ','
        << r.upper_f << ',' << r.g_bound << ',' << r.shell_lower << ',' << r.shell_upper << ','
        << r.shell_mass << ','
        << r.theory_lower_pow2 << ',' << r.theory_lower_pow5 << ',' << r.theory_sq << ','
        << r.theory_1d << '\n';
  }
  return out.str();
}

}  // namespace barronlab
