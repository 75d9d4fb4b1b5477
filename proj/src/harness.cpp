#include "barronlab/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "barronlab/barron.hpp"
#include "barronlab/compose.hpp"
#include "barronlab/netfit.hpp"
#include "barronlab/rng.hpp"
#include "barronlab/separation.hpp"
#include "barronlab/spectral.hpp"
#include "barronlab/transport.hpp"

#ifndef BARRONLAB_VERSION
#define BARRONLAB_VERSION "0.0.0"
#endif

namespace barronlab {

namespace fs = std::filesystem;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(ExperimentTag t) {
  switch (t) {
    case ExperimentTag::ft_check: return "ft-check";
    case ExperimentTag::barron_bounds: return "barron-bounds";
    case ExperimentTag::fit_scaling: return "fit-scaling";
    case ExperimentTag::compose: return "compose";
    case ExperimentTag::transport_suite: return "transport-suite";
    case ExperimentTag::separation: return "separation";
  }
  return "?";
}

ExperimentTag tag_from_string(const std::string& s) {
  for (ExperimentTag t : {ExperimentTag::ft_check, ExperimentTag::barron_bounds,
                          ExperimentTag::fit_scaling, ExperimentTag::compose,
                          ExperimentTag::transport_suite, ExperimentTag::separation}) {
    if (to_string(t) == s) return t;
  }
  throw SchemaError("unknown experiment \"" + s + "\"");
}

std::string artifact_version() { return BARRONLAB_VERSION; }

Json default_parameters(ExperimentTag tag) {
  switch (tag) {
    case ExperimentTag::ft_check:
      return {{"n", 3},          {"smoothness", 4},    {"bump_center", 1.0},
              {"bump_half_width", 1.0}, {"resolution", 128}, {"half_width", 2.2},
              {"count", 20},     {"rho_min", 0.25},    {"rho_max", 10.0},
              {"tolerance", 1e-3}};
    case ExperimentTag::barron_bounds:
      return {{"n", 3},
              {"radius", 1.0},
              {"resolution", 48},
              {"cutoff", 22.0},
              {"freq_resolution", 45},
              {"refine", 1.5},
              {"stability", 0.05},
              {"ridge_direction", {0.6, 0.8, 0.0}},
              {"ridge_frequency", 1.5},
              {"separation_c3", 4.0},
              {"points_per_period", 16}};
    case ExperimentTag::fit_scaling:
      return {{"n", 2},
              {"radius", 1.0},
              {"samples", 2000},
              {"ks", {8, 16, 32, 64}},
              {"extension_half_width", 7.0},
              {"resolution", 129},
              {"cutoff", 8.0},
              {"freq_resolution", 161},
              {"slope_limit", -0.8},
              {"activation", "logistic"},
              {"fit", Json::object()}};
    case ExperimentTag::compose:
      return {{"margin", 1.0},
              {"accuracy", 0.5},
              {"samples", 10000},
              {"base_radius", 1.0},
              {"layers",
               Json::array({Json{{"rotation", 0.6}, {"phase", {0.3, -0.2}}, {"amplitude", 0.7}},
                            Json{{"rotation", -1.1}, {"phase", {-0.4, 0.5}}, {"amplitude", 0.7}}})},
              {"holdout", 10000},
              {"certificate_points", 1000},
              {"activation", "logistic"},
              {"fit", Json::object()}};
    case ExperimentTag::transport_suite:
      return {{"instances", 100},
              {"max_support", 8},
              {"dim", 2},
              {"lipschitz_tests", 4},
              {"sinkhorn_points", 40},
              {"regularizations", {1.0, 0.5, 0.2, 0.1, 0.05, 0.02}},
              {"sinkhorn_iterations", 20000}};
    case ExperimentTag::separation:
      return {{"ns", {3, 7, 11}},
              {"c3", {4.0, 8.0, 16.0}},
              {"C1", 1.0},
              {"C2", 2.0},
              {"search_limit", 64.0},
              {"require_increasing", {3}}};
  }
  return Json::object();
}

namespace {

// A value must have the JSON kind of its default. Integer defaults reject
// floats; float defaults accept either.
bool same_kind(const Json& fallback, const Json& given) {
  if (fallback.is_number_integer()) return given.is_number_integer();
  if (fallback.is_number()) return given.is_number();
  if (fallback.is_array()) {
    if (!given.is_array()) return false;
    if (fallback.empty()) return true;
    return std::all_of(given.begin(), given.end(),
                       [&](const Json& x) { return same_kind(fallback.front(), x); });
  }
  return fallback.type() == given.type();
}

Json resolve_parameters(ExperimentTag tag, const Json& given) {
  Json out = default_parameters(tag);
  if (!given.is_object()) throw SchemaError("parameters must be an object");
  for (const auto& [key, value] : given.items()) {
    if (!out.contains(key)) {
      throw SchemaError("unknown parameter \"" + key + "\" for " + to_string(tag));
    }
    if (!same_kind(out[key], value)) {
      throw SchemaError("parameter \"" + key + "\" has the wrong type for " + to_string(tag));
    }
    out[key] = value;
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const Json& j) {
  if (!j.is_object()) throw SchemaError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "experiment" && key != "seed" && key != "parameters" && key != "output") {
      throw SchemaError("unknown config key \"" + key + "\"");
    }
  }
  if (!j.contains("experiment") || !j["experiment"].is_string()) {
    throw SchemaError("config needs an \"experiment\" tag");
  }
  if (!j.contains("seed") || !j["seed"].is_number_integer()) {
    throw SchemaError("config needs an integer \"seed\"");
  }
  if (!j["seed"].is_number_unsigned() && j["seed"].get<std::int64_t>() < 0) {
    throw SchemaError("seed must be nonnegative");
  }
  ExperimentConfig c;
  c.tag = tag_from_string(j["experiment"].get<std::string>());
  c.seed = j["seed"].get<std::uint64_t>();
  c.parameters = resolve_parameters(c.tag, j.value("parameters", Json::object()));
  if (j.contains("output")) {
    if (!j["output"].is_string()) throw SchemaError("\"output\" must be a string");
    c.output = j["output"].get<std::string>();
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read config " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("config " + path.string() + " is not JSON: " + e.what());
  }
  return parse_config(j);
}

Json config_json(const ExperimentConfig& c) {
  return {{"experiment", to_string(c.tag)}, {"seed", c.seed}, {"parameters", c.parameters}};
}

const Check* RunRecord::first_failure() const {
  for (const Check& c : checks) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return sha256_hex(s.str());
}

namespace {

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

}  // namespace

std::string table_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_double(row[i]);
    out += '\n';
  }
  return out;
}

ProducedFile write_output(const fs::path& dir, const std::string& name, const std::string& content) {
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return {name, sha256_hex(content), content.size()};
}

std::vector<ProducedFile> emit_plot_data(const RunRecord& record, const fs::path& dir) {
  std::vector<ProducedFile> files;
  for (const Table& t : record.tables) {
    if (t.rows.empty()) continue;
    files.push_back(write_output(dir, t.name + ".csv", table_csv(t)));
  }
  return files;
}

// ---------------------------------------------------------------------------
// Pipelines

namespace {

struct Outcome {
  Json metrics = Json::object();
  std::vector<Table> tables;
  std::vector<std::pair<std::string, std::string>> documents;  // name, content
  std::vector<Check> checks;

  void check_le(const std::string& metric, double value, double limit) {
    checks.push_back({metric, value, limit, value <= limit});
  }
};

int as_int(const Json& p, const char* key) { return p.at(key).get<int>(); }
double as_double(const Json& p, const char* key) { return p.at(key).get<double>(); }

void require(bool ok, const std::string& what) {
  if (!ok) throw SchemaError(what);
}

VectorXd random_unit(int n, Rng& rng) {
  std::normal_distribution<double> z;
  VectorXd v(n);
  do {
    for (int i = 0; i < n; ++i) v[i] = z(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

// Radial transform of a bump profile against direct quadrature of its
// samples on a full grid; error relative to the largest radial value.
Outcome ft_check(const Json& p, std::uint64_t seed) {
  const int n = as_int(p, "n");
  require(n == 2 || n == 3, "ft-check: n must be 2 or 3 for a full grid");
  const int count = as_int(p, "count");
  require(count >= 1, "ft-check: count must be >= 1");
  const double rho_min = as_double(p, "rho_min"), rho_max = as_double(p, "rho_max");
  require(0.0 <= rho_min && rho_min < rho_max, "ft-check: need 0 <= rho_min < rho_max");
  const RadialProfile bump = bump_density(as_int(p, "smoothness"), as_double(p, "bump_half_width"))
                                 .translated(as_double(p, "bump_center"));
  require(bump.lower() >= 0.0, "ft-check: bump must lie in r >= 0");
  const double h = as_double(p, "half_width");
  require(h >= bump.upper(), "ft-check: grid must cover the bump");
  const GridFunctiond f = GridFunctiond::sample(VectorXd::Zero(n), VectorXd::Constant(n, h),
                                                as_int(p, "resolution"),
                                                [&](const VectorXd& x) { return bump(x.norm()); });

  Rng rng(derive_seed(seed, {0x6674}));
  std::uniform_real_distribution<double> U(rho_min, rho_max);
  std::vector<double> rho(count);
  for (double& r : rho) r = U(rng);
  std::sort(rho.begin(), rho.end());
  const auto radial = radial_ft(bump, n, rho);

  double scale = 0.0;
  for (double v : radial.values) scale = std::max(scale, std::abs(v));
  Outcome out;
  Table t{"ft_check", {"rho", "radial", "grid", "abs_error"}, {}};
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    const VectorXd omega = rho[i] * random_unit(n, rng);
    const std::complex<double> grid = fourier_at(f, omega);
    const double err = std::abs(std::complex<double>(radial.values[i]) - grid);
    worst = std::max(worst, err);
    t.rows.push_back({rho[i], radial.values[i], grid.real(), err});
  }
  const double rel = scale > 0.0 ? worst / scale : worst;
  out.metrics = {{"max_abs_error", worst}, {"scale", scale}, {"max_rel_error", rel},
                 {"bessel_error_bound", radial.error_bound}};
  out.tables.push_back(std::move(t));
  out.check_le("ft.max_rel_error", rel, as_double(p, "tolerance"));
  return out;
}

struct BoundPair {
  BarronEstimate upper;
  BarronEstimate lower;
};

using Field = std::function<double(const VectorXd&)>;

// Upper bound from the windowed extension, lower bound from the gradient
// against a plateau localiser, both on one grid.
BoundPair grid_bounds(const Field& f, int n, double r, int N, double cutoff, int fr) {
  const GridFunctiond F = windowed_extension(f, n, r, N);
  BoundPair b{upper_bound_from_extension(F, BoundedSetd::ball(n, r), cutoff, fr, "windowed"),
              {}};
  const Profile1D loc = plateau(4, r / 2);
  const GridFunctiond g = GridFunctiond::sample(F.center(), F.half_width(), N,
                                                [&](const VectorXd& x) { return loc(x.norm()); });
  const GridFunctiond fg = GridFunctiond::sample(F.center(), F.half_width(), N, f);
  b.lower = lower_bound(gradient_grid(fg), g, r, cutoff, fr);
  return b;
}

void sandwich(Outcome& out, const std::string& name, const std::vector<BarronEstimate>& lowers,
              const std::vector<BarronEstimate>& uppers) {
  double lo = 0.0, up = std::numeric_limits<double>::infinity();
  for (const auto& e : lowers) lo = std::max(lo, e.value);
  for (const auto& e : uppers) up = std::min(up, e.value);
  out.metrics[name]["max_lower"] = encode_double(lo);
  out.metrics[name]["min_upper"] = encode_double(up);
  out.check_le(name + ".lower_minus_upper", lo - up, 0.0);
}

void stability(Outcome& out, const std::string& metric, double coarse, double fine, double limit) {
  const double rel = std::abs(fine - coarse) / std::max(std::abs(coarse), 1e-300);
  out.metrics["stability"][metric] = encode_double(rel);
  out.check_le("stability." + metric, rel, limit);
}

Outcome barron_bounds(const Json& p, std::uint64_t) {
  const int n = as_int(p, "n");
  require(n == 2 || n == 3, "barron-bounds: n must be 2 or 3");
  const double r = as_double(p, "radius");
  require(r > 0.0, "barron-bounds: radius must be > 0");
  const int N = as_int(p, "resolution");
  const double cutoff = as_double(p, "cutoff");
  const int fr = as_int(p, "freq_resolution");
  const double refine = as_double(p, "refine");
  require(refine > 1.0, "barron-bounds: refine must exceed 1");
  const int N2 = static_cast<int>(std::lround(N * refine));
  const double cutoff2 = cutoff * refine;
  const int fr2 = static_cast<int>(std::lround((fr - 1) * refine)) + 1;
  const double tol = as_double(p, "stability");
  const VectorXd dir_in = vector_from_json(p.at("ridge_direction"));
  require(dir_in.size() >= n, "barron-bounds: ridge_direction needs n entries");
  VectorXd a = dir_in.head(n);
  require(a.norm() > 0.0, "barron-bounds: ridge_direction must be nonzero");
  a /= a.norm();
  const double k = as_double(p, "ridge_frequency");

  Outcome out;
  Table t{"barron_bounds", {"function", "refined", "lower", "upper"}, {}};
  auto record = [&](const std::string& name, const BarronEstimate& e) {
    out.metrics[name] = e;
  };

  // Gaussian
  const Field gauss = [](const VectorXd& x) { return std::exp(-0.5 * x.squaredNorm()); };
  const BoundPair g1 = grid_bounds(gauss, n, r, N, cutoff, fr);
  const BoundPair g2 = grid_bounds(gauss, n, r, N2, cutoff2, fr2);
  record("gaussian.upper", g1.upper);
  record("gaussian.lower", g1.lower);
  record("gaussian.upper_refined", g2.upper);
  record("gaussian.lower_refined", g2.lower);
  sandwich(out, "gaussian", {g1.lower, g2.lower}, {g1.upper, g2.upper});
  stability(out, "gaussian.upper", g1.upper.value, g2.upper.value, tol);
  stability(out, "gaussian.lower", g1.lower.value, g2.lower.value, tol);
  t.rows.push_back({0, 0, g1.lower.value, g1.upper.value});
  t.rows.push_back({0, 1, g2.lower.value, g2.upper.value});

  // Ridge cos(k<a,x>): direct grid bounds and the lifted one-dimensional bound.
  const Field ridge = [&](const VectorXd& x) { return std::cos(k * a.dot(x)); };
  const BoundPair r1 = grid_bounds(ridge, n, r, N, cutoff, fr);
  const BoundPair r2 = grid_bounds(ridge, n, r, N2, cutoff2, fr2);
  const Field profile = [&](const VectorXd& x) { return std::cos(k * x[0]); };
  auto lifted = [&](int M, double c, int q) {
    const GridFunctiond H = windowed_extension(profile, 1, r, M);
    return ridge_lift(upper_bound_from_extension(H, BoundedSetd::ball(1, r), c, q, "windowed"), a, n);
  };
  const BarronEstimate l1 = lifted(16 * N, cutoff, 8 * fr);
  const BarronEstimate l2 = lifted(16 * N2, cutoff2, 8 * fr2);
  record("ridge.upper", r1.upper);
  record("ridge.lower", r1.lower);
  record("ridge.upper_refined", r2.upper);
  record("ridge.lower_refined", r2.lower);
  record("ridge.upper_lifted", l1);
  record("ridge.upper_lifted_refined", l2);
  sandwich(out, "ridge", {r1.lower, r2.lower}, {r1.upper, r2.upper, l1, l2});
  stability(out, "ridge.upper", r1.upper.value, r2.upper.value, tol);
  stability(out, "ridge.lower", r1.lower.value, r2.lower.value, tol);
  stability(out, "ridge.upper_lifted", l1.value, l2.value, tol);
  t.rows.push_back({1, 0, r1.lower.value, std::min(r1.upper.value, l1.value)});
  t.rows.push_back({1, 1, r2.lower.value, std::min(r2.upper.value, l2.value)});

  // The radial function of the separation construction, through the radial path.
  if (n == 3) {
    SeparationConfig sc;
    sc.n = 3;
    sc.C3 = as_double(p, "separation_c3");
    sc.resolve();
    const int ppp = as_int(p, "points_per_period");
    const BarronEstimate fl1 = f_lower_bound(sc, ppp), fu1 = f_upper_bound(sc, ppp);
    const BarronEstimate fl2 = f_lower_bound(sc, 2 * ppp), fu2 = f_upper_bound(sc, 2 * ppp);
    record("separation_f.upper", fu1);
    record("separation_f.lower", fl1);
    record("separation_f.upper_refined", fu2);
    record("separation_f.lower_refined", fl2);
    sandwich(out, "separation_f", {fl1, fl2}, {fu1, fu2});
    stability(out, "separation_f.upper", fu1.value, fu2.value, tol);
    stability(out, "separation_f.lower", fl1.value, fl2.value, tol);
    t.rows.push_back({2, 0, fl1.value, fu1.value});
    t.rows.push_back({2, 1, fl2.value, fu2.value});
  }
  out.metrics["function_codes"] = {{"0", "gaussian"}, {"1", "ridge"}, {"2", "separation_f"}};
  out.tables.push_back(std::move(t));
  return out;
}

MatrixXd uniform_ball(int n, double radius, int count, Rng& rng) {
  std::uniform_real_distribution<double> u;
  MatrixXd X(n, count);
  for (int i = 0; i < count; ++i) {
    const VectorXd v = random_unit(n, rng);
    X.col(i) = radius * std::pow(u(rng), 1.0 / n) * v;
  }
  return X;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// Gaussian bump fitted with k nodes under the budget 2Ĉ.
Outcome fit_scaling(const Json& p, std::uint64_t seed) {
  const int n = as_int(p, "n");
  require(n == 1 || n == 2 || n == 3, "fit-scaling: n must be 1, 2 or 3");
  const double r = as_double(p, "radius");
  const int N = as_int(p, "samples");
  require(r > 0.0 && N >= 1, "fit-scaling: need radius > 0 and samples >= 1");
  const auto ks = p.at("ks").get<std::vector<int>>();
  require(ks.size() >= 2, "fit-scaling: need at least two k values");
  for (int k : ks) require(k >= 1, "fit-scaling: k must be >= 1");
  const Activation act = activation_from_string(p.at("activation").get<std::string>());
  const FitOptions options = p.at("fit").get<FitOptions>();

  const Field gauss = [](const VectorXd& x) { return std::exp(-0.5 * x.squaredNorm()); };
  // The Gaussian is its own extension; the box only has to hold its mass.
  const double H = as_double(p, "extension_half_width");
  const GridFunctiond F = GridFunctiond::sample(VectorXd::Zero(n), VectorXd::Constant(n, H),
                                                as_int(p, "resolution"), gauss);
  const BarronEstimate C = upper_bound_from_extension(F, BoundedSetd::ball(n, r), as_double(p, "cutoff"),
                                                      as_int(p, "freq_resolution"), "gaussian");

  Rng rng(derive_seed(seed, {0x66697473}));
  const MatrixXd X = uniform_ball(n, r, N, rng);
  VectorXd y(N);
  for (int i = 0; i < N; ++i) y[i] = gauss(X.col(i));
  const VectorXd w = VectorXd::Constant(N, 1.0 / N);

  Outcome out;
  out.metrics["barron_constant"] = C;
  Table t{"fit_scaling", {"k", "rms", "bound"}, {}};
  std::vector<double> kx, mse;
  Json fits = Json::array();
  for (int k : ks) {
    const FitReport report = fit_two_layer(X, y, w, C.value, k, act, derive_seed(seed, {0x6b, static_cast<std::uint64_t>(k)}), options).second;
    const double bound = 4.0 * C.value * C.value / k;
    kx.push_back(k);
    mse.push_back(report.mse);
    t.rows.push_back({double(k), std::sqrt(report.mse), std::sqrt(bound)});
    fits.push_back({{"k", k}, {"report", report}});
    out.check_le("fit.mse_k" + std::to_string(k), report.mse, bound);
  }
  const double slope = loglog_slope(kx, mse);
  out.metrics["fits"] = std::move(fits);
  out.metrics["loglog_slope"] = encode_double(slope);
  out.check_le("fit.loglog_slope", slope, as_double(p, "slope_limit"));
  out.tables.push_back(std::move(t));
  return out;
}

std::vector<LayerSpec> sine_layers(const Json& p, int& base_dim) {
  const Json& specs = p.at("layers");
  require(specs.is_array() && !specs.empty(), "compose: layers must be a nonempty array");
  const double s = as_double(p, "margin");
  double in_radius = as_double(p, "base_radius") + s;
  std::vector<LayerSpec> layers;
  base_dim = 2;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const Json& L = specs[i];
    require(L.is_object(), "compose: each layer must be an object");
    for (const auto& item : L.items()) {
      const std::string& key = item.key();
      require(key == "rotation" || key == "phase" || key == "amplitude" || key == "scale",
              "compose: unknown layer key \"" + key + "\"");
    }
    const double t = decode_double(L.at("rotation"));
    const double scale = L.contains("scale") ? decode_double(L["scale"]) : 1.0;
    Eigen::Matrix2d W;
    W << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    const VectorXd phase = vector_from_json(L.at("phase"));
    require(phase.size() == 2, "compose: phase must have two entries");
    layers.push_back(sine_layer("sine" + std::to_string(i + 1), scale * W, phase,
                                decode_double(L.at("amplitude")), in_radius));
    in_radius = layers.back().out_radius + s;
  }
  return layers;
}

Outcome compose_pipeline(const Json& p, std::uint64_t seed) {
  int base_dim = 0;
  const std::vector<LayerSpec> layers = sine_layers(p, base_dim);
  const double base_radius = as_double(p, "base_radius");
  ComposePlan plan = make_plan(layers, as_double(p, "margin"), as_double(p, "accuracy"), base_radius,
                               uniform_ball_sampler(base_dim, base_radius), as_int(p, "samples"));
  plan.activation = activation_from_string(p.at("activation").get<std::string>());
  plan.fit = p.at("fit").get<FitOptions>();

  const ComposeResult res = build_layered(plan, layers, seed);
  ComposePlan holdout_plan = plan;
  holdout_plan.samples = as_int(p, "holdout");
  const MatrixXd fresh = draw_base_samples(holdout_plan, derive_seed(seed, {0x686f6c64}));
  const MeasuredError held = measured_error(res.net, layers, plan, fresh);
  const WassersteinCertificate cert =
      wasserstein_certificate(res.net, layers, plan, fresh, as_int(p, "certificate_points"));

  const ErrorLedger& L = res.ledger;
  const int l = plan.depth();
  Outcome out;
  out.metrics["ledger"] = L;
  out.metrics["holdout"] = held;
  out.metrics["certificate"] = cert;
  out.metrics["node_counts"] = plan.node_counts;
  Table t{"compose", {"layer", "fit_rms", "excluded_frac", "excluded_bound"}, {}};
  for (int i = 0; i < l; ++i) {
    t.rows.push_back({double(i + 1), L.fit_rms[i], L.excluded_fraction[i], L.exclusion_bound[i]});
    out.check_le("compose.excluded_fraction_layer" + std::to_string(i + 1), L.excluded_fraction[i],
                 L.exclusion_bound[i] + L.exclusion_slack[i]);
  }
  out.check_le("compose.on_s_rms", L.on_s_rms, l * plan.accuracy);
  out.check_le("compose.unconditional_rms", L.unconditional_rms, L.main_bound);
  out.check_le("compose.holdout_unconditional_rms", held.unconditional_rms, held.bound);
  out.check_le("compose.exact_w2", cert.exact_w2, cert.subsample_coupling + 1e-12);
  out.check_le("compose.coupling_bound", cert.coupling_bound, cert.main_bound);
  out.check_le("compose.subsample_coupling", cert.subsample_coupling, cert.main_bound);
  out.tables.push_back(std::move(t));
  out.documents.emplace_back("plan.json", Json(plan).dump(2) + "\n");
  out.documents.emplace_back("ledger.json", Json(L).dump(2) + "\n");
  out.documents.emplace_back("net.json", Json(res.net).dump() + "\n");
  return out;
}

EmpiricalMeasure random_measure(int dim, int size, Rng& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0), W(0.05, 1.0);
  MatrixXd pts(dim, size);
  for (int i = 0; i < pts.size(); ++i) pts.data()[i] = U(rng);
  VectorXd w(size);
  for (int i = 0; i < size; ++i) w[i] = W(rng);
  return EmpiricalMeasure(std::move(pts), w / w.sum());
}

Outcome transport_suite(const Json& p, std::uint64_t seed) {
  const int instances = as_int(p, "instances");
  const int max_support = as_int(p, "max_support");
  const int dim = as_int(p, "dim");
  require(instances >= 1 && max_support >= 1 && dim >= 1, "transport-suite: sizes must be >= 1");
  const int tests = as_int(p, "lipschitz_tests");
  Rng rng(derive_seed(seed, {0x7472616e}));
  std::uniform_int_distribution<int> size(1, max_support);
  std::uniform_real_distribution<double> phase(0.0, 2 * std::numbers::pi);

  double worst_order = -std::numeric_limits<double>::infinity();
  double worst_lip = -std::numeric_limits<double>::infinity();
  double w1_sum = 0.0, w2_sum = 0.0;
  for (int i = 0; i < instances; ++i) {
    const EmpiricalMeasure mu = random_measure(dim, size(rng), rng);
    const EmpiricalMeasure nu = random_measure(dim, size(rng), rng);
    const double w1 = wasserstein_exact(mu, nu, 1).value;
    const double w2 = wasserstein_exact(mu, nu, 2).value;
    w1_sum += w1, w2_sum += w2;
    worst_order = std::max(worst_order, w1 - w2);
    for (int j = 0; j < tests; ++j) {
      // sin(<u,x> + c) with ‖u‖ = 1 is 1-Lipschitz; scaled by L.
      const VectorXd u = random_unit(dim, rng);
      const double c = phase(rng), L = 0.5 + j;
      const ScalarTest phi = [=](const VectorXd& x) { return L * std::sin(u.dot(x) + c); };
      double excess;
      try {
        const LipschitzCheck chk = lipschitz_discrepancy(phi, L, mu, nu);
        excess = chk.discrepancy - chk.bound;
      } catch (const AssertionFailure&) {
        excess = std::numeric_limits<double>::infinity();
      }
      worst_lip = std::max(worst_lip, excess);
    }
  }

  Outcome out;
  out.metrics["instances"] = instances;
  out.metrics["max_w1_minus_w2"] = encode_double(worst_order);
  out.metrics["max_discrepancy_minus_bound"] = encode_double(worst_lip);
  out.metrics["mean_w1"] = w1_sum / instances;
  out.metrics["mean_w2"] = w2_sum / instances;
  out.check_le("transport.w1_minus_w2", worst_order, 1e-12);
  out.check_le("transport.discrepancy_minus_bound", worst_lip, 1e-9);

  // Entropic values approach the exact distance as the regularization shrinks.
  const int m = as_int(p, "sinkhorn_points");
  require(m >= 1 && 2 * m <= kExactSupportBudget, "transport-suite: sinkhorn_points out of range");
  const EmpiricalMeasure a = random_measure(dim, m, rng), b = random_measure(dim, m, rng);
  Table curve{"sinkhorn", {"reg", "w_sinkhorn", "w_exact", "converged"}, {}};
  Json sink = Json::array();
  for (int q : {1, 2}) {
    const double exact = wasserstein_exact(a, b, q).value;
    for (double reg : p.at("regularizations").get<std::vector<double>>()) {
      require(reg > 0.0, "transport-suite: regularizations must be > 0");
      const SinkhornResult s = wasserstein_sinkhorn(a, b, q, reg, as_int(p, "sinkhorn_iterations"));
      if (q == 2) curve.rows.push_back({reg, s.value, exact, s.converged ? 1.0 : 0.0});
      sink.push_back({{"p", q}, {"reg", reg}, {"value", encode_double(s.value)},
                      {"exact", exact}, {"converged", s.converged},
                      {"iterations", s.iterations},
                      {"marginal_violation", encode_double(s.marginal_violation)}});
    }
  }
  out.metrics["sinkhorn"] = std::move(sink);
  out.tables.push_back(std::move(curve));
  return out;
}

Outcome separation_pipeline(const Json& p, std::uint64_t) {
  const auto ns = p.at("ns").get<std::vector<int>>();
  const auto c3s = p.at("c3").get<std::vector<double>>();
  require(!ns.empty() && !c3s.empty(), "separation: ns and c3 must be nonempty");
  const auto increasing = p.at("require_increasing").get<std::vector<int>>();
  for (int n : increasing) {
    require(std::find(ns.begin(), ns.end(), n) != ns.end(),
            "separation: require_increasing names an n not in ns");
  }
  const SeparationReport rep =
      separation_report(ns, c3s, as_double(p, "C1"), as_double(p, "C2"), as_double(p, "search_limit"));
  Outcome out;
  out.metrics["report"] = rep;
  Table t{"ratio", {"n", "C3", "ratio"}, {}};
  for (const SeparationRow& row : rep.rows) {
    t.rows.push_back({double(row.config.n), row.config.C3, row.ratio});
    out.check_le("separation.lower_minus_upper_n" + std::to_string(row.config.n) + "_C3_" +
                     format_double(row.config.C3),
                 row.lower_f - row.upper_f, 0.0);
  }
  for (int n : increasing) {
    const auto it = rep.increasing_in_c3.find(n);
    out.check_le("separation.increasing_in_c3_n" + std::to_string(n), it->second ? 0.0 : 1.0, 0.0);
  }
  out.tables.push_back(std::move(t));
  out.documents.emplace_back("sep.csv", separation_csv(rep));
  return out;
}

Outcome dispatch(const ExperimentConfig& c) {
  const Json& p = c.parameters;
  try {
    switch (c.tag) {
      case ExperimentTag::ft_check: return ft_check(p, c.seed);
      case ExperimentTag::barron_bounds: return barron_bounds(p, c.seed);
      case ExperimentTag::fit_scaling: return fit_scaling(p, c.seed);
      case ExperimentTag::compose: return compose_pipeline(p, c.seed);
      case ExperimentTag::transport_suite: return transport_suite(p, c.seed);
      case ExperimentTag::separation: return separation_pipeline(p, c.seed);
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(to_string(c.tag) + ": " + e.what());
  }
  throw SchemaError("unreachable tag");
}

Json checks_json(const std::vector<Check>& checks) {
  Json a = Json::array();
  for (const Check& c : checks) {
    a.push_back({{"metric", c.metric}, {"value", encode_double(c.value)},
                 {"limit", encode_double(c.limit)}, {"passed", c.passed}});
  }
  return a;
}

}  // namespace

RunRecord run(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out = dispatch(config);

  RunRecord rec;
  rec.config = config_json(config);
  rec.version = artifact_version();
  rec.metrics = std::move(out.metrics);
  rec.tables = std::move(out.tables);
  rec.checks = std::move(out.checks);

  const fs::path dir(config.output);
  fs::create_directories(dir);
  for (const auto& [name, content] : out.documents) rec.files.push_back(write_output(dir, name, content));
  for (ProducedFile& f : emit_plot_data(rec, dir)) rec.files.push_back(std::move(f));
  const Json metrics{{"config", rec.config},
                     {"version", rec.version},
                     {"metrics", rec.metrics},
                     {"checks", checks_json(rec.checks)}};
  rec.files.push_back(write_output(dir, "metrics.json", metrics.dump(2) + "\n"));

  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Json files = Json::array();
  for (const ProducedFile& f : rec.files) {
    files.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  }
  const Json manifest{{"config", rec.config},
                      {"version", rec.version},
                      {"wall_time", rec.wall_time},
                      {"files", std::move(files)},
                      {"checks", checks_json(rec.checks)}};
  write_output(dir, "record.json", manifest.dump(2) + "\n");

  if (const Check* bad = rec.first_failure()) {
    throw AssertionFailure(bad->metric, "assertion failed: " + bad->metric + " = " +
                                            format_double(bad->value) + " exceeds " +
                                            format_double(bad->limit));
  }
  return rec;
}

}  // namespace barronlab
