#include "barronlab/serialize.hpp"

#include <cmath>
#include <limits>

namespace barronlab {

Json encode_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double decode_double(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw SchemaError("not a number: \"" + s + "\"");
  }
  if (!j.is_number()) throw SchemaError("expected a number, got " + j.dump());
  return j.get<double>();
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(encode_double(v[i]));
  return a;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  if (!j.is_array()) throw SchemaError("expected an array, got " + j.dump());
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = decode_double(j[i]);
  return v;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vector_to_json(m.row(r).transpose()));
  return a;
}

Eigen::MatrixXd matrix_from_json(const Json& j, Eigen::Index rows_if_empty) {
  if (!j.is_array()) throw SchemaError("expected an array of rows");
  if (j.empty()) return Eigen::MatrixXd(rows_if_empty, 0);
  const Eigen::Index cols = j[0].size();
  Eigen::MatrixXd m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Eigen::VectorXd row = vector_from_json(j[r]);
    if (row.size() != cols) throw SchemaError("ragged matrix");
    m.row(r) = row.transpose();
  }
  return m;
}

std::string to_string(SetKind k) {
  switch (k) {
    case SetKind::ball: return "ball";
    case SetKind::box: return "box";
    case SetKind::polytope: return "polytope";
  }
  return "?";
}

SetKind set_kind_from_string(const std::string& s) {
  if (s == "ball") return SetKind::ball;
  if (s == "box") return SetKind::box;
  if (s == "polytope") return SetKind::polytope;
  throw SchemaError("unknown set kind \"" + s + "\"");
}

Direction direction_from_string(const std::string& s) {
  if (s == "upper") return Direction::upper;
  if (s == "lower") return Direction::lower;
  throw SchemaError("unknown direction \"" + s + "\"");
}

namespace {

Json doubles_to_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(encode_double(x));
  return a;
}

std::vector<double> doubles_from_json(const Json& j) {
  if (!j.is_array()) throw SchemaError("expected an array");
  std::vector<double> v;
  for (const auto& x : j) v.push_back(decode_double(x));
  return v;
}

double num(const Json& j, const char* key) { return decode_double(j.at(key)); }

}  // namespace

void to_json(Json& j, const BarronEstimate& e) {
  j = Json{{"direction", to_string(e.direction)},
           {"value", encode_double(e.value)},
           {"set", e.set},
           {"method", e.method},
           {"resolution", e.resolution},
           {"cutoff", encode_double(e.cutoff)},
           {"freq_resolution", e.freq_resolution},
           {"tail_estimate", encode_double(e.tail_estimate)},
           {"warning", e.warning}};
}

void from_json(const Json& j, BarronEstimate& e) {
  e.direction = direction_from_string(j.at("direction").get<std::string>());
  e.value = num(j, "value");
  e.set = j.at("set").get<BoundedSetd>();
  e.method = j.at("method").get<std::string>();
  e.resolution = j.at("resolution").get<int>();
  e.cutoff = num(j, "cutoff");
  e.freq_resolution = j.at("freq_resolution").get<int>();
  e.tail_estimate = num(j, "tail_estimate");
  e.warning = j.at("warning").get<std::string>();
}

void to_json(Json& j, const GammaPair& g) {
  j = Json{{"a", encode_double(g.a)}, {"c", encode_double(g.c)}};
}

void from_json(const Json& j, GammaPair& g) {
  g.a = num(j, "a");
  g.c = num(j, "c");
}

void to_json(Json& j, const TwoLayerNet& net) {
  j = Json{{"input_dim", net.input_dim},
           {"activation", to_string(net.activation)},
           {"budget", encode_double(net.budget)},
           {"c0", encode_double(net.c0)},
           {"a", matrix_to_json(net.a)},
           {"b", vector_to_json(net.b)},
           {"c", vector_to_json(net.c)}};
}

void from_json(const Json& j, TwoLayerNet& net) {
  net.input_dim = j.at("input_dim").get<int>();
  net.activation = activation_from_string(j.at("activation").get<std::string>());
  net.budget = num(j, "budget");
  net.c0 = num(j, "c0");
  net.a = matrix_from_json(j.at("a"), net.input_dim);
  net.b = vector_from_json(j.at("b"));
  net.c = vector_from_json(j.at("c"));
  net.validate();
}

void to_json(Json& j, const FitReport& r) {
  j = Json{{"mse", encode_double(r.mse)},
           {"budget_used", encode_double(r.budget_used)},
           {"budget", encode_double(r.budget)},
           {"nodes", r.nodes},
           {"iterations", r.iterations},
           {"seed", r.seed},
           {"target_bound", encode_double(r.target_bound)},
           {"overfit_warning", r.overfit_warning},
           {"mse_path", doubles_to_json(r.mse_path)}};
}

void from_json(const Json& j, FitReport& r) {
  r.mse = num(j, "mse");
  r.budget_used = num(j, "budget_used");
  r.budget = num(j, "budget");
  r.nodes = j.at("nodes").get<int>();
  r.iterations = j.at("iterations").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.target_bound = num(j, "target_bound");
  r.overfit_warning = j.at("overfit_warning").get<bool>();
  r.mse_path = doubles_from_json(j.at("mse_path"));
}

void to_json(Json& j, const FitOptions& o) {
  j = Json{{"restarts", o.restarts},
           {"refined_candidates", o.refined_candidates},
           {"refine_iterations", o.refine_iterations},
           {"coefficient_iterations", o.coefficient_iterations}};
}

void from_json(const Json& j, FitOptions& o) {
  // Missing keys keep their defaults so configs can override a subset.
  const FitOptions d;
  o.restarts = j.value("restarts", d.restarts);
  o.refined_candidates = j.value("refined_candidates", d.refined_candidates);
  o.refine_iterations = j.value("refine_iterations", d.refine_iterations);
  o.coefficient_iterations = j.value("coefficient_iterations", d.coefficient_iterations);
}

void to_json(Json& j, const EmpiricalMeasure& mu) {
  j = Json{{"dimension", mu.dimension()},
           {"weights", vector_to_json(mu.weights)},
           {"points", matrix_to_json(mu.points.transpose())}};
}

void from_json(const Json& j, EmpiricalMeasure& mu) {
  const int n = j.at("dimension").get<int>();
  Eigen::MatrixXd pts = matrix_from_json(j.at("points")).transpose();
  if (pts.cols() == 0) pts.resize(n, 0);
  if (pts.rows() != n) throw SchemaError("EmpiricalMeasure: point dimension");
  mu = EmpiricalMeasure(std::move(pts), vector_from_json(j.at("weights")));
}

void to_json(Json& j, const DenseLayer& d) {
  j = Json{{"weight", matrix_to_json(d.weight)}, {"bias", vector_to_json(d.bias)}};
}

void from_json(const Json& j, DenseLayer& d) {
  d.weight = matrix_from_json(j.at("weight"));
  d.bias = vector_from_json(j.at("bias"));
}

void to_json(Json& j, const LayeredNet& net) {
  Json blocks = Json::array();
  for (const auto& block : net.blocks) blocks.push_back(block);
  j = Json{{"input_dim", net.input_dim},
           {"activation", to_string(net.activation)},
           {"blocks", std::move(blocks)},
           {"shift", vector_to_json(net.shift)}};
}

void from_json(const Json& j, LayeredNet& net) {
  auto blocks = j.at("blocks").get<std::vector<std::vector<TwoLayerNet>>>();
  net = collapse(std::move(blocks), j.at("input_dim").get<int>(),
                 activation_from_string(j.at("activation").get<std::string>()));
  const Eigen::VectorXd shift = vector_from_json(j.at("shift"));
  if (shift.size() != net.output_dim()) throw SchemaError("LayeredNet: shift dimension");
  net.shift = shift;
}

void to_json(Json& j, const ErrorLedger& l) {
  j = Json{{"fit_rms", doubles_to_json(l.fit_rms)},
           {"survivors", l.survivors},
           {"excluded_fraction", doubles_to_json(l.excluded_fraction)},
           {"exclusion_bound", doubles_to_json(l.exclusion_bound)},
           {"exclusion_slack", doubles_to_json(l.exclusion_slack)},
           {"on_s_rms", encode_double(l.on_s_rms)},
           {"unconditional_rms", encode_double(l.unconditional_rms)},
           {"main_bound", encode_double(l.main_bound)},
           {"range_theory", encode_double(l.range_theory)},
           {"range_measured", encode_double(l.range_measured)},
           {"shift_norm", encode_double(l.shift_norm)},
           {"barron_sources", l.barron_sources},
           {"seed", l.seed}};
}

void from_json(const Json& j, ErrorLedger& l) {
  l.fit_rms = doubles_from_json(j.at("fit_rms"));
  l.survivors = j.at("survivors").get<std::vector<int>>();
  l.excluded_fraction = doubles_from_json(j.at("excluded_fraction"));
  l.exclusion_bound = doubles_from_json(j.at("exclusion_bound"));
  l.exclusion_slack = doubles_from_json(j.at("exclusion_slack"));
  l.on_s_rms = num(j, "on_s_rms");
  l.unconditional_rms = num(j, "unconditional_rms");
  l.main_bound = num(j, "main_bound");
  l.range_theory = num(j, "range_theory");
  l.range_measured = num(j, "range_measured");
  l.shift_norm = num(j, "shift_norm");
  l.barron_sources = j.at("barron_sources").get<std::vector<std::string>>();
  l.seed = j.at("seed").get<std::uint64_t>();
}

void to_json(Json& j, const ComposePlan& p) {
  j = Json{{"margin", encode_double(p.margin)},
           {"accuracy", encode_double(p.accuracy)},
           {"base_radius", encode_double(p.base_radius)},
           {"base_dim", p.base_dim},
           {"samples", p.samples},
           {"activation", to_string(p.activation)},
           {"fit", p.fit},
           {"node_counts", p.node_counts},
           {"out_dims", p.out_dims},
           {"barron", doubles_to_json(p.barron)},
           {"diameter", encode_double(p.diameter)}};
}

void from_json(const Json& j, ComposePlan& p) {
  p.margin = num(j, "margin");
  p.accuracy = num(j, "accuracy");
  p.base_radius = num(j, "base_radius");
  p.base_dim = j.at("base_dim").get<int>();
  p.samples = j.at("samples").get<int>();
  p.activation = activation_from_string(j.at("activation").get<std::string>());
  p.fit = j.at("fit").get<FitOptions>();
  p.node_counts = j.at("node_counts").get<std::vector<int>>();
  p.out_dims = j.at("out_dims").get<std::vector<int>>();
  p.barron = doubles_from_json(j.at("barron"));
  p.diameter = num(j, "diameter");
  p.sampler = uniform_ball_sampler(p.base_dim, p.base_radius);
  p.validate();
}

void to_json(Json& j, const MeasuredError& m) {
  j = Json{{"on_s_rms", encode_double(m.on_s_rms)},
           {"unconditional_rms", encode_double(m.unconditional_rms)},
           {"excluded_fraction", encode_double(m.excluded_fraction)},
           {"bound", encode_double(m.bound)}};
}

void from_json(const Json& j, MeasuredError& m) {
  m.on_s_rms = num(j, "on_s_rms");
  m.unconditional_rms = num(j, "unconditional_rms");
  m.excluded_fraction = num(j, "excluded_fraction");
  m.bound = num(j, "bound");
}

void to_json(Json& j, const WassersteinCertificate& w) {
  j = Json{{"coupling_bound", encode_double(w.coupling_bound)},
           {"subsample_coupling", encode_double(w.subsample_coupling)},
           {"exact_w2", encode_double(w.exact_w2)},
           {"subsample", w.subsample},
           {"main_bound", encode_double(w.main_bound)}};
}

void from_json(const Json& j, WassersteinCertificate& w) {
  w.coupling_bound = num(j, "coupling_bound");
  w.subsample_coupling = num(j, "subsample_coupling");
  w.exact_w2 = num(j, "exact_w2");
  w.subsample = j.at("subsample").get<int>();
  w.main_bound = num(j, "main_bound");
}

void to_json(Json& j, const SeparationConfig& c) {
  j = Json{{"n", c.n},
           {"C1", encode_double(c.C1)},
           {"C2", encode_double(c.C2)},
           {"C3", encode_double(c.C3)},
           {"smoothness", c.smoothness},
           {"K1", encode_double(c.K1)},
           {"K2", encode_double(c.K2)},
           {"K3", encode_double(c.K3)},
           {"eps", encode_double(c.eps)}};
}

void from_json(const Json& j, SeparationConfig& c) {
  c.n = j.at("n").get<int>();
  c.C1 = num(j, "C1");
  c.C2 = num(j, "C2");
  c.C3 = num(j, "C3");
  c.smoothness = j.at("smoothness").get<int>();
  c.K1 = num(j, "K1");
  c.K2 = num(j, "K2");
  c.K3 = num(j, "K3");
  c.eps = num(j, "eps");
}

void to_json(Json& j, const SeparationRow& r) {
  j = Json{{"config", r.config},
           {"lower_f", encode_double(r.lower_f)},
           {"upper_sq", encode_double(r.upper_sq)},
           {"upper_1d", encode_double(r.upper_1d)},
           {"ratio", encode_double(r.ratio)},
           {"upper_f", encode_double(r.upper_f)},
           {"g_bound", encode_double(r.g_bound)},
           {"shell_lower", encode_double(r.shell_lower)},
           {"shell_upper", encode_double(r.shell_upper)},
           {"shell_mass", encode_double(r.shell_mass)},
           {"theory_lower_pow2", encode_double(r.theory_lower_pow2)},
           {"theory_lower_pow5", encode_double(r.theory_lower_pow5)},
           {"theory_sq", encode_double(r.theory_sq)},
           {"theory_1d", encode_double(r.theory_1d)}};
}

void from_json(const Json& j, SeparationRow& r) {
  r.config = j.at("config").get<SeparationConfig>();
  r.lower_f = num(j, "lower_f");
  r.upper_sq = num(j, "upper_sq");
  r.upper_1d = num(j, "upper_1d");
  r.ratio = num(j, "ratio");
  r.upper_f = num(j, "upper_f");
  r.g_bound = num(j, "g_bound");
  r.shell_lower = num(j, "shell_lower");
  r.shell_upper = num(j, "shell_upper");
  r.shell_mass = num(j, "shell_mass");
  r.theory_lower_pow2 = num(j, "theory_lower_pow2");
  r.theory_lower_pow5 = num(j, "theory_lower_pow5");
  r.theory_sq = num(j, "theory_sq");
  r.theory_1d = num(j, "theory_1d");
}

void to_json(Json& j, const SeparationReport& r) {
  Json per_n = Json::array();
  for (const auto& [n, inc] : r.increasing_in_c3) {
    Json e{{"n", n}, {"increasing_in_c3", inc}, {"smallest_c3_above_one", nullptr}};
    const auto it = r.smallest_c3_above_one.find(n);
    if (it != r.smallest_c3_above_one.end() && it->second) {
      e["smallest_c3_above_one"] = encode_double(*it->second);
    }
    per_n.push_back(std::move(e));
  }
  j = Json{{"rows", r.rows}, {"per_n", std::move(per_n)},
           {"search_limit", encode_double(r.search_limit)}};
}

void from_json(const Json& j, SeparationReport& r) {
  r.rows = j.at("rows").get<std::vector<SeparationRow>>();
  r.increasing_in_c3.clear();
  r.smallest_c3_above_one.clear();
  for (const auto& e : j.at("per_n")) {
    const int n = e.at("n").get<int>();
    r.increasing_in_c3[n] = e.at("increasing_in_c3").get<bool>();
    const auto& s = e.at("smallest_c3_above_one");
    r.smallest_c3_above_one[n] = s.is_null() ? std::nullopt : std::optional<double>(decode_double(s));
  }
  r.search_limit = num(j, "search_limit");
}

}  // namespace barronlab

namespace nlohmann {

using barronlab::decode_double;
using barronlab::encode_double;
using barronlab::matrix_from_json;
using barronlab::matrix_to_json;
using barronlab::vector_from_json;
using barronlab::vector_to_json;

void adl_serializer<barronlab::BoundedSetd>::to_json(json& j, const barronlab::BoundedSetd& b) {
  j = json{{"kind", barronlab::to_string(b.kind())}, {"dimension", b.dimension()}};
  switch (b.kind()) {
    case barronlab::SetKind::ball: j["radius"] = encode_double(b.radius()); break;
    case barronlab::SetKind::box: j["half_width"] = vector_to_json(b.half_width()); break;
    case barronlab::SetKind::polytope: j["vertices"] = matrix_to_json(b.vertices()); break;
  }
}

barronlab::BoundedSetd adl_serializer<barronlab::BoundedSetd>::from_json(const json& j) {
  switch (barronlab::set_kind_from_string(j.at("kind").get<std::string>())) {
    case barronlab::SetKind::ball:
      return barronlab::BoundedSetd::ball(j.at("dimension").get<int>(), decode_double(j.at("radius")));
    case barronlab::SetKind::box:
      return barronlab::BoundedSetd::box(vector_from_json(j.at("half_width")));
    case barronlab::SetKind::polytope:
      return barronlab::BoundedSetd::polytope(matrix_from_json(j.at("vertices")));
  }
  throw barronlab::SchemaError("BoundedSet: unreachable kind");
}

void adl_serializer<barronlab::GridFunctiond>::to_json(json& j, const barronlab::GridFunctiond& f) {
  j = json{{"dimension", f.dimension()},
           {"center", vector_to_json(f.center())},
           {"half_width", vector_to_json(f.half_width())},
           {"resolution", f.resolution()},
           {"values", vector_to_json(f.values())}};
}

barronlab::GridFunctiond adl_serializer<barronlab::GridFunctiond>::from_json(const json& j) {
  barronlab::GridFunctiond f(vector_from_json(j.at("center")), vector_from_json(j.at("half_width")),
                             j.at("resolution").get<int>(), vector_from_json(j.at("values")));
  if (f.dimension() != j.at("dimension").get<int>()) {
    throw barronlab::SchemaError("GridFunction: dimension disagrees with center");
  }
  return f;
}

void adl_serializer<barronlab::SpectrumGridd>::to_json(json& j, const barronlab::SpectrumGridd& s) {
  json amps = json::array();
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    amps.push_back(json::array({encode_double(s.amplitudes()[k].real()),
                                encode_double(s.amplitudes()[k].imag())}));
  }
  j = json{{"dimension", s.dimension()},
           {"cutoff", encode_double(s.cutoff())},
           {"cell_volume", encode_double(s.cell_volume())},
           {"tail_estimate", encode_double(s.tail_estimate())},
           {"amplitudes", std::move(amps)}};
  if (s.is_tensor()) {
    j["axis"] = vector_to_json(s.axis());
  } else {
    j["nodes"] = matrix_to_json(s.nodes().transpose());
  }
}

barronlab::SpectrumGridd adl_serializer<barronlab::SpectrumGridd>::from_json(const json& j) {
  const auto& a = j.at("amplitudes");
  barronlab::SpectrumGridd::ComplexVector amps(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    amps[k] = {decode_double(a[k].at(0)), decode_double(a[k].at(1))};
  }
  const int n = j.at("dimension").get<int>();
  const double cutoff = decode_double(j.at("cutoff"));
  auto out = [&] {
    if (j.contains("axis")) {
      return barronlab::SpectrumGridd(n, cutoff, vector_from_json(j.at("axis")), std::move(amps));
    }
    Eigen::MatrixXd nodes = matrix_from_json(j.at("nodes")).transpose();
    if (nodes.cols() == 0) nodes.resize(n, 0);
    return barronlab::SpectrumGridd(std::move(nodes), std::move(amps),
                                    decode_double(j.at("cell_volume")), cutoff);
  }();
  out.set_tail_estimate(decode_double(j.at("tail_estimate")));
  return out;
}

}  // namespace nlohmann
