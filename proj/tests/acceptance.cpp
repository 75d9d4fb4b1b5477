// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "barronlab/harness.hpp"
#include "barronlab/separation.hpp"
#include "barronlab/special.hpp"
#include "barronlab/transport.hpp"
#include "oracles.hpp"

using namespace barronlab;
namespace fs = std::filesystem;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

const fs::path kOut = "acceptance_out";

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Outcome {
  std::optional<RunRecord> record;
  std::string failure;  // empty on success
};

Outcome run_tag(const std::string& tag, const Json& params, std::uint64_t seed, const fs::path& dir) {
  fs::remove_all(dir);
  Outcome o;
  try {
    o.record = run(parse_config(
        {{"experiment", tag}, {"seed", seed}, {"parameters", params}, {"output", dir.string()}}));
  } catch (const AssertionFailure& e) {
    o.failure = e.what();
  } catch (const std::exception& e) {
    o.failure = std::string("error: ") + e.what();
  }
  return o;
}

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(4) << x;
  return s.str();
}

// ---------------------------------------------------------------------------

Verdict barron_error_law() {
  const Outcome o = run_tag("fit-scaling", Json::object(), 1, kOut / "fit");
  if (!o.failure.empty()) return {false, o.failure};
  const Json m = o.record->metrics;
  double ratio = 0.0;
  for (const auto& f : m["fits"]) {
    const double r = f["report"]["mse"].get<double>() / f["report"]["target_bound"].get<double>();
    ratio = std::max(ratio, r);
  }
  return {true, "C=" + fmt(m["barron_constant"]["value"].get<double>()) + " max mse/bound=" + fmt(ratio) +
                    " slope=" + fmt(m["loglog_slope"].get<double>())};
}

// J_{d/2}(x) by its power series in 330-digit binary floating point; the
// terms reach e^x before cancelling, so double precision cannot be used.
double bessel_series_exact(int d, double x) {
  using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<330>>;
  const Big order = Big(d) / 2;
  const Big half = Big(x) / 2;
  Big term = boost::multiprecision::pow(half, order) / boost::multiprecision::tgamma(order + 1);
  Big sum = term;
  const Big q = half * half;
  for (int m = 1;; ++m) {
    term *= -q / (m * (m + order));
    sum += term;
    if (m > x && boost::multiprecision::abs(term) < Big(1e-40)) break;
  }
  return static_cast<double>(sum);
}

Verdict krasikov_certification() {
  Rng rng(derive_seed(2, {0x6b72}));
  int violations = 0;
  double worst = 0.0;
  for (int d = 2; d <= 12; ++d) {
    std::uniform_real_distribution<double> U(d, 50.0 * d);
    for (int i = 0; i < 50; ++i) {
      const double x = U(rng);
      const double gap = std::abs(bessel_series_exact(d, x) - krasikov_bessel(d, x).value);
      const double bound = std::pow(x, -1.5);
      worst = std::max(worst, gap / bound);
      if (gap > bound) ++violations;
    }
  }
  return {violations == 0, std::to_string(violations) + " violations in 550, max gap/bound=" + fmt(worst)};
}

Verdict laplacian_recursion() {
  int failures = 0;
  for (int k = 0; k <= 5; ++k) {
    const LaplacianCoeffs c = radial_laplacian_coeffs(k);
    Rational cap = 1;
    for (int t = 0; t < k; ++t) cap *= 5;
    for (int n = 1; n <= 64; ++n) {
      if (c.valid_for(n) && c.abs_sum(n) > cap) ++failures;
    }
  }
  // (I - Δ) f = f - f'' - (n-1)/r f' for radial f.
  const LaplacianCoeffs k1 = radial_laplacian_coeffs(1);
  bool symbolic = k1.terms.size() == 3;
  for (std::int64_t n = 1; n <= 64 && symbolic; ++n) {
    symbolic = k1.coefficient(0, 0, n) == Rational(1) && k1.coefficient(2, 0, n) == Rational(-1) &&
               k1.coefficient(1, 1, n) == Rational(-(n - 1), n);
  }
  return {failures == 0 && symbolic,
          std::to_string(failures) + " tables above 5^k; k=1 " + (symbolic ? "matches" : "differs")};
}

Verdict fourier_agreement() {
  const Outcome o = run_tag("ft-check", Json::object(), 4, kOut / "ft");
  if (!o.failure.empty()) return {false, o.failure};
  return {true, "max relative error " + fmt(o.record->metrics["max_rel_error"].get<double>()) +
                    " over 20 radii"};
}

Verdict transport_correctness() {
  Rng rng(derive_seed(5, {0x6f74}));
  std::uniform_real_distribution<double> U(-1.0, 1.0), W(0.05, 1.0);
  const auto measure = [&](int size) {
    MatrixXd pts(2, size);
    for (int i = 0; i < pts.size(); ++i) pts.data()[i] = U(rng);
    VectorXd w(size);
    for (int i = 0; i < size; ++i) w[i] = W(rng);
    return EmpiricalMeasure(pts, w / w.sum());
  };
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int a = 1 + i % 3, b = 1 + (i / 3) % 3, p = 1 + i % 2;
    const EmpiricalMeasure mu = measure(a), nu = measure(b);
    const double exact = wasserstein_exact(mu, nu, p).cost;
    const double brute = oracle::transport_brute_force(mu.weights, nu.weights, cost_matrix(mu, nu, p));
    worst = std::max(worst, std::abs(exact - brute));
  }
  const bool brute_ok = worst <= 1e-9;
  const Outcome o = run_tag("transport-suite", Json::object(), 5, kOut / "transport");
  if (!o.failure.empty()) return {false, o.failure};
  const Json& m = o.record->metrics;
  return {brute_ok, "brute-force gap " + fmt(worst) + ", max W1-W2 " +
                        fmt(m["max_w1_minus_w2"].get<double>()) + ", max discrepancy-L*W1 " +
                        fmt(m["max_discrepancy_minus_bound"].get<double>())};
}

Verdict multilayer_construction() {
  const Outcome o = run_tag("compose", Json::object(), 6, kOut / "compose");
  if (!o.failure.empty()) return {false, o.failure};
  const Json& m = o.record->metrics;
  return {true, "on-S rms " + fmt(m["ledger"]["on_s_rms"].get<double>()) + " <= l*eps, W2 " +
                    fmt(m["certificate"]["exact_w2"].get<double>()) + " <= coupling " +
                    fmt(m["certificate"]["subsample_coupling"].get<double>()) + ", bound " +
                    fmt(m["certificate"]["main_bound"].get<double>())};
}

Verdict sandwich_suite() {
  const Outcome o = run_tag("barron-bounds", Json::object(), 7, kOut / "bounds");
  if (!o.failure.empty()) return {false, o.failure};
  double worst = 0.0;
  for (const auto& [key, v] : o.record->metrics["stability"].items()) worst = std::max(worst, v.get<double>());
  return {true, "gaussian, ridge and radial f sandwiched; max refinement change " + fmt(worst)};
}

Verdict separation_trend() {
  const Outcome o = run_tag("separation", Json::object(), 8, kOut / "separation");
  if (!o.failure.empty()) return {false, o.failure};
  const Json& rep = o.record->metrics["report"];
  std::string detail = "n=3 ratios";
  for (const auto& row : rep["rows"]) {
    if (row["config"]["n"] == 3) detail += " " + fmt(decode_double(row["ratio"]));
  }
  detail += "; smallest C3 with ratio > 1:";
  bool all_n = true;
  for (int n : {3, 7, 11}) {
    bool found = false;
    for (const auto& e : rep["per_n"]) {
      if (e["n"] != n) continue;
      found = true;
      detail += " n=" + std::to_string(n) + ":" +
                (e["smallest_c3_above_one"].is_null() ? "none" : fmt(decode_double(e["smallest_c3_above_one"])));
    }
    all_n = all_n && found;
  }
  return {all_n, detail};
}

Verdict determinism() {
  const std::vector<std::pair<std::string, Json>> runs{
      {"ft-check", Json::object()},
      {"transport-suite", Json::object()},
      {"fit-scaling", Json::object()},
      {"barron-bounds", Json::object()},
      {"compose", {{"samples", 2000}, {"holdout", 2000}}},
      {"separation", {{"ns", {3}}, {"c3", {4.0}}, {"search_limit", 4.0}}}};
  int compared = 0;
  for (const auto& [tag, params] : runs) {
    const Outcome a = run_tag(tag, params, 9, kOut / "repeat_a" / tag);
    const Outcome b = run_tag(tag, params, 9, kOut / "repeat_b" / tag);
    if (!a.failure.empty() || !b.failure.empty()) return {false, tag + ": " + a.failure + b.failure};
    if (a.record->files.size() != b.record->files.size()) return {false, tag + ": file lists differ"};
    for (std::size_t i = 0; i < a.record->files.size(); ++i) {
      const auto& fa = a.record->files[i];
      const auto& fb = b.record->files[i];
      if (fa.name != fb.name || fa.sha256 != fb.sha256) return {false, tag + ": " + fa.name + " differs"};
      ++compared;
    }
  }
  return {true, std::to_string(compared) + " output files byte-identical across repeated runs"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    double limit_seconds;  // 0: none
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "Barron error law", 300, barron_error_law},
      {2, "Krasikov certification", 30, krasikov_certification},
      {3, "Laplacian recursion", 1, laplacian_recursion},
      {4, "radial/grid Fourier agreement", 120, fourier_agreement},
      {5, "transport correctness", 60, transport_correctness},
      {6, "multi-layer construction", 600, multilayer_construction},
      {7, "sandwich suite", 300, sandwich_suite},
      {8, "separation trend", 900, separation_trend},
      {9, "determinism", 0, determinism},
  };
  fs::create_directories(kOut);
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_seconds > 0 && secs > c.limit_seconds) {
      v.pass = false;
      v.detail += "; over the " + fmt(c.limit_seconds) + " s limit";
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << v.detail << " ("
              << std::fixed << std::setprecision(1) << secs << " s)" << std::defaultfloat << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
