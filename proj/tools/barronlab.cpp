// Command-line front end: `run` executes a JSON-configured experiment; the
// other subcommands are shortcuts for single modules.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "barronlab/harness.hpp"
#include "barronlab/separation.hpp"
#include "barronlab/transport.hpp"

using namespace barronlab;
namespace fs = std::filesystem;

namespace {

void print_summary(const RunRecord& rec) {
  std::cout << rec.config["experiment"].get<std::string>() << ": " << rec.checks.size()
            << " checks passed, " << rec.files.size() << " files in "
            << std::fixed << std::setprecision(1) << rec.wall_time << " s\n";
  for (const ProducedFile& f : rec.files) std::cout << "  " << f.name << "  " << f.sha256 << '\n';
}

// Parameters from an optional JSON file, then command-line overrides.
Json parameters_from(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path + " is not JSON: " + e.what());
  }
}

RunRecord run_tag(ExperimentTag tag, Json parameters, std::uint64_t seed, const std::string& out) {
  const Json cfg{{"experiment", to_string(tag)}, {"seed", seed},
                 {"parameters", std::move(parameters)}, {"output", out}};
  const RunRecord rec = run(parse_config(cfg));
  print_summary(rec);
  return rec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Barron-space numerics: Fourier bounds, network fits, composition, transport"};
  app.require_subcommand(1);
  app.set_version_flag("--version", artifact_version());

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;

  auto* run_cmd = app.add_subcommand("run", "Run an experiment from a JSON config");
  run_cmd->add_option("--config", config_path, "Config file")->required();
  run_cmd->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { seed = s, seed_given = true; },
                                              "Override the config seed");
  run_cmd->add_option("--out", out_dir, "Override the output directory");

  std::string params_path;
  auto* ft_cmd = app.add_subcommand("ft", "Radial against grid Fourier transform check");
  ft_cmd->add_option("--params", params_path, "JSON object of ft-check parameters");
  ft_cmd->add_option("--seed", seed);
  std::string ft_out = "out/ft", fit_out = "out/fit";
  ft_cmd->add_option("--out", ft_out);

  std::vector<int> ks;
  int samples = 0;
  auto* fit_cmd = app.add_subcommand("fit", "Error against node count for the Gaussian bump");
  fit_cmd->add_option("--params", params_path, "JSON object of fit-scaling parameters");
  fit_cmd->add_option("--ks", ks, "Node counts")->delimiter(',');
  fit_cmd->add_option("--samples", samples, "Sample count");
  fit_cmd->add_option("--seed", seed);
  fit_cmd->add_option("--out", fit_out);

  auto* compose_cmd = app.add_subcommand("compose", "Layer-wise approximation of a map chain");
  compose_cmd->require_subcommand(1);
  std::string plan_path, ledger_path;
  auto* compose_run = compose_cmd->add_subcommand("run", "Build, measure and certify");
  compose_run->add_option("--plan", plan_path, "JSON object of compose parameters");
  compose_run->add_option("--seed", seed);
  ledger_path = "out/compose/ledger.json";
  compose_run->add_option("--out", ledger_path, "Ledger path; other outputs go beside it");

  auto* transport_cmd = app.add_subcommand("transport", "Wasserstein distances of CSV measures");
  transport_cmd->require_subcommand(1);
  int p = 2;
  double reg = 0.01;
  std::string mu_path, nu_path;
  auto* w_cmd = transport_cmd->add_subcommand("w", "W_p between two measures");
  w_cmd->add_option("--p", p)->check(CLI::IsMember({1, 2}));
  w_cmd->add_option("--mu", mu_path)->required()->check(CLI::ExistingFile);
  w_cmd->add_option("--nu", nu_path)->required()->check(CLI::ExistingFile);
  w_cmd->add_option("--reg", reg, "Sinkhorn regularization beyond the exact solver's budget");

  auto* sep_cmd = app.add_subcommand("separation", "Barron-constant separation table");
  sep_cmd->require_subcommand(1);
  std::vector<int> ns{3, 7, 11};
  std::vector<double> c3s{4, 8, 16};
  double C1 = 1.0, C2 = 2.0, search_limit = 64.0;
  std::string sep_out = "sep.csv";
  auto* report_cmd = sep_cmd->add_subcommand("report", "One row per (n, C3)");
  report_cmd->add_option("--ns", ns)->delimiter(',');
  report_cmd->add_option("--c3", c3s)->delimiter(',');
  report_cmd->add_option("--C1", C1);
  report_cmd->add_option("--C2", C2);
  report_cmd->add_option("--search-limit", search_limit);
  report_cmd->add_option("--out", sep_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitSchema;
  }

  try {
    if (*run_cmd) {
      ExperimentConfig cfg = load_config(config_path);
      if (seed_given) cfg.seed = seed;
      if (!out_dir.empty()) cfg.output = out_dir;
      print_summary(run(cfg));
    } else if (*ft_cmd) {
      run_tag(ExperimentTag::ft_check, parameters_from(params_path), seed, ft_out);
    } else if (*fit_cmd) {
      Json params = parameters_from(params_path);
      if (!ks.empty()) params["ks"] = ks;
      if (samples > 0) params["samples"] = samples;
      run_tag(ExperimentTag::fit_scaling, std::move(params), seed, fit_out);
    } else if (*compose_run) {
      const fs::path ledger(ledger_path);
      const fs::path dir = ledger.has_parent_path() ? ledger.parent_path() : fs::path(".");
      run_tag(ExperimentTag::compose, parameters_from(plan_path), seed, dir.string());
      if (ledger.filename() != "ledger.json") fs::copy_file(dir / "ledger.json", ledger,
                                                           fs::copy_options::overwrite_existing);
    } else if (*w_cmd) {
      const EmpiricalMeasure mu = read_measure_csv(mu_path), nu = read_measure_csv(nu_path);
      Json out{{"p", p}};
      if (mu.size() + nu.size() <= kExactSupportBudget) {
        out["method"] = "exact";
        out["value"] = encode_double(wasserstein_exact(mu, nu, p).value);
      } else {
        const SinkhornResult s = wasserstein_sinkhorn(mu, nu, p, reg);
        std::cerr << "support exceeds the exact solver's budget; entropic approximation\n";
        out["method"] = "sinkhorn";
        out["regularization"] = reg;
        out["value"] = encode_double(s.value);
        out["converged"] = s.converged;
      }
      std::cout << out.dump() << '\n';
    } else if (*report_cmd) {
      const SeparationReport rep = separation_report(ns, c3s, C1, C2, search_limit);
      std::ofstream f(sep_out);
      f << separation_csv(rep);
      if (!f) throw std::runtime_error("cannot write " + sep_out);
      for (const auto& [n, c3] : rep.smallest_c3_above_one) {
        std::cout << "n=" << n << " smallest C3 with ratio > 1: "
                  << (c3 ? std::to_string(*c3) : std::string("none up to search limit")) << '\n';
      }
    }
  } catch (const AssertionFailure& e) {
    std::cerr << "FAILED [" << e.metric_name << "]: " << e.what() << '\n';
    return kExitAssertion;
  } catch (const SchemaError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitSchema;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitOk;
}
