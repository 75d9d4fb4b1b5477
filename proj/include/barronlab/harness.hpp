#pragma once

// Seeded experiment runners behind the command-line tool. A run reads one
// JSON config, writes JSON/CSV outputs into a directory and returns a record
// listing them with content hashes.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "barronlab/serialize.hpp"

namespace barronlab {

enum class ExperimentTag { ft_check, barron_bounds, fit_scaling, compose, transport_suite, separation };

std::string to_string(ExperimentTag t);
/// Throws SchemaError on an unknown tag.
ExperimentTag tag_from_string(const std::string& s);

struct ExperimentConfig {
  ExperimentTag tag = ExperimentTag::ft_check;
  Json parameters = Json::object();  // defaults filled in by parse_config
  std::uint64_t seed = 0;
  std::string output = "out";
};

/// {"experiment", "seed", "parameters"?, "output"?}. Unknown keys, missing
/// seed, an unknown tag or parameters of the wrong type throw SchemaError.
ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Config echo with the tag as a string.
Json config_json(const ExperimentConfig& c);

/// Default parameters of a tag.
Json default_parameters(ExperimentTag tag);

struct ProducedFile {
  std::string name;    // relative to the output directory
  std::string sha256;  // lowercase hex
  std::uintmax_t bytes = 0;
};

/// Numeric table emitted as CSV; doubles in shortest round-trip form.
struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// One pass/fail comparison value ≤ limit.
struct Check {
  std::string metric;
  double value = 0.0;
  double limit = 0.0;
  bool passed = true;
};

struct RunRecord {
  Json config;                 // echo with resolved parameters
  std::string version;
  double wall_time = 0.0;      // seconds; kept out of metrics.json
  std::vector<ProducedFile> files;
  Json metrics = Json::object();
  std::vector<Table> tables;
  std::vector<Check> checks;

  /// First failed check, or nullptr.
  const Check* first_failure() const;
};

std::string artifact_version();

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

std::string table_csv(const Table& t);

/// Runs the pipeline and writes into config.output: metrics.json (a pure
/// function of config, seed and version), per-tag documents, one CSV per
/// table and record.json (the manifest, including wall time). Throws
/// AssertionFailure naming the first failed metric after everything is
/// written.
RunRecord run(const ExperimentConfig& config);

/// One CSV per table with at least one row. An empty record writes nothing.
std::vector<ProducedFile> emit_plot_data(const RunRecord& record, const std::filesystem::path& dir);

/// Writes `content` and returns its manifest entry.
ProducedFile write_output(const std::filesystem::path& dir, const std::string& name,
                          const std::string& content);

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitAssertion = 3;

}  // namespace barronlab
