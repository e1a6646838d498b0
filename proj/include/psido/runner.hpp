#ifndef PSIDO_RUNNER_HPP
#define PSIDO_RUNNER_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "psido/config.hpp"

namespace psido {

inline constexpr const char* kArtifactVersion = "0.1.0";
/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "PSIDO_OUT_DIR";
inline constexpr const char* kDefaultOutDir = "psido-out";

enum ExitCode { kExitPass = 0, kExitAssertion = 1, kExitConfig = 2, kExitRuntime = 3 };

/// Cells are preformatted; numbers use 17 significant digits.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Verdict {
  std::string name;
  std::string metric;
  std::string op;
  double lhs = 0.0;
  double rhs = 0.0;
  bool passed = false;
};

struct RunManifest {
  std::string kind;
  nlohmann::json config;
  std::string config_hash;
  std::uint64_t seed = 0;
  double seconds = 0.0;
  std::vector<std::string> outputs;
  std::size_t rows = 0;
  std::map<std::string, double> metrics;
  std::vector<Verdict> verdicts;
  std::vector<std::string> notes;
  std::optional<std::string> error;

  bool all_passed() const;
  int exit_code() const;
  nlohmann::json to_json() const;
};

struct RunResult {
  Table table;
  RunManifest manifest;
};

std::string format_number(double v);
/// 64-bit FNV-1a of the normalized config, as 16 hex digits.
std::string config_hash(const nlohmann::json& echo);

/// Runs one experiment. Module errors are captured into the manifest.
RunResult run_experiment(const ExperimentConfig& cfg);

/// Writes <kind>-<hash>.csv and <kind>-<hash>.manifest.json into dir and
/// records them in the manifest. Throws std::runtime_error with the path
/// on I/O failure.
void emit_report(RunResult& result, const std::string& dir);
std::string render_csv(const Table& table);

/// --out, then the config's output_dir, then $PSIDO_OUT_DIR, then psido-out.
std::string resolve_output_dir(const std::string& cli_out, const ExperimentConfig& cfg);

}  // namespace psido

#endif  // PSIDO_RUNNER_HPP
