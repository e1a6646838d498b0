#ifndef PSIDO_CONFIG_HPP
#define PSIDO_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "psido/diagnostics.hpp"
#include "psido/grid.hpp"
#include "psido/symbol.hpp"

namespace psido {

inline const std::vector<std::string> kExperimentKinds = {
    "transpose-check", "compactness", "weak-compactness", "l2-condition", "commutator", "class-check", "t1-trace"};

/// Every validation problem found in a config, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// metric <op> value, or metric <op> factor·rhs_metric.
struct AssertionSpec {
  std::string name;
  std::string metric;
  std::string op;
  std::optional<double> value;
  std::string rhs_metric;
  double factor = 1.0;
};

struct ArmSpec {
  SweepArm arm = SweepArm::translate;
  double start = 1.0;
  double ratio = 2.0;
  int count = 4;
  double fixed_R = 1.0;
  Grid grid{1, 256, 1.0};
  std::vector<SchedulePoint> schedule;
};

struct BumpSpec {
  std::string profile1 = "standard";
  std::string profile2 = "standard";
  int M = 1;
  Point x1{};
  Point x2{};
};

struct DerivativeSpec {
  MultiIndex alpha;
  MultiIndex beta;
};

struct FdSpec {
  Point x{};
  Point xi{};
  double h = 1e-2;
};

struct PeetreSpec {
  int samples = 10000;
  double k_max = 10.0;
  double s_max = 5.0;
  double radius = 10.0;
};

struct ExperimentConfig {
  std::string kind;
  std::uint64_t seed = 0;
  Grid grid{1, 256, 1.0};
  int size_cap = kDefaultSizeCap;
  double support_radius = 0.0;
  std::string output_dir;
  int jobs = 0;
  /// Normalized config (defaults filled); hashed for output names.
  nlohmann::json echo;

  std::optional<Symbol> symbol;
  std::optional<Symbol> control_symbol;
  std::optional<Symbol> exact_transpose;

  // transpose-check
  std::vector<int> orders;
  double interior_radius = 0.0;
  double tie_tolerance = 1e-12;

  // compactness, commutator
  std::vector<int> k_list;
  std::vector<double> rank_epsilons;
  Function multiplier;  // a(x)
  double constant_a = 1.0;

  // weak-compactness, l2-condition
  std::vector<ArmSpec> arms;
  BumpSpec bumps;
  bool matrix_free = true;
  std::optional<double> symbol_x_support;

  // class-check
  std::vector<DerivativeSpec> derivatives;
  double class_order = 0.0;
  std::vector<double> shells;
  int samples_per_shell = 64;
  std::optional<FdSpec> fd;
  std::optional<PeetreSpec> peetre;

  // t1-trace
  Function expected_trace;
  std::vector<double> cmo_shells;

  std::vector<AssertionSpec> assertions;
};

/// Parses and fully validates a JSON config file. `kind` (may be empty)
/// is the experiment kind given on the command line.
ExperimentConfig parse_config(const std::string& path, const std::string& kind = "");
/// Reads the JSON document; ConfigError on I/O or syntax problems.
nlohmann::json read_config_document(const std::string& path);
ExperimentConfig parse_config_json(const nlohmann::json& doc, const std::string& kind = "");

/// Builders shared with the tests; throw ConfigError on bad specs.
Function build_function(const nlohmann::json& spec, int dim);
Symbol build_symbol(const nlohmann::json& spec, int dim);

}  // namespace psido

#endif  // PSIDO_CONFIG_HPP
