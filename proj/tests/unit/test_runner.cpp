#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "psido/config.hpp"
#include "psido/runner.hpp"

using namespace psido;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("psido-runner-test-" + name);
  fs::remove_all(d);
  return d;
}

RunResult run(const json& doc) { return run_experiment(parse_config_json(doc)); }

json multiplier_transpose() {
  return json::parse(R"({
    "experiment": "transpose-check",
    "grid": {"n": 64, "L_over_pi": 4},
    "symbol": {"family": "separable", "m": {"kind": "constant", "value": 1}, "psi": "plateau"},
    "expansion": {"orders": [1, 2, 3]},
    "assertions": [{"name": "exact", "metric": "residual_full_N3", "op": "<=", "value": 1e-10}]
  })");
}

json weak_compactness(const json& arms) {
  json doc = json::parse(R"({
    "experiment": "weak-compactness",
    "grid": {"n": 256, "L": 8},
    "symbol": {"family": "constant", "value": 1}
  })");
  doc["sweep"] = {{"arms", arms}};
  return doc;
}
}  // namespace

TEST_CASE("number formatting keeps 17 significant digits") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  CHECK(std::stod(format_number(M_PI)) == M_PI);
}

TEST_CASE("multiplier transpose check passes") {
  const RunResult r = run(multiplier_transpose());
  CHECK(r.manifest.all_passed());
  CHECK(r.manifest.exit_code() == kExitPass);
  CHECK(r.table.columns == std::vector<std::string>{"N", "residual_interior", "residual_full"});
  CHECK(r.table.rows.size() == 3);
}

TEST_CASE("reruns are byte-identical") {
  const fs::path d1 = fresh_dir("rerun1"), d2 = fresh_dir("rerun2");
  RunResult a = run(multiplier_transpose());
  RunResult b = run(multiplier_transpose());
  emit_report(a, d1.string());
  emit_report(b, d2.string());
  REQUIRE(a.manifest.outputs == b.manifest.outputs);
  const std::string csv = a.manifest.outputs.front();
  CHECK(csv.find("transpose-check-") == 0);
  CHECK(slurp(d1 / csv) == slurp(d2 / csv));
  CHECK(!slurp(d1 / csv).empty());
  const json man = json::parse(slurp(d1 / a.manifest.outputs.back()));
  CHECK(man.at("experiment") == "transpose-check");
  CHECK(man.at("version") == kArtifactVersion);
  CHECK(man.contains("config_hash"));
}

TEST_CASE("distinct configs never overwrite each other") {
  const fs::path d = fresh_dir("distinct");
  json other = multiplier_transpose();
  other["seed"] = 5;
  RunResult a = run(multiplier_transpose());
  RunResult b = run(other);
  emit_report(a, d.string());
  emit_report(b, d.string());
  CHECK(a.manifest.config_hash != b.manifest.config_hash);
  std::set<std::string> files;
  for (const auto& e : fs::directory_iterator(d)) files.insert(e.path().filename().string());
  CHECK(files.size() == 4);
}

TEST_CASE("empty sweep writes a header-only table") {
  const fs::path d = fresh_dir("empty");
  RunResult r = run(weak_compactness(json::array()));
  CHECK(r.manifest.rows == 0);
  bool noted = false;
  for (const auto& n : r.manifest.notes) noted = noted || n.find("zero rows") != std::string::npos;
  CHECK(noted);
  emit_report(r, d.string());
  CHECK(slurp(d / r.manifest.outputs.front()) == "arm,x0_norm,R,statistic\n");
}

TEST_CASE("weak-compactness table columns") {
  const json arms = json::parse(R"([{"arm": "translate", "start": 0.5, "ratio": 2, "count": 3, "R": 1}])");
  const RunResult r = run(weak_compactness(arms));
  CHECK(r.table.columns == std::vector<std::string>{"arm", "x0_norm", "R", "statistic"});
  CHECK(r.table.rows.size() == 3);
  CHECK(r.table.rows[0][0] == "translate");
  CHECK(r.manifest.metrics.count("spread_all") == 1);
}

TEST_CASE("failed assertion exits with code 1") {
  json doc = multiplier_transpose();
  doc["assertions"][0]["value"] = -1.0;
  const RunResult r = run(doc);
  CHECK_FALSE(r.manifest.all_passed());
  CHECK(r.manifest.exit_code() == kExitAssertion);
}

TEST_CASE("module errors exit with code 3") {
  json doc = multiplier_transpose();
  doc["symbol"] = json::parse(R"({"family": "separable", "m": "gaussian", "psi": "gaussian"})");
  doc["expansion"] = {{"orders", {12}}};
  doc.erase("assertions");
  const RunResult r = run(doc);
  REQUIRE(r.manifest.error.has_value());
  CHECK(r.manifest.exit_code() == kExitRuntime);
  CHECK(r.manifest.to_json().at("status") != "pass");
}

TEST_CASE("identity compactness is flagged as a control") {
  const json doc = json::parse(R"({
    "experiment": "compactness",
    "grid": {"n": 64, "L_over_pi": 4},
    "symbol": {"family": "constant", "value": 1},
    "spectrum": {"k": [16]}
  })");
  const RunResult r = run(doc);
  CHECK(r.manifest.metrics.at("noncompact_control") == 1.0);
  bool noted = false;
  for (const auto& n : r.manifest.notes) noted = noted || n.find("non-compact control") != std::string::npos;
  CHECK(noted);
  CHECK(std::abs(r.manifest.metrics.at("tail_ratio_16") - 1.0) <= 1e-10);
}

TEST_CASE("output directory resolution") {
  ExperimentConfig cfg = parse_config_json(multiplier_transpose());
  CHECK(resolve_output_dir("cli", cfg) == "cli");
  cfg.output_dir = "from-config";
  CHECK(resolve_output_dir("", cfg) == "from-config");
}

TEST_CASE("csv rendering") {
  Table t{{"a", "b"}, {{"1", "2"}, {"3", "4"}}};
  CHECK(render_csv(t) == "a,b\n1,2\n3,4\n");
}
