#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "psido/config.hpp"
#include "psido/parallel.hpp"
#include "psido/runner.hpp"

int main(int argc, char** argv) {
  using namespace psido;
  CLI::App app{"Pseudodifferential operator experiments"};
  app.set_version_flag("--version", kArtifactVersion);

  std::string kind;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int jobs = -1;
  std::string kinds;
  for (const auto& k : kExperimentKinds) kinds += (kinds.empty() ? "" : " | ") + k;
  app.add_option("experiment", kind, "Experiment kind: " + kinds)->required();
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out_dir, std::string("Output directory (default: config output_dir, $") + kOutDirEnv +
                                       ", or " + kDefaultOutDir + ")");
  auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--jobs", jobs, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  ExperimentConfig cfg;
  try {
    nlohmann::json doc = read_config_document(config_path);
    if (*seed_opt && doc.is_object()) doc["seed"] = seed;
    cfg = parse_config_json(doc, kind);
  } catch (const ConfigError& e) {
    std::cerr << "config error in " << config_path << ":\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << "\n";
    return kExitConfig;
  }
  set_default_jobs(jobs >= 0 ? jobs : cfg.jobs);

  RunResult result = run_experiment(cfg);
  const std::string dir = resolve_output_dir(out_dir, cfg);
  try {
    emit_report(result, dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }

  const RunManifest& man = result.manifest;
  std::cout << man.kind << " " << man.config_hash << " rows=" << man.rows << " time=" << format_number(man.seconds)
            << "s\n";
  for (const auto& note : man.notes) std::cout << "  note: " << note << "\n";
  for (const auto& v : man.verdicts)
    std::cout << "  " << (v.passed ? "PASS " : "FAIL ") << v.name << ": " << v.metric << " = "
              << format_number(v.lhs) << " " << v.op << " " << format_number(v.rhs) << "\n";
  if (man.error) std::cerr << "runtime error: " << *man.error << "\n";
  for (const auto& f : man.outputs) std::cout << "  wrote " << dir << "/" << f << "\n";
  return man.exit_code();
}
