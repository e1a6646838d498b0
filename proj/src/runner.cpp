#include "psido/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>

#include "psido/calculus.hpp"
#include "psido/diagnostics.hpp"
#include "psido/errors.hpp"
#include "psido/operators.hpp"
#include "psido/symbol_class.hpp"

namespace psido {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string config_hash(const json& echo) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : echo.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool RunManifest::all_passed() const {
  return !error && std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

int RunManifest::exit_code() const {
  if (error) return kExitRuntime;
  return all_passed() ? kExitPass : kExitAssertion;
}

json RunManifest::to_json() const {
  json j;
  j["artifact"] = "psido";
  j["version"] = kArtifactVersion;
  j["experiment"] = kind;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["config"] = config;
  j["timing"] = {{"seconds", seconds}};
  j["outputs"] = outputs;
  j["rows"] = rows;
  json m = json::object();
  for (const auto& [k, v] : metrics) m[k] = std::isfinite(v) ? json(v) : json(format_number(v));
  j["metrics"] = m;
  json vs = json::array();
  for (const auto& v : verdicts)
    vs.push_back({{"name", v.name},
                  {"metric", v.metric},
                  {"op", v.op},
                  {"lhs", std::isfinite(v.lhs) ? json(v.lhs) : json(format_number(v.lhs))},
                  {"rhs", std::isfinite(v.rhs) ? json(v.rhs) : json(format_number(v.rhs))},
                  {"verdict", v.passed ? "PASS" : "FAIL"}});
  j["verdicts"] = vs;
  j["notes"] = notes;
  j["status"] = error ? "error" : (all_passed() ? "pass" : "fail");
  if (error) j["error"] = *error;
  return j;
}

namespace {

using Metrics = std::map<std::string, double>;

double safe_ratio(double num, double den) {
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

std::string index_cell(const MultiIndex& a) { return a.to_string(); }

Eigen::MatrixXcd spectral_block(const OperatorMatrix& m, double interior_radius) {
  return interior_radius > 0.0 ? m.interior_block(interior_radius) : m.entries;
}

void run_transpose_check(const ExperimentConfig& cfg, Table& t, Metrics& m) {
  const Symbol& sym = *cfg.symbol;
  t.columns = {"N", "residual_interior", "residual_full"};
  std::vector<double> interior;
  for (int N : cfg.orders) {
    const TransposeResidual r = transpose_residual(sym, N, cfg.grid, cfg.interior_radius, cfg.size_cap);
    t.rows.push_back({std::to_string(N), format_number(r.interior), format_number(r.full)});
    m["residual_interior_N" + std::to_string(N)] = r.interior;
    m["residual_full_N" + std::to_string(N)] = r.full;
    interior.push_back(r.interior);
  }
  bool nonincreasing = true;
  for (std::size_t i = 1; i < interior.size(); ++i)
    if (interior[i] > interior[i - 1] + cfg.tie_tolerance) nonincreasing = false;
  m["nonincreasing"] = nonincreasing ? 1.0 : 0.0;
  m["final_over_initial"] = safe_ratio(interior.back(), interior.front());

  const OperatorMatrix id = assemble(symbols::constant(cfg.grid.dimension(), 1.0), cfg.grid, cfg.size_cap);
  const Eigen::MatrixXcd diff = id.entries - Eigen::MatrixXcd::Identity(cfg.grid.size(), cfg.grid.size());
  m["identity_floor"] = spectral_norm(diff);

  if (cfg.exact_transpose) {
    const TransposeResidual r =
        transpose_residual_against(sym, *cfg.exact_transpose, cfg.grid, cfg.interior_radius, cfg.size_cap);
    m["exact_residual_interior"] = r.interior;
    m["exact_residual_full"] = r.full;
  }
}

void spectrum_metrics(const SpectrumReport& rep, const std::vector<int>& k_list, const std::string& prefix,
                      Metrics& m) {
  for (int k : k_list) m[prefix + "tail_ratio_" + std::to_string(k)] = rep.tail_ratio(k);
}

void run_compactness(const ExperimentConfig& cfg, Table& t, Metrics& m, std::vector<std::string>& notes) {
  const OperatorMatrix op = assemble(*cfg.symbol, cfg.grid, cfg.size_cap);
  const SpectrumReport rep = svd_tail(spectral_block(op, cfg.interior_radius), cfg.k_list);
  t.columns = {"k", "singular_value"};
  for (std::size_t i = 0; i < rep.singular_values.size(); ++i)
    t.rows.push_back({std::to_string(i + 1), format_number(rep.singular_values[i])});
  spectrum_metrics(rep, cfg.k_list, "", m);
  for (double e : cfg.rank_epsilons) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", e);
    m[std::string("effective_rank_") + buf] = rep.effective_rank(e);
  }
  const int score_k = std::max<int>(1, static_cast<int>(rep.singular_values.size() / 4));
  const double score = rep.singular_values.empty() ? 0.0 : rep.tail_ratio(score_k);
  m["score"] = score;
  m["s1"] = rep.largest();
  const bool control = score >= 1.0 - 1e-12;
  m["noncompact_control"] = control ? 1.0 : 0.0;
  notes.push_back("compactness score tail_ratio(" + std::to_string(score_k) + ") = " + format_number(score));
  if (control) notes.push_back("non-compact control");
}

void sweep_metrics(const std::vector<ArmSpec>& arms, const std::vector<std::vector<SweepPoint>>& results,
                   const ExperimentConfig& cfg, Table& t, Metrics& m) {
  t.columns = {"arm", "x0_norm", "R", "statistic"};
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  double beyond_max = 0.0;
  int beyond_count = 0;
  const double offset = std::max(norm(cfg.bumps.x1), norm(cfg.bumps.x2));
  for (std::size_t a = 0; a < arms.size(); ++a) {
    const std::string name = to_string(arms[a].arm);
    std::vector<double> values;
    for (const auto& p : results[a]) {
      t.rows.push_back({name, format_number(norm(p.x0)), format_number(p.R), format_number(p.statistic)});
      values.push_back(p.statistic);
      lo = std::min(lo, p.statistic);
      hi = std::max(hi, p.statistic);
      if (cfg.symbol_x_support && norm(p.x0) - p.R > *cfg.symbol_x_support + offset) {
        beyond_max = std::max(beyond_max, p.statistic);
        ++beyond_count;
      }
    }
    const TrendCheck tc = trend_check(values);
    m["trend_" + name] = tc.passed ? 1.0 : 0.0;
    m["last_over_first_" + name] = tc.last_over_first;
    m["max_step_ratio_" + name] = tc.max_step_ratio;
    m["min_" + name] = *std::min_element(values.begin(), values.end());
    m["max_" + name] = *std::max_element(values.begin(), values.end());
  }
  if (t.rows.empty()) lo = hi = 0.0;
  m["spread_all"] = hi - lo;
  m["max_all"] = hi;
  m["min_all"] = lo;
  if (cfg.symbol_x_support) {
    m["max_beyond_support"] = beyond_max;
    m["points_beyond_support"] = beyond_count;
  }
}

GridOperator sweep_operator(const ExperimentConfig& cfg, const Grid& grid) {
  if (cfg.matrix_free) return GridOperator::from_symbol(*cfg.symbol, grid);
  return GridOperator(assemble(*cfg.symbol, grid, cfg.size_cap));
}

void run_sweeps(const ExperimentConfig& cfg, Table& t, Metrics& m, std::vector<std::string>& notes) {
  const int dim = cfg.grid.dimension();
  const BumpFunction phi1 = make_bump(cfg.bumps.M, cfg.bumps.profile1, dim);
  const BumpFunction phi2 = make_bump(cfg.bumps.M, cfg.bumps.profile2, dim);
  notes.push_back("bump normalization " + cfg.bumps.profile1 + " M=" + std::to_string(cfg.bumps.M) + ": " +
                  format_number(phi1.normalization));
  std::vector<std::vector<SweepPoint>> results;
  for (const auto& arm : cfg.arms) {
    const GridOperator op = sweep_operator(cfg, arm.grid);
    if (cfg.kind == "weak-compactness")
      results.push_back(weak_compactness_sweep(op, phi1, phi2, cfg.bumps.x1, cfg.bumps.x2, arm.arm, arm.schedule));
    else
      results.push_back(l2_condition_sweep(op, phi1, arm.arm, arm.schedule));
  }
  sweep_metrics(cfg.arms, results, cfg, t, m);
}

double max_abs(const Eigen::MatrixXcd& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

void run_commutator(const ExperimentConfig& cfg, Table& t, Metrics& m) {
  const Symbol& sym = *cfg.symbol;
  const Grid& grid = cfg.grid;
  const ScalarFunction& a = *cfg.multiplier;
  const OperatorMatrix base = assemble(sym, grid, cfg.size_cap);
  const OperatorMatrix comm = commutator_matrix(sym, a, grid, cfg.size_cap);

  const int N = grid.size();
  const GridFunction av = GridFunction::sample(grid, a);
  Eigen::MatrixXcd direct(N, N);
  for (int j = 0; j < N; ++j) {
    GridFunction e(grid);
    e.values()[j] = 1.0;
    GridFunction ae(grid);
    ae.values()[j] = av[j];
    direct.col(j) = apply(sym, ae).values() - av.values().cwiseProduct(apply(sym, e).values());
  }
  const double scale = max_abs(base.entries) * av.values().cwiseAbs().maxCoeff();
  m["scale"] = scale;
  m["two_path_error"] = safe_ratio(max_abs(comm.entries - direct), scale);

  const Function c = functions::constant(grid.dimension(), cfg.constant_a);
  const OperatorMatrix const_comm = commutator_matrix(sym, *c, grid, cfg.size_cap);
  m["constant_a_error"] = safe_ratio(max_abs(const_comm.entries), max_abs(base.entries) * std::abs(cfg.constant_a));

  const SpectrumReport rep = svd_tail(spectral_block(comm, cfg.interior_radius), cfg.k_list);
  m["s1"] = rep.largest();
  spectrum_metrics(rep, cfg.k_list, "", m);
  t.columns = {"k", "singular_value"};
  std::optional<SpectrumReport> control;
  if (cfg.control_symbol) {
    const OperatorMatrix cc = commutator_matrix(*cfg.control_symbol, a, grid, cfg.size_cap);
    control = svd_tail(spectral_block(cc, cfg.interior_radius), cfg.k_list);
    spectrum_metrics(*control, cfg.k_list, "control_", m);
    for (int k : cfg.k_list)
      m["tail_ratio_over_control_" + std::to_string(k)] = safe_ratio(rep.tail_ratio(k), control->tail_ratio(k));
    t.columns.push_back("control_singular_value");
  }
  for (std::size_t i = 0; i < rep.singular_values.size(); ++i) {
    std::vector<std::string> row{std::to_string(i + 1), format_number(rep.singular_values[i])};
    if (control) row.push_back(format_number(control->singular_values[i]));
    t.rows.push_back(row);
  }
}

void run_class_check(const ExperimentConfig& cfg, Table& t, Metrics& m) {
  const Symbol& sym = *cfg.symbol;
  t.columns = {"alpha", "beta", "shell_inner_radius", "shell_sup", "samples"};
  double sup_max = 0.0;
  double last_max = 0.0;
  double decay_max = 0.0;
  for (const auto& d : cfg.derivatives) {
    const ClassEstimate est =
        class_shell_estimate(sym, d.alpha, d.beta, cfg.class_order, cfg.shells, cfg.samples_per_shell, cfg.seed);
    for (std::size_t i = 0; i < est.shell_sups.size(); ++i) {
      t.rows.push_back({index_cell(d.alpha), index_cell(d.beta), format_number(est.shell_radii[i]),
                        format_number(est.shell_sups[i]), std::to_string(est.sample_counts[i])});
      sup_max = std::max(sup_max, est.shell_sups[i]);
    }
    last_max = std::max(last_max, est.shell_sups.back());
    decay_max = std::max(decay_max, safe_ratio(est.shell_sups.back(), est.shell_sups.front()));
  }
  m["sup_max"] = sup_max;
  m["last_shell_sup_max"] = last_max;
  m["decay_ratio_max"] = decay_max;

  if (cfg.fd) {
    double r1 = 0.0;
    double r2 = 0.0;
    double ratio = 0.0;
    for (const auto& d : cfg.derivatives) {
      const double a = fd_check(sym, cfg.fd->x, cfg.fd->xi, d.alpha, d.beta, cfg.fd->h);
      const double b = fd_check(sym, cfg.fd->x, cfg.fd->xi, d.alpha, d.beta, 0.5 * cfg.fd->h);
      r1 = std::max(r1, a);
      r2 = std::max(r2, b);
      if (a > 0.0) ratio = std::max(ratio, b / a);
    }
    m["fd_residual_h"] = r1;
    m["fd_residual_h2"] = r2;
    m["fd_halving_ratio"] = ratio;
  }

  if (cfg.peetre) {
    const int dim = sym.dimension();
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg.peetre->samples; ++i) {
      const auto u = halton_point(cfg.seed + 1 + static_cast<std::uint64_t>(i), 2 * dim + 2);
      Point z{};
      Point xi{};
      for (int q = 0; q < dim; ++q) {
        z[q] = cfg.peetre->radius * (2.0 * u[q] - 1.0);
        xi[q] = cfg.peetre->radius * (2.0 * u[dim + q] - 1.0);
      }
      const double k = cfg.peetre->k_max * u[2 * dim];
      const double s = cfg.peetre->s_max * (2.0 * u[2 * dim + 1] - 1.0);
      worst = std::min(worst, peetre_margin(z, xi, s, k));
    }
    m["peetre_min_margin"] = worst;
  }
}

void run_t1_trace(const ExperimentConfig& cfg, Table& t, Metrics& m) {
  const Symbol& sym = *cfg.symbol;
  const Grid& grid = cfg.grid;
  const T1Trace tr = t1_trace(sym, grid);
  if (grid.dimension() == 1)
    t.columns = {"x", "applied_re", "applied_im", "direct_re", "direct_im"};
  else
    t.columns = {"x0", "x1", "applied_re", "applied_im", "direct_re", "direct_im"};
  for (int i = 0; i < grid.size(); ++i) {
    const Point x = grid.point(i);
    std::vector<std::string> row{format_number(x[0])};
    if (grid.dimension() == 2) row.push_back(format_number(x[1]));
    for (Complex v : {tr.applied[i], tr.direct[i]}) {
      row.push_back(format_number(v.real()));
      row.push_back(format_number(v.imag()));
    }
    t.rows.push_back(row);
  }
  m["discrepancy"] = tr.discrepancy();
  m["max_abs_applied"] = tr.applied.values().cwiseAbs().maxCoeff();
  m["max_abs_direct"] = tr.direct.values().cwiseAbs().maxCoeff();
  if (cfg.expected_trace) {
    double err = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
      const double e = cfg.expected_trace->value(grid.point(i));
      err = std::max({err, std::abs(tr.applied[i] - e), std::abs(tr.direct[i] - e)});
    }
    m["expected_error"] = err;
  }
  if (!cfg.cmo_shells.empty()) {
    const std::vector<double> shells = cmo_proxy(sym, cfg.cmo_shells);
    m["cmo_last_over_first"] = safe_ratio(shells.back(), shells.front());
  }
}

bool compare(double lhs, const std::string& op, double rhs) {
  if (std::isnan(lhs) || std::isnan(rhs)) return false;
  if (op == "<=") return lhs <= rhs;
  if (op == "<") return lhs < rhs;
  if (op == ">=") return lhs >= rhs;
  if (op == ">") return lhs > rhs;
  return lhs == rhs;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult out;
  RunManifest& man = out.manifest;
  man.kind = cfg.kind;
  man.config = cfg.echo;
  man.config_hash = config_hash(cfg.echo);
  man.seed = cfg.seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (!cfg.symbol) throw Error("config carries no symbol");
    if (cfg.kind == "transpose-check")
      run_transpose_check(cfg, out.table, man.metrics);
    else if (cfg.kind == "compactness")
      run_compactness(cfg, out.table, man.metrics, man.notes);
    else if (cfg.kind == "weak-compactness" || cfg.kind == "l2-condition")
      run_sweeps(cfg, out.table, man.metrics, man.notes);
    else if (cfg.kind == "commutator")
      run_commutator(cfg, out.table, man.metrics);
    else if (cfg.kind == "class-check")
      run_class_check(cfg, out.table, man.metrics);
    else if (cfg.kind == "t1-trace")
      run_t1_trace(cfg, out.table, man.metrics);
    else
      throw Error("unknown experiment kind '" + cfg.kind + "'");
  } catch (const std::exception& e) {
    man.error = e.what();
  }
  man.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  man.rows = out.table.rows.size();
  if (man.rows == 0) man.notes.push_back("zero rows");

  if (!man.error) {
    for (const auto& a : cfg.assertions) {
      Verdict v{a.name, a.metric, a.op};
      auto find = [&](const std::string& key) {
        auto it = man.metrics.find(key);
        return it == man.metrics.end() ? std::numeric_limits<double>::quiet_NaN() : it->second;
      };
      v.lhs = find(a.metric);
      v.rhs = a.value ? *a.value : a.factor * find(a.rhs_metric);
      v.passed = compare(v.lhs, a.op, v.rhs);
      man.verdicts.push_back(v);
    }
  }
  return out;
}

std::string render_csv(const Table& table) {
  std::string s;
  for (std::size_t i = 0; i < table.columns.size(); ++i) s += (i ? "," : "") + table.columns[i];
  s += "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + row[i];
    s += "\n";
  }
  return s;
}

namespace {
void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << content;
  os.close();
  if (!os) throw std::runtime_error("failed writing " + path.string());
}
}  // namespace

void emit_report(RunResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
  RunManifest& man = result.manifest;
  const std::string stem = man.kind + "-" + man.config_hash;
  const fs::path csv = fs::path(dir) / (stem + ".csv");
  const fs::path manifest = fs::path(dir) / (stem + ".manifest.json");
  man.outputs = {csv.filename().string(), manifest.filename().string()};
  write_file(csv, render_csv(result.table));
  write_file(manifest, man.to_json().dump(2) + "\n");
}

std::string resolve_output_dir(const std::string& cli_out, const ExperimentConfig& cfg) {
  if (!cli_out.empty()) return cli_out;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return kDefaultOutDir;
}

}  // namespace psido
