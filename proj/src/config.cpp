#include "psido/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "psido/calculus.hpp"
#include "psido/errors.hpp"

namespace psido {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += "\n  " + s;
  return out;
}

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

/// Collects validation problems while walking the document.
class Checker {
 public:
  std::vector<std::string> problems;

  void fail(const std::string& path, const std::string& msg) { problems.push_back(path + ": " + msg); }

  bool is_object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    fail(path, "expected a table");
    return false;
  }

  void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) return;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
        fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
    }
  }

  std::optional<double> number(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      fail(sub(path, key), "expected a number");
      return std::nullopt;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      fail(sub(path, key), "must be finite");
      return std::nullopt;
    }
    return d;
  }

  double number_or(const json& obj, const std::string& key, const std::string& path, double def) {
    return number(obj, key, path).value_or(def);
  }

  std::optional<double> positive(const json& obj, const std::string& key, const std::string& path) {
    auto v = number(obj, key, path);
    if (v && !(*v > 0.0)) {
      fail(sub(path, key), "must be positive");
      return std::nullopt;
    }
    return v;
  }

  std::optional<long long> integer(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      fail(sub(path, key), "expected an integer");
      return std::nullopt;
    }
    return v.get<long long>();
  }

  std::optional<std::string> string(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_string()) {
      fail(sub(path, key), "expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::optional<Point> point(const json& obj, const std::string& key, const std::string& path, int dim) {
    if (!obj.is_object() || !obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_array() || static_cast<int>(v.size()) != dim ||
        !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); })) {
      fail(sub(path, key), "expected an array of " + std::to_string(dim) + " numbers");
      return std::nullopt;
    }
    Point p{};
    for (int i = 0; i < dim; ++i) p[i] = v[i].get<double>();
    return p;
  }

  std::optional<MultiIndex> multi_index(const json& obj, const std::string& key, const std::string& path, int dim) {
    if (!obj.is_object() || !obj.contains(key)) return MultiIndex(dim);
    const json& v = obj.at(key);
    if (!v.is_array() || static_cast<int>(v.size()) != dim ||
        !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number_integer() && e.get<int>() >= 0; })) {
      fail(sub(path, key), "expected an array of " + std::to_string(dim) + " non-negative integers");
      return std::nullopt;
    }
    std::array<int, kMaxDim> e{};
    for (int i = 0; i < dim; ++i) e[i] = v[i].get<int>();
    return MultiIndex(dim, e);
  }

  std::vector<double> numbers(const json& obj, const std::string& key, const std::string& path) {
    std::vector<double> out;
    if (!obj.is_object() || !obj.contains(key)) return out;
    const json& v = obj.at(key);
    if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); })) {
      fail(sub(path, key), "expected an array of numbers");
      return out;
    }
    for (const auto& e : v) out.push_back(e.get<double>());
    return out;
  }

  std::vector<int> integers(const json& obj, const std::string& key, const std::string& path) {
    std::vector<int> out;
    if (!obj.is_object() || !obj.contains(key)) return out;
    const json& v = obj.at(key);
    if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number_integer(); })) {
      fail(sub(path, key), "expected an array of integers");
      return out;
    }
    for (const auto& e : v) out.push_back(e.get<int>());
    return out;
  }

  static std::string sub(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  std::optional<Complex> complex(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (v.is_number()) return Complex(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
      return Complex(v[0].get<double>(), v[1].get<double>());
    fail(sub(path, key), "expected a number or [re, im]");
    return std::nullopt;
  }
};

Function function_spec(Checker& c, const json& spec, const std::string& path, int dim);

Function required_function(Checker& c, const json& obj, const std::string& key, const std::string& path, int dim) {
  if (!obj.is_object() || !obj.contains(key)) {
    c.fail(Checker::sub(path, key), "missing function");
    return nullptr;
  }
  return function_spec(c, obj.at(key), Checker::sub(path, key), dim);
}

Function function_spec(Checker& c, const json& spec, const std::string& path, int dim) {
  json obj = spec;
  if (spec.is_string()) obj = json{{"kind", spec.get<std::string>()}};
  if (!c.is_object(obj, path)) return nullptr;
  const auto kind = c.string(obj, "kind", path);
  if (!kind) {
    c.fail(path, "missing 'kind'");
    return nullptr;
  }
  const std::string& k = *kind;
  try {
    if (k == "constant") {
      c.allow_keys(obj, path, {"kind", "value"});
      return functions::constant(dim, c.number_or(obj, "value", path, 1.0));
    }
    if (k == "rational_decay" || k == "gaussian" || k == "tanh_ramp") {
      c.allow_keys(obj, path, {"kind", "scale"});
      const double s = c.positive(obj, "scale", path).value_or(1.0);
      if (k == "rational_decay") return functions::rational_decay(dim, s);
      if (k == "gaussian") return functions::gaussian(dim, s);
      return functions::tanh_ramp(dim, s);
    }
    if (k == "coordinate") {
      c.allow_keys(obj, path, {"kind", "axis"});
      const long long axis = c.integer(obj, "axis", path).value_or(0);
      if (axis < 0 || axis >= dim) {
        c.fail(path + ".axis", "must lie in [0, d)");
        return nullptr;
      }
      return functions::coordinate(dim, static_cast<int>(axis));
    }
    if (k == "japanese_bracket") {
      c.allow_keys(obj, path, {"kind", "p"});
      return functions::japanese_bracket(dim, c.number_or(obj, "p", path, 1.0));
    }
    if (k == "plateau") {
      c.allow_keys(obj, path, {"kind", "inner", "outer"});
      const double inner = c.positive(obj, "inner", path).value_or(1.0);
      const double outer = c.positive(obj, "outer", path).value_or(2.0);
      if (!(outer > inner)) {
        c.fail(path, "plateau needs outer > inner");
        return nullptr;
      }
      return functions::plateau(dim, inner, outer);
    }
    if (k == "annulus") {
      c.allow_keys(obj, path, {"kind"});
      return functions::annulus(dim);
    }
    if (k == "bump" || k == "odd_bump") {
      c.allow_keys(obj, path, {"kind", "radius"});
      const double r = c.positive(obj, "radius", path).value_or(1.0);
      return k == "bump" ? functions::bump(dim, r) : functions::odd_bump(dim, r);
    }
    if (k == "dilate") {
      c.allow_keys(obj, path, {"kind", "f", "factor"});
      Function f = required_function(c, obj, "f", path, dim);
      const auto factor = c.number(obj, "factor", path);
      if (!factor) c.fail(path + ".factor", "missing");
      return f && factor ? functions::dilate(f, *factor) : nullptr;
    }
    if (k == "product") {
      c.allow_keys(obj, path, {"kind", "f", "g"});
      Function f = required_function(c, obj, "f", path, dim);
      Function g = required_function(c, obj, "g", path, dim);
      return f && g ? functions::product(f, g) : nullptr;
    }
    if (k == "scale") {
      c.allow_keys(obj, path, {"kind", "f", "c"});
      Function f = required_function(c, obj, "f", path, dim);
      return f ? functions::scale(f, c.number_or(obj, "c", path, 1.0)) : nullptr;
    }
    if (k == "partial") {
      c.allow_keys(obj, path, {"kind", "f", "axis"});
      Function f = required_function(c, obj, "f", path, dim);
      const long long axis = c.integer(obj, "axis", path).value_or(0);
      if (axis < 0 || axis >= dim) {
        c.fail(path + ".axis", "must lie in [0, d)");
        return nullptr;
      }
      return f ? functions::partial(f, static_cast<int>(axis)) : nullptr;
    }
  } catch (const std::exception& e) {
    c.fail(path, e.what());
    return nullptr;
  }
  c.fail(path + ".kind", "unknown function kind '" + k + "'");
  return nullptr;
}

std::optional<Symbol> symbol_spec(Checker& c, const json& spec, const std::string& path, int dim) {
  if (!c.is_object(spec, path)) return std::nullopt;
  const auto family = c.string(spec, "family", path);
  if (!family) {
    c.fail(path, "missing 'family'");
    return std::nullopt;
  }
  DerivMode mode = DerivMode::analytic;
  if (auto m = c.string(spec, "deriv_mode", path)) {
    if (*m == "finite_difference")
      mode = DerivMode::finite_difference;
    else if (*m != "analytic")
      c.fail(path + ".deriv_mode", "expected analytic or finite_difference");
  }
  const std::string& f = *family;
  std::optional<Symbol> out;
  try {
    if (f == "constant") {
      c.allow_keys(spec, path, {"family", "deriv_mode", "value"});
      out = symbols::constant(dim, c.complex(spec, "value", path).value_or(1.0));
    } else if (f == "multiplier") {
      c.allow_keys(spec, path, {"family", "deriv_mode", "psi", "order"});
      Function psi = required_function(c, spec, "psi", path, dim);
      if (psi) out = symbols::separable(functions::constant(dim, 1.0), psi, c.number_or(spec, "order", path, 0.0));
    } else if (f == "separable") {
      c.allow_keys(spec, path, {"family", "deriv_mode", "m", "psi", "order"});
      Function m = required_function(c, spec, "m", path, dim);
      Function psi = required_function(c, spec, "psi", path, dim);
      if (m && psi) out = symbols::separable(m, psi, c.number_or(spec, "order", path, 0.0));
    } else if (f == "elementary") {
      c.allow_keys(spec, path, {"family", "deriv_mode", "m", "decay", "j_max", "order_shift", "psi"});
      Function m = required_function(c, spec, "m", path, dim);
      Function psi = spec.contains("psi") ? required_function(c, spec, "psi", path, dim) : functions::annulus(dim);
      const double decay = c.number_or(spec, "decay", path, 0.5);
      const long long j_max = c.integer(spec, "j_max", path).value_or(8);
      if (j_max < 0 || j_max > 60) c.fail(path + ".j_max", "must lie in [0, 60]");
      const double shift = c.number_or(spec, "order_shift", path, 0.0);
      if (m && psi && j_max >= 0 && j_max <= 60)
        out = symbols::elementary(symbols::ElementaryCoefficients::geometric(m, decay, static_cast<int>(j_max)), psi,
                                  shift);
    } else if (f == "sum") {
      c.allow_keys(spec, path, {"family", "deriv_mode", "terms"});
      if (!spec.contains("terms") || !spec.at("terms").is_array() || spec.at("terms").empty()) {
        c.fail(path + ".terms", "expected a non-empty array");
      } else {
        std::vector<std::pair<Complex, Symbol>> terms;
        bool ok = true;
        for (std::size_t i = 0; i < spec.at("terms").size(); ++i) {
          const std::string tp = path + ".terms[" + std::to_string(i) + "]";
          const json& t = spec.at("terms")[i];
          if (!c.is_object(t, tp)) {
            ok = false;
            continue;
          }
          c.allow_keys(t, tp, {"coeff", "symbol"});
          const Complex coeff = c.complex(t, "coeff", tp).value_or(1.0);
          if (!t.contains("symbol")) {
            c.fail(tp + ".symbol", "missing");
            ok = false;
            continue;
          }
          auto s = symbol_spec(c, t.at("symbol"), tp + ".symbol", dim);
          if (s)
            terms.emplace_back(coeff, *s);
          else
            ok = false;
        }
        if (ok) out = linear_combination(terms);
      }
    } else if (f == "truncate") {
      c.allow_keys(spec, path, {"family", "deriv_mode", "symbol", "epsilon"});
      const double eps = c.number_or(spec, "epsilon", path, 1.0);
      if (!(eps > 0.0 && eps <= 1.0)) c.fail(path + ".epsilon", "must lie in (0, 1]");
      if (!spec.contains("symbol")) {
        c.fail(path + ".symbol", "missing");
      } else if (auto s = symbol_spec(c, spec.at("symbol"), path + ".symbol", dim); s && eps > 0.0 && eps <= 1.0) {
        out = truncate(*s, eps, PhaseWindow::standard(dim));
      }
    } else {
      c.fail(path + ".family", "unknown symbol family '" + f + "'");
    }
  } catch (const std::exception& e) {
    c.fail(path, e.what());
    return std::nullopt;
  }
  if (out) out = out->with_mode(mode);
  return out;
}

struct GridCheck {
  int d = 1;
  int n = 256;
  double L = 16.0 * std::numbers::pi;
  bool ok = true;
};

GridCheck grid_spec(Checker& c, const json& doc, const std::string& path, const GridCheck& defaults) {
  GridCheck g = defaults;
  if (!doc.contains("grid")) return g;
  const json& obj = doc.at("grid");
  const std::string p = Checker::sub(path, "grid");
  if (!c.is_object(obj, p)) {
    g.ok = false;
    return g;
  }
  c.allow_keys(obj, p, {"d", "n", "L", "L_over_pi"});
  const std::size_t before = c.problems.size();
  if (auto d = c.integer(obj, "d", p)) {
    if (*d < 1 || *d > kMaxDim) c.fail(p + ".d", "must be 1 or 2");
    g.d = static_cast<int>(*d);
  }
  if (auto n = c.integer(obj, "n", p)) {
    if (*n < 2 || *n % 2 != 0) c.fail(p + ".n", "must be even and >= 2, got " + std::to_string(*n));
    if (*n > 65536) c.fail(p + ".n", "must be <= 65536");
    g.n = static_cast<int>(*n);
  }
  if (obj.contains("L") && obj.contains("L_over_pi")) c.fail(p, "give either L or L_over_pi, not both");
  if (auto L = c.positive(obj, "L", p)) g.L = *L;
  if (auto L = c.positive(obj, "L_over_pi", p)) g.L = *L * std::numbers::pi;
  g.ok = c.problems.size() == before;
  return g;
}

std::optional<SweepArm> arm_from(const std::string& s) {
  if (s == "translate") return SweepArm::translate;
  if (s == "dilate_up") return SweepArm::dilate_up;
  if (s == "dilate_down") return SweepArm::dilate_down;
  return std::nullopt;
}

bool is_dense_kind(const std::string& kind) {
  return kind == "transpose-check" || kind == "compactness" || kind == "commutator";
}

std::set<std::string> expected_metrics(const ExperimentConfig& cfg) {
  std::set<std::string> m;
  const std::string& k = cfg.kind;
  if (k == "transpose-check") {
    for (int N : cfg.orders) {
      m.insert("residual_interior_N" + std::to_string(N));
      m.insert("residual_full_N" + std::to_string(N));
    }
    m.insert({"identity_floor", "nonincreasing", "final_over_initial"});
    if (cfg.exact_transpose) m.insert({"exact_residual_interior", "exact_residual_full"});
  } else if (k == "compactness") {
    for (int kk : cfg.k_list) m.insert("tail_ratio_" + std::to_string(kk));
    for (double e : cfg.rank_epsilons) m.insert("effective_rank_" + fmt_g(e));
    m.insert({"score", "s1", "noncompact_control"});
  } else if (k == "weak-compactness" || k == "l2-condition") {
    for (const auto& a : cfg.arms) {
      const std::string n = to_string(a.arm);
      for (const char* p : {"trend_", "last_over_first_", "max_step_ratio_", "min_", "max_"}) m.insert(p + n);
    }
    m.insert({"spread_all", "max_all", "min_all"});
    if (cfg.symbol_x_support) m.insert({"max_beyond_support", "points_beyond_support"});
  } else if (k == "commutator") {
    m.insert({"two_path_error", "constant_a_error", "scale", "s1"});
    for (int kk : cfg.k_list) {
      m.insert("tail_ratio_" + std::to_string(kk));
      if (cfg.control_symbol) {
        m.insert("control_tail_ratio_" + std::to_string(kk));
        m.insert("tail_ratio_over_control_" + std::to_string(kk));
      }
    }
  } else if (k == "class-check") {
    m.insert({"sup_max", "last_shell_sup_max", "decay_ratio_max"});
    if (cfg.fd) m.insert({"fd_residual_h", "fd_residual_h2", "fd_halving_ratio"});
    if (cfg.peetre) m.insert("peetre_min_margin");
  } else if (k == "t1-trace") {
    m.insert({"discrepancy", "max_abs_applied", "max_abs_direct"});
    if (cfg.expected_trace) m.insert("expected_error");
    if (!cfg.cmo_shells.empty()) m.insert("cmo_last_over_first");
  }
  return m;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid config:" + join(problems)), problems_(std::move(problems)) {}

Function build_function(const json& spec, int dim) {
  Checker c;
  Function f = function_spec(c, spec, "function", dim);
  if (!c.problems.empty()) throw ConfigError(c.problems);
  return f;
}

Symbol build_symbol(const json& spec, int dim) {
  Checker c;
  auto s = symbol_spec(c, spec, "symbol", dim);
  if (!c.problems.empty() || !s) throw ConfigError(c.problems);
  return *s;
}

ExperimentConfig parse_config(const std::string& path, const std::string& kind) {
  return parse_config_json(read_config_document(path), kind);
}

json read_config_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path + ": cannot open config file"});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({path + ": " + e.what()});
  }
  return doc;
}

ExperimentConfig parse_config_json(const json& input, const std::string& kind_arg) {
  Checker c;
  ExperimentConfig cfg;
  if (!input.is_object()) throw ConfigError({"config: top level must be a table"});
  json doc = input;
  c.allow_keys(doc, "",
               {"experiment", "seed", "grid", "size_cap", "support_radius", "output_dir", "jobs", "symbol",
                "control_symbol", "exact_transpose", "expansion", "spectrum", "commutator", "sweep", "bumps", "class",
                "t1", "assertions"});

  // Experiment kind
  const auto file_kind = c.string(doc, "experiment", "");
  if (!kind_arg.empty() && file_kind && *file_kind != kind_arg)
    c.fail("experiment", "config declares '" + *file_kind + "' but '" + kind_arg + "' was requested");
  cfg.kind = !kind_arg.empty() ? kind_arg : file_kind.value_or("");
  if (cfg.kind.empty())
    c.fail("experiment", "missing experiment kind");
  else if (std::find(kExperimentKinds.begin(), kExperimentKinds.end(), cfg.kind) == kExperimentKinds.end())
    c.fail("experiment", "unknown experiment kind '" + cfg.kind + "'");
  doc["experiment"] = cfg.kind;

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0))
      c.fail("seed", "expected a non-negative integer");
    else
      cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  doc["seed"] = cfg.seed;

  const GridCheck g = grid_spec(c, doc, "", GridCheck{});
  doc["grid"] = json{{"d", g.d}, {"n", g.n}, {"L", g.L}};
  const int dim = g.d;
  if (g.ok) cfg.grid = Grid(g.d, g.n, g.L);

  cfg.size_cap = static_cast<int>(c.integer(doc, "size_cap", "").value_or(kDefaultSizeCap));
  if (cfg.size_cap < 2) c.fail("size_cap", "must be >= 2");
  doc["size_cap"] = cfg.size_cap;

  cfg.support_radius = c.positive(doc, "support_radius", "").value_or(0.5 * g.L);
  if (cfg.support_radius > 0.5 * g.L)
    c.fail("support_radius", "torus-safety violated: " + fmt_g(cfg.support_radius) + " exceeds L/2 = " +
                                 fmt_g(0.5 * g.L));
  doc["support_radius"] = cfg.support_radius;

  cfg.output_dir = c.string(doc, "output_dir", "").value_or("");
  cfg.jobs = static_cast<int>(c.integer(doc, "jobs", "").value_or(0));
  if (cfg.jobs < 0) c.fail("jobs", "must be >= 0");

  const std::size_t grid_size = static_cast<std::size_t>(g.d == 1 ? g.n : static_cast<long long>(g.n) * g.n);
  if (g.ok && is_dense_kind(cfg.kind) && grid_size > static_cast<std::size_t>(cfg.size_cap))
    c.fail("grid", "size cap exceeded: n^d = " + std::to_string(grid_size) + " > size_cap = " +
                       std::to_string(cfg.size_cap));

  // Symbols
  if (doc.contains("symbol"))
    cfg.symbol = symbol_spec(c, doc["symbol"], "symbol", dim);
  else if (!cfg.kind.empty())
    c.fail("symbol", "missing symbol table");
  if (doc.contains("control_symbol")) cfg.control_symbol = symbol_spec(c, doc["control_symbol"], "control_symbol", dim);
  if (doc.contains("exact_transpose"))
    cfg.exact_transpose = symbol_spec(c, doc["exact_transpose"], "exact_transpose", dim);

  // Expansion
  {
    json e = doc.value("expansion", json::object());
    if (c.is_object(e, "expansion")) {
      c.allow_keys(e, "expansion", {"N", "orders", "interior_radius", "tie_tolerance"});
      if (e.contains("N") && e.contains("orders")) c.fail("expansion", "give either N or orders, not both");
      cfg.orders = c.integers(e, "orders", "expansion");
      if (auto N = c.integer(e, "N", "expansion")) cfg.orders = {static_cast<int>(*N)};
      if (cfg.orders.empty()) cfg.orders = {2};
      for (int N : cfg.orders)
        if (N < 1 || N > 16) c.fail("expansion.orders", "orders must lie in [1, 16], got " + std::to_string(N));
      cfg.interior_radius = c.number_or(e, "interior_radius", "expansion", 0.0);
      if (cfg.interior_radius < 0.0) c.fail("expansion.interior_radius", "must be >= 0");
      cfg.tie_tolerance = c.number_or(e, "tie_tolerance", "expansion", 1e-12);
      e["orders"] = cfg.orders;
      e.erase("N");
      e["interior_radius"] = cfg.interior_radius;
      e["tie_tolerance"] = cfg.tie_tolerance;
      if (cfg.kind == "transpose-check") doc["expansion"] = e;
    }
  }

  // Spectrum
  {
    json s = doc.value("spectrum", json::object());
    if (c.is_object(s, "spectrum")) {
      c.allow_keys(s, "spectrum", {"k", "rank_epsilons", "interior_radius"});
      cfg.k_list = c.integers(s, "k", "spectrum");
      if (cfg.k_list.empty()) cfg.k_list = {std::max<int>(1, static_cast<int>(grid_size / 4))};
      cfg.rank_epsilons = c.numbers(s, "rank_epsilons", "spectrum");
      for (int k : cfg.k_list)
        if (k < 1 || static_cast<std::size_t>(k) > grid_size)
          c.fail("spectrum.k", "index " + std::to_string(k) + " outside 1..n^d");
      const double ir = c.number_or(s, "interior_radius", "spectrum", 0.0);
      if (ir < 0.0) c.fail("spectrum.interior_radius", "must be >= 0");
      if (cfg.kind == "compactness" || cfg.kind == "commutator") {
        cfg.interior_radius = ir;
        s["k"] = cfg.k_list;
        s["interior_radius"] = ir;
        doc["spectrum"] = s;
      }
    }
  }

  // Commutator
  if (cfg.kind == "commutator") {
    json cm = doc.value("commutator", json::object());
    if (c.is_object(cm, "commutator")) {
      c.allow_keys(cm, "commutator", {"a", "constant_a"});
      cfg.multiplier = required_function(c, cm, "a", "commutator", dim);
      cfg.constant_a = c.number_or(cm, "constant_a", "commutator", 1.0);
    }
  }

  // Bumps and sweep
  if (cfg.kind == "weak-compactness" || cfg.kind == "l2-condition") {
    json b = doc.value("bumps", json::object());
    if (c.is_object(b, "bumps")) {
      c.allow_keys(b, "bumps", {"profile1", "profile2", "M", "x1", "x2"});
      cfg.bumps.profile1 = c.string(b, "profile1", "bumps").value_or("standard");
      cfg.bumps.profile2 = c.string(b, "profile2", "bumps").value_or("standard");
      for (const auto& p : {cfg.bumps.profile1, cfg.bumps.profile2})
        if (p != "standard" && p != "odd") c.fail("bumps", "unknown bump profile '" + p + "'");
      cfg.bumps.M = static_cast<int>(c.integer(b, "M", "bumps").value_or(1));
      if (cfg.bumps.M < 0 || cfg.bumps.M > ScalarFunction::kMaxJetOrder)
        c.fail("bumps.M", "must lie in [0, " + std::to_string(ScalarFunction::kMaxJetOrder) + "]");
      cfg.bumps.x1 = c.point(b, "x1", "bumps", dim).value_or(Point{});
      cfg.bumps.x2 = c.point(b, "x2", "bumps", dim).value_or(Point{});
      doc["bumps"] = json{{"profile1", cfg.bumps.profile1},
                          {"profile2", cfg.bumps.profile2},
                          {"M", cfg.bumps.M},
                          {"x1", std::vector<double>(cfg.bumps.x1.begin(), cfg.bumps.x1.begin() + dim)},
                          {"x2", std::vector<double>(cfg.bumps.x2.begin(), cfg.bumps.x2.begin() + dim)}};
    }
    const double offset = std::max(norm(cfg.bumps.x1), norm(cfg.bumps.x2));

    const json sw = doc.value("sweep", json::object());
    if (c.is_object(sw, "sweep")) {
      c.allow_keys(sw, "sweep", {"operator", "arms", "symbol_x_support"});
      const std::string op = c.string(sw, "operator", "sweep").value_or("matrix_free");
      if (op != "matrix_free" && op != "dense") c.fail("sweep.operator", "expected matrix_free or dense");
      cfg.matrix_free = op != "dense";
      cfg.symbol_x_support = c.positive(sw, "symbol_x_support", "sweep");
      if (!sw.contains("arms") || !sw.at("arms").is_array()) {
        c.fail("sweep.arms", "expected an array of arms");
      } else {
        std::set<std::string> seen;
        for (std::size_t i = 0; i < sw.at("arms").size(); ++i) {
          const std::string ap = "sweep.arms[" + std::to_string(i) + "]";
          const json& a = sw.at("arms")[i];
          if (!c.is_object(a, ap)) continue;
          c.allow_keys(a, ap, {"arm", "start", "ratio", "count", "R", "grid"});
          ArmSpec spec;
          const std::string name = c.string(a, "arm", ap).value_or("");
          const auto arm = arm_from(name);
          if (!arm) {
            c.fail(ap + ".arm", "expected translate, dilate_up or dilate_down");
            continue;
          }
          if (!seen.insert(name).second) c.fail(ap + ".arm", "duplicate arm '" + name + "'");
          spec.arm = *arm;
          const std::size_t before = c.problems.size();
          spec.start = c.positive(a, "start", ap).value_or(1.0);
          spec.ratio = c.positive(a, "ratio", ap).value_or(*arm == SweepArm::dilate_down ? 0.5 : 2.0);
          spec.count = static_cast<int>(c.integer(a, "count", ap).value_or(4));
          spec.fixed_R = c.positive(a, "R", ap).value_or(1.0);
          const GridCheck ag = grid_spec(c, a, ap, g);
          if (c.problems.size() != before || !ag.ok) continue;
          spec.grid = Grid(ag.d, ag.n, ag.L);
          if (ag.d != dim) {
            c.fail(ap + ".grid.d", "arm grid dimension differs from the symbol dimension");
            continue;
          }
          if (!cfg.matrix_free && spec.grid.size() > cfg.size_cap)
            c.fail(ap + ".grid", "size cap exceeded for a dense sweep operator");
          try {
            spec.schedule = sweep_schedule(spec.arm, spec.start, spec.ratio, spec.count, spec.fixed_R);
          } catch (const std::exception& e) {
            c.fail(ap, e.what());
            continue;
          }
          for (const auto& pt : spec.schedule) {
            const double reach = norm(pt.x0) + offset + pt.R;
            if (reach > 0.5 * ag.L) {
              c.fail(ap, "torus-safety violated: |x0| + |offset| + R = " + fmt_g(reach) + " exceeds L/2 = " +
                             fmt_g(0.5 * ag.L));
              break;
            }
          }
          cfg.arms.push_back(spec);
        }
      }
    }
  }

  // Class check
  if (cfg.kind == "class-check") {
    const json cl = doc.value("class", json::object());
    if (c.is_object(cl, "class")) {
      c.allow_keys(cl, "class", {"derivatives", "order", "shells", "samples", "fd", "peetre"});
      if (cl.contains("derivatives")) {
        if (!cl.at("derivatives").is_array()) {
          c.fail("class.derivatives", "expected an array");
        } else {
          for (std::size_t i = 0; i < cl.at("derivatives").size(); ++i) {
            const std::string dp = "class.derivatives[" + std::to_string(i) + "]";
            const json& d = cl.at("derivatives")[i];
            if (!c.is_object(d, dp)) continue;
            c.allow_keys(d, dp, {"alpha", "beta"});
            auto a = c.multi_index(d, "alpha", dp, dim);
            auto b = c.multi_index(d, "beta", dp, dim);
            if (a && b) cfg.derivatives.push_back({*a, *b});
          }
        }
      } else {
        cfg.derivatives.push_back({MultiIndex(dim), MultiIndex(dim)});
      }
      cfg.class_order = c.number_or(cl, "order", "class", cfg.symbol ? cfg.symbol->order() : 0.0);
      cfg.shells = c.numbers(cl, "shells", "class");
      if (!cl.contains("shells")) cfg.shells = {0, 1, 2, 4, 8, 16, 32, 64};
      if (cfg.shells.size() < 2) c.fail("class.shells", "need at least two radii");
      for (std::size_t i = 1; i < cfg.shells.size(); ++i)
        if (!(cfg.shells[i] > cfg.shells[i - 1])) c.fail("class.shells", "radii must increase");
      if (!cfg.shells.empty() && cfg.shells.front() < 0.0) c.fail("class.shells", "radii must be >= 0");
      cfg.samples_per_shell = static_cast<int>(c.integer(cl, "samples", "class").value_or(64));
      if (cfg.samples_per_shell < 16) c.fail("class.samples", "must be >= 16");
      if (cl.contains("fd")) {
        const json& fd = cl.at("fd");
        if (c.is_object(fd, "class.fd")) {
          c.allow_keys(fd, "class.fd", {"x", "xi", "h"});
          FdSpec s;
          s.x = c.point(fd, "x", "class.fd", dim).value_or(Point{});
          s.xi = c.point(fd, "xi", "class.fd", dim).value_or(Point{});
          s.h = c.positive(fd, "h", "class.fd").value_or(1e-2);
          cfg.fd = s;
        }
      }
      if (cl.contains("peetre")) {
        const json& p = cl.at("peetre");
        if (c.is_object(p, "class.peetre")) {
          c.allow_keys(p, "class.peetre", {"samples", "k_max", "s_max", "radius"});
          PeetreSpec s;
          s.samples = static_cast<int>(c.integer(p, "samples", "class.peetre").value_or(10000));
          if (s.samples < 1) c.fail("class.peetre.samples", "must be >= 1");
          s.k_max = c.number_or(p, "k_max", "class.peetre", 10.0);
          if (s.k_max < 0.0) c.fail("class.peetre.k_max", "must be >= 0");
          s.s_max = c.number_or(p, "s_max", "class.peetre", 5.0);
          if (s.s_max < 0.0) c.fail("class.peetre.s_max", "must be >= 0");
          s.radius = c.positive(p, "radius", "class.peetre").value_or(10.0);
          cfg.peetre = s;
        }
      }
    }
  }

  // T(1) trace
  if (cfg.kind == "t1-trace") {
    const json t = doc.value("t1", json::object());
    if (c.is_object(t, "t1")) {
      c.allow_keys(t, "t1", {"expected", "cmo_shells"});
      if (t.contains("expected")) cfg.expected_trace = function_spec(c, t.at("expected"), "t1.expected", dim);
      cfg.cmo_shells = c.numbers(t, "cmo_shells", "t1");
      if (t.contains("cmo_shells") && cfg.cmo_shells.size() < 2) c.fail("t1.cmo_shells", "need at least two radii");
      for (std::size_t i = 1; i < cfg.cmo_shells.size(); ++i)
        if (!(cfg.cmo_shells[i] > cfg.cmo_shells[i - 1])) c.fail("t1.cmo_shells", "radii must increase");
    }
  }

  // Assertions
  if (doc.contains("assertions")) {
    if (!doc["assertions"].is_array()) {
      c.fail("assertions", "expected an array");
    } else {
      const std::set<std::string> known = expected_metrics(cfg);
      std::set<std::string> names;
      for (std::size_t i = 0; i < doc["assertions"].size(); ++i) {
        const std::string ap = "assertions[" + std::to_string(i) + "]";
        const json& a = doc["assertions"][i];
        if (!c.is_object(a, ap)) continue;
        c.allow_keys(a, ap, {"name", "metric", "op", "value", "rhs", "factor"});
        AssertionSpec s;
        s.metric = c.string(a, "metric", ap).value_or("");
        s.name = c.string(a, "name", ap).value_or(s.metric);
        s.op = c.string(a, "op", ap).value_or("");
        s.value = c.number(a, "value", ap);
        s.rhs_metric = c.string(a, "rhs", ap).value_or("");
        s.factor = c.number_or(a, "factor", ap, 1.0);
        if (s.metric.empty()) c.fail(ap + ".metric", "missing");
        if (!s.metric.empty() && !known.count(s.metric))
          c.fail(ap + ".metric", "unknown metric '" + s.metric + "' for " + cfg.kind);
        if (!s.rhs_metric.empty() && !known.count(s.rhs_metric))
          c.fail(ap + ".rhs", "unknown metric '" + s.rhs_metric + "' for " + cfg.kind);
        if (s.op != "<=" && s.op != "<" && s.op != ">=" && s.op != ">" && s.op != "==")
          c.fail(ap + ".op", "expected one of <=, <, >=, >, ==");
        if (s.value.has_value() == !s.rhs_metric.empty()) c.fail(ap, "give exactly one of value or rhs");
        if (!names.insert(s.name).second) c.fail(ap + ".name", "duplicate assertion name '" + s.name + "'");
        cfg.assertions.push_back(s);
      }
    }
  }

  if (!c.problems.empty()) throw ConfigError(c.problems);
  doc.erase("output_dir");
  doc.erase("jobs");
  cfg.echo = doc;
  return cfg;
}

}  // namespace psido
