#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "psido/config.hpp"

using namespace psido;
using nlohmann::json;

namespace {
std::vector<std::string> problems_of(const json& doc, const std::string& kind = "") {
  try {
    parse_config_json(doc, kind);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& needle) {
  return std::any_of(problems.begin(), problems.end(),
                     [&](const std::string& p) { return p.find(needle) != std::string::npos; });
}

json minimal_transpose() {
  return json::parse(R"({"experiment": "transpose-check", "symbol": {"family": "constant", "value": 1}})");
}

json weak_compactness(double R) {
  json doc = json::parse(R"({
    "experiment": "weak-compactness",
    "grid": {"n": 512, "L": 16},
    "symbol": {"family": "constant", "value": 1},
    "sweep": {"arms": [{"arm": "translate", "start": 1, "ratio": 2, "count": 3}]}
  })");
  doc["sweep"]["arms"][0]["R"] = R;
  return doc;
}
}  // namespace

TEST_CASE("minimal config receives defaults") {
  const ExperimentConfig cfg = parse_config_json(minimal_transpose());
  CHECK(cfg.kind == "transpose-check");
  CHECK(cfg.grid.dimension() == 1);
  CHECK(cfg.grid.points_per_dim() == 256);
  CHECK(cfg.grid.half_length() == doctest::Approx(16 * std::numbers::pi).epsilon(1e-15));
  REQUIRE(cfg.orders.size() == 1);
  CHECK(cfg.orders[0] == 2);
  CHECK(cfg.seed == 0);
  CHECK(cfg.support_radius == doctest::Approx(cfg.grid.half_length() / 2));
  CHECK(cfg.echo.is_object());
  CHECK(cfg.symbol.has_value());
}

TEST_CASE("echo is deterministic and ignores output placement") {
  json a = minimal_transpose();
  json b = minimal_transpose();
  b["output_dir"] = "elsewhere";
  b["jobs"] = 1;
  CHECK(parse_config_json(a).echo == parse_config_json(b).echo);
  json c = minimal_transpose();
  c["seed"] = 3;
  CHECK(parse_config_json(a).echo != parse_config_json(c).echo);
}

TEST_CASE("odd grid size is rejected by field") {
  json doc = minimal_transpose();
  doc["grid"] = {{"n", 255}};
  const auto p = problems_of(doc);
  REQUIRE_FALSE(p.empty());
  CHECK(mentions(p, "grid.n"));
}

TEST_CASE("torus safety of sweep arms") {
  CHECK(problems_of(weak_compactness(2.0)).empty());
  const auto p = problems_of(weak_compactness(5.0));
  CHECK(mentions(p, "sweep.arms[0]"));
  CHECK(mentions(p, "torus-safety"));
}

TEST_CASE("support radius cannot exceed half the torus") {
  json doc = minimal_transpose();
  doc["grid"] = {{"n", 64}, {"L", 4}};
  doc["support_radius"] = 3;
  CHECK(mentions(problems_of(doc), "support_radius"));
}

TEST_CASE("all problems are reported together") {
  json doc = minimal_transpose();
  doc["grid"] = {{"n", 7}, {"d", 3}};
  doc["colour"] = "blue";
  doc["expansion"] = {{"orders", {0, 20}}};
  const auto p = problems_of(doc);
  CHECK(p.size() >= 4);
  CHECK(mentions(p, "grid.n"));
  CHECK(mentions(p, "grid.d"));
  CHECK(mentions(p, "colour: unknown key"));
  CHECK(mentions(p, "expansion.orders"));
}

TEST_CASE("assertions name known metrics") {
  json doc = minimal_transpose();
  doc["assertions"] = json::array({{{"name", "a"}, {"metric", "identity_floor"}, {"op", "<="}, {"value", 1e-12}}});
  CHECK(problems_of(doc).empty());
  doc["assertions"][0]["metric"] = "bogus";
  CHECK(mentions(problems_of(doc), "bogus"));
  doc["assertions"][0]["metric"] = "identity_floor";
  doc["assertions"][0]["op"] = "~";
  CHECK_FALSE(problems_of(doc).empty());
}

TEST_CASE("dense experiments respect the size cap") {
  json doc = json::parse(R"({"experiment": "compactness", "grid": {"n": 8192},
                             "symbol": {"family": "constant", "value": 1}})");
  CHECK(mentions(problems_of(doc), "size cap"));
  doc["size_cap"] = 8192;
  CHECK(problems_of(doc).empty());
}

TEST_CASE("experiment kind must agree with the command line") {
  CHECK(mentions(problems_of(minimal_transpose(), "compactness"), "experiment"));
  CHECK(problems_of(minimal_transpose(), "transpose-check").empty());
  json doc = minimal_transpose();
  doc["experiment"] = "nonsense";
  CHECK(mentions(problems_of(doc), "unknown experiment kind"));
}

TEST_CASE("function and symbol builders") {
  const Function f = build_function(json::parse(R"({"kind": "gaussian", "scale": 2})"), 1);
  CHECK(f->value({2.0, 0}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(build_function("tanh_ramp", 1)->value({0.0, 0}) == 0.0);
  CHECK_THROWS_AS(build_function(json::parse(R"({"kind": "sawtooth"})"), 1), ConfigError);
  const Symbol s = build_symbol(json::parse(R"({"family": "separable", "m": "gaussian", "psi": "rational_decay"})"), 1);
  CHECK(s.eval({0.0, 0}, {1.0, 0}).real() == doctest::Approx(0.5).epsilon(1e-15));
  const Symbol sum = build_symbol(json::parse(R"({"family": "sum", "terms": [
      {"coeff": [0, 1], "symbol": {"family": "constant", "value": 1}},
      {"coeff": 2, "symbol": {"family": "constant", "value": 1}}]})"), 1);
  CHECK(sum.eval({0.0, 0}, {0.0, 0}) == Complex(2.0, 1.0));
  CHECK_THROWS_AS(build_symbol(json::parse(R"({"family": "elementary", "psi": "gaussian"})"), 1), ConfigError);
}

TEST_CASE("config files") {
  CHECK_THROWS_AS(parse_config("/nonexistent/config.json"), ConfigError);
  const std::string path = "test_config_broken.json";
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(parse_config(path), ConfigError);
  std::ofstream(path) << minimal_transpose().dump();
  CHECK(parse_config(path).kind == "transpose-check");
}
