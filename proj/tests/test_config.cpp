#include <doctest.h>

#include "srlab/config.hpp"
#include "srlab/goldens.hpp"
#include "srlab/scenario.hpp"
#include "srlab/types.hpp"

#include <string>

using namespace srlab;

namespace {

std::string error_of(const std::string& text) {
  try {
    build_scenario(Config::parse(text, "t.cfg"));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config values") {
  Config c = Config::parse(
      "# comment\n"
      "a = 3\n"
      "b = \"x y\"  # trailing\n"
      "c = [1, 2.5, -3e-2]\n"
      "d = word\n"
      "e = [one, \"two\"]\n"
      "f = true\n");
  CHECK(c.get_int("a", 0) == 3);
  CHECK(c.get_string("b") == "x y");
  CHECK(c.get_numbers("c") == std::vector<double>{1.0, 2.5, -0.03});
  CHECK(c.get_string("d") == "word");
  CHECK(c.get_strings("e") == std::vector<std::string>{"one", "two"});
  CHECK(c.get_bool("f", false));
  CHECK(c.get_numbers("a") == std::vector<double>{3.0});
  CHECK(c.get_number("missing", 7.0) == 7.0);
  CHECK(c.unused_keys().empty());
  CHECK(Config::parse("x = 1\n").unused_keys() == std::vector<std::string>{"x"});
}

TEST_CASE("config diagnostics carry the line") {
  auto msg = [](const std::string& text, auto&& get) -> std::string {
    try {
      get(Config::parse(text, "f.cfg"));
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(msg("a = 1\nb = [1, 2\n", [](const Config&) {}).find("f.cfg:2") != std::string::npos);
  CHECK(msg("a = 1\na = 2\n", [](const Config&) {}).find("f.cfg:2") != std::string::npos);
  CHECK(msg("\n\nn = x\n", [](const Config& c) { c.get_number("n"); }).find("f.cfg:3") != std::string::npos);
  CHECK(msg("n = 1.5\n", [](const Config& c) { c.get_int("n", 0); }).find("'n'") != std::string::npos);
  CHECK_THROWS_AS(Config::load("/nonexistent/x.cfg"), ConfigError);
}

TEST_CASE("scenario validation") {
  const std::string base = "name = s\nmodel = \"chf(1)\"\ndomain = hemisphere\nseed = 5\n";
  Scenario sc = build_scenario(Config::parse(base + "checks = [santalo, lambda1]\n"));
  CHECK(sc.checks.size() == 2);
  CHECK(sc.model->k() == 2);
  CHECK(sc.domain != nullptr);
  CHECK(sc.seed == 5);

  CHECK(error_of(base + "checks = [nope]\n").find("unknown check") != std::string::npos);
  CHECK(error_of("name = s\nmodel = \"chf(1)\"\nchecks = []\n").find("seed") != std::string::npos);
  CHECK(error_of(base + "checks = []\ntypo = 1\n").find("t.cfg:6") != std::string::npos);
  CHECK(error_of("name = s\nmodel = martinet\ndomain = none\nseed = 1\nchecks = [santalo]\n").find("domain") !=
        std::string::npos);
  CHECK(error_of("name = s\nmodel = martinet\ndomain = hemisphere\nseed = 1\nchecks = []\n").find("sphere") !=
        std::string::npos);
  CHECK(error_of(base + "checks = [hardy]\ntest_function = wave\n").find("wave") != std::string::npos);
  CHECK(error_of(base + "checks = [p-hardy]\np_values = [2, 1]\n").find("p_values") != std::string::npos);
  CHECK(error_of("name = a/b\nmodel = martinet\nseed = 1\nchecks = []\n").find("name") != std::string::npos);
}

TEST_CASE("model ids") {
  CHECK(make_model("round-sphere(3)")->k() == 3);
  CHECK(make_model("chf(2)")->k() == 4);
  CHECK(make_model("qhf(1)")->r() == 3);
  CHECK(make_model("heisenberg(2)")->n() == 5);
  CHECK(make_model("martinet")->n() == 3);
  CHECK(make_model("spherical-band(0.2)")->k() == 1);
  CHECK_THROWS_AS(make_model("chf(0)"), ConfigError);
  CHECK_THROWS_AS(make_model("chf"), ConfigError);
  CHECK_THROWS_AS(make_model("spherical-band(2)"), ConfigError);
  CHECK_THROWS_AS(make_model("torus(1)"), ConfigError);
  CHECK_THROWS_AS(make_model("carnot-step2(/nonexistent.spec)"), ConfigError);
}

TEST_CASE("empty check list gives an empty passing report") {
  Scenario sc = build_scenario(Config::parse("name = e\nmodel = \"heisenberg(1)\"\nseed = 1\nchecks = []\n"));
  RunOutcome r = run_scenario(sc, {});
  CHECK(r.pass);
  CHECK(r.report.at("checks").empty());
  CHECK(r.files.empty());
  CHECK(canonical_dump(r.report).find("run_info") == std::string::npos);
}

TEST_CASE("expectation tables") {
  Json report = Json::parse(R"({"checks": [{"name": "lambda1", "results": {"bound": {"value": 2.0005, "stderr": 0.0}},
                                              "flags": {"capped": 0}}],
                                 "summary": {"pass": true}})");
  auto table = [](Json e) { return Json{{"expectations", Json::array({std::move(e)})}}; };
  CHECK(compare_expectations(report, table({{"check", "lambda1"}, {"pointer", "/results/bound"}, {"value", 2.0},
                                            {"abs_tol", 1e-3}}))
            .empty());
  CHECK(compare_expectations(report, table({{"check", "lambda1"}, {"pointer", "/results/bound"}, {"value", 2.0},
                                            {"abs_tol", 1e-4}}))
            .size() == 1);
  CHECK(compare_expectations(report, table({{"check", "summary"}, {"pointer", "/pass"}, {"equals", true}})).empty());
  CHECK(compare_expectations(report, table({{"check", "santalo"}, {"pointer", "/x"}, {"equals", 1}})).size() == 1);
  CHECK(compare_expectations(report, table({{"check", "lambda1"}, {"pointer", "/flags/nope"}, {"equals", 1}})).size() ==
        1);
  CHECK(golden_bundle().size() == 6);
}
