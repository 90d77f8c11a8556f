#include "srlab/goldens.hpp"

#include "srlab/types.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace srlab {

namespace fs = std::filesystem;

namespace {

Json numeric(const std::string& check, const std::string& ptr, double value, double abs_tol, double se_mult,
             const std::string& prov) {
  return Json{{"check", check},     {"pointer", ptr},           {"value", value},
              {"abs_tol", abs_tol}, {"stderr_multiple", se_mult}, {"provenance", prov}};
}

Json exact(const std::string& check, const std::string& ptr, Json v) {
  return Json{{"check", check}, {"pointer", ptr}, {"equals", std::move(v)}};
}

Json table(const std::string& name, std::vector<Json> items) {
  Json e;
  e["scenario"] = name;
  e["expectations"] = Json(std::move(items));
  return e;
}

std::vector<Golden> build() {
  const double pi = kPi;
  std::vector<Golden> g;

  g.push_back({"sphere-hemisphere",
               "# round 2-sphere, upper hemisphere\n"
               "name = sphere-hemisphere\n"
               "model = \"round-sphere(2)\"\n"
               "domain = hemisphere\n"
               "seed = 20240101\n"
               "checks = [reduction, santalo, lambda1, spectral, hardy, radii]\n"
               "santalo_functions = [one, grad_sq]\n"
               "santalo_samples = 20000\n"
               "hardy_samples = 20000\n",
               table("sphere-hemisphere",
                     {exact("summary", "/pass", true),
                      numeric("santalo", "/results/one_lhs", 4 * pi * pi, 1e-6, 3, "closed_form"),
                      numeric("santalo", "/results/one_rhs", 4 * pi * pi, 1e-6, 3, "closed_form"),
                      numeric("lambda1", "/results/l_sup", pi, 1e-4 * pi, 0, "closed_form"),
                      numeric("lambda1", "/results/bound", 2.0, 1e-3, 0, "closed_form"),
                      numeric("spectral", "/results/lambda1_extrapolated", 2.0, 1e-3, 0, "closed_form")})});

  g.push_back({"chf-1",
               "# complex Hopf fibration S^1 -> S^3 -> S^2, hemisphere\n"
               "name = chf-1\n"
               "model = \"chf(1)\"\n"
               "domain = hemisphere\n"
               "seed = 20240102\n"
               "checks = [reduction, santalo, visibility, hardy, lambda1, isoperimetric, spectral]\n"
               "santalo_functions = [one, grad_sq]\n"
               "santalo_samples = 20000\n"
               "hardy_samples = 20000\n"
               "iso_points = 16\n",
               table("chf-1",
                     {exact("summary", "/pass", true), exact("reduction", "/flags/h2_pass", true),
                      numeric("santalo", "/results/one_lhs", 2 * pi * pi * pi, 1e-6, 3, "closed_form"),
                      numeric("santalo", "/results/one_rhs", 2 * pi * pi * pi, 1e-6, 3, "closed_form"),
                      numeric("lambda1", "/results/l_sup", pi, 1e-4 * pi, 0, "closed_form"),
                      numeric("lambda1", "/results/bound", 2.0, 1e-3, 0, "closed_form"),
                      numeric("spectral", "/results/lambda1_extrapolated", 2.0, 1e-3, 0, "closed_form"),
                      numeric("isoperimetric", "/results/sigma_boundary", pi * pi, 1e-8, 0, "quadrature"),
                      exact("isoperimetric", "/flags/sigma_ratio_discrepancy", true),
                      numeric("hardy", "/results/p2_by_chord/ratio", 1.0, 1e-6, 3, "closed_form")})});

  g.push_back({"qhf-1",
               "# quaternionic Hopf fibration S^3 -> S^7 -> S^4, hemisphere\n"
               "name = qhf-1\n"
               "model = \"qhf(1)\"\n"
               "domain = hemisphere\n"
               "seed = 20240103\n"
               "checks = [reduction, santalo, lambda1, spectral]\n"
               "santalo_samples = 10000\n"
               "lambda1_samples = 1000\n",
               table("qhf-1",
                     {exact("summary", "/pass", true),
                      numeric("santalo", "/results/one_lhs", std::pow(pi, 6) / 3.0, 1e-6, 3, "closed_form"),
                      numeric("lambda1", "/results/l_sup", pi, 1e-4 * pi, 0, "closed_form"),
                      numeric("lambda1", "/results/bound", 4.0, 1e-3, 0, "closed_form"),
                      numeric("spectral", "/results/lambda1_extrapolated", 4.0, 1e-3, 0, "closed_form")})});

  g.push_back({"heisenberg-ball",
               "# first Heisenberg group, sub-Riemannian ball of radius 1\n"
               "name = heisenberg-ball\n"
               "model = \"heisenberg(1)\"\n"
               "domain = ball\n"
               "ball_radius = 1\n"
               "seed = 20240104\n"
               "checks = [reduction, santalo, lambda1, isoperimetric, carnot]\n"
               "santalo_samples = 10000\n"
               "lambda1_samples = 1000\n"
               "iso_boundary = 2000\n"
               "carnot_samples = 200\n",
               table("heisenberg-ball",
                     {exact("summary", "/pass", true), exact("reduction", "/flags/h1_pass", true),
                      exact("reduction", "/flags/h2_pass", true),
                      numeric("lambda1", "/results/bound_analytic", pi * pi / 2.0, 1e-12, 0, "closed_form"),
                      numeric("carnot", "/results/diam_h_lower", 2.0, 2e-3, 0, "closed_form")})});

  g.push_back({"martinet-box",
               "# Martinet distribution on a box away from the singular plane\n"
               "name = martinet-box\n"
               "model = martinet\n"
               "domain = box\n"
               "box_lo = [-0.5, 0.5, -0.5]\n"
               "box_hi = [0.5, 1.5, 0.5]\n"
               "seed = 20240105\n"
               "checks = [reduction, santalo, hardy, radii]\n"
               "santalo_samples = 10000\n"
               "test_function = bump\n"
               "bump_radius = 0.45\n"
               "hardy_samples = 10000\n",
               table("martinet-box",
                     {exact("summary", "/pass", true), exact("reduction", "/flags/h1_pass", true),
                      exact("reduction", "/flags/h2_pass", true)})});

  const double eps = 0.1;
  g.push_back({"spherical-band",
               "# equatorial band of width 2 eps on the round 2-sphere, reduced to the meridian\n"
               "name = spherical-band\n"
               "model = \"spherical-band(0.1)\"\n"
               "domain = band\n"
               "seed = 20240106\n"
               "checks = [reduction, santalo, lambda1]\n"
               "expect_reduction = false\n"
               "expect_balance = false\n"
               "santalo_samples = 20000\n"
               "lambda1_samples = 1000\n",
               table("spherical-band",
                     {exact("summary", "/pass", true), exact("reduction", "/flags/h1_pass", true),
                      exact("reduction", "/flags/h2_pass", false), exact("santalo", "/flags/one_balanced", false),
                      numeric("santalo", "/results/one_lhs", 8 * pi * std::sin(eps), 1e-6, 3, "closed_form"),
                      numeric("santalo", "/results/one_rhs", 2 * eps * 4 * pi * std::cos(eps), 1e-6, 3, "closed_form"),
                      numeric("lambda1", "/results/l_sup", 2 * eps, 1e-9, 0, "closed_form"),
                      numeric("lambda1", "/results/bound", pi * pi / (4 * eps * eps), 1e-6, 0, "closed_form"),
                      numeric("lambda1", "/results/lambda1_numeric", 246.2398, 1e-3, 0, "quadrature"),
                      exact("lambda1", "/flags/bound_violated", true)})});
  return g;
}

const Json* find_check(const Json& report, const std::string& name) {
  if (name == "summary") return &report.at("summary");
  for (const auto& c : report.at("checks"))
    if (c.at("name") == name) return &c;
  return nullptr;
}

}  // namespace

const std::vector<Golden>& golden_bundle() {
  static const std::vector<Golden> bundle = build();
  return bundle;
}

std::vector<std::string> emit_goldens(const std::string& dir, bool force) {
  fs::create_directories(dir);
  std::vector<std::pair<fs::path, std::string>> files;
  for (const auto& g : golden_bundle()) {
    files.emplace_back(fs::path(dir) / (g.name + ".cfg"), g.config);
    files.emplace_back(fs::path(dir) / (g.name + ".expected.json"), g.expected.dump(2) + "\n");
  }
  if (!force)
    for (const auto& [path, text] : files)
      if (fs::exists(path)) throw ConfigError(path.string() + " exists (use --force to overwrite)");
  std::vector<std::string> out;
  for (const auto& [path, text] : files) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
    if (!f) throw Error("write failed: " + path.string());
    out.push_back(path.string());
  }
  return out;
}

std::vector<std::string> compare_expectations(const Json& report, const Json& expected) {
  std::vector<std::string> fails;
  for (const auto& e : expected.at("expectations")) {
    const std::string check = e.at("check");
    const std::string ptr = e.at("pointer");
    const std::string where = check + ptr;
    const Json* c = find_check(report, check);
    if (!c) {
      fails.push_back(where + ": check missing from report");
      continue;
    }
    const Json::json_pointer jp(ptr);
    if (!c->contains(jp)) {
      fails.push_back(where + ": key missing");
      continue;
    }
    const Json& v = c->at(jp);
    if (e.contains("equals")) {
      if (v != e.at("equals")) fails.push_back(where + ": got " + v.dump() + ", expected " + e.at("equals").dump());
      continue;
    }
    double value = 0.0, se = 0.0;
    if (v.is_object()) {
      if (!v.at("value").is_number()) {
        fails.push_back(where + ": non-finite value");
        continue;
      }
      value = v.at("value").get<double>();
      if (v.contains("stderr")) se = v.at("stderr").get<double>();
    } else {
      value = v.get<double>();
    }
    const double target = e.at("value").get<double>();
    const double tol = e.at("abs_tol").get<double>() + e.value("stderr_multiple", 0.0) * se;
    if (!(std::abs(value - target) <= tol)) {
      std::ostringstream s;
      s.precision(12);
      s << where << ": got " << value << " (stderr " << se << "), expected " << target << " within " << tol;
      fails.push_back(s.str());
    }
  }
  return fails;
}

}  // namespace srlab
