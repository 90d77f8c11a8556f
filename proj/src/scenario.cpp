#include "srlab/scenario.hpp"

#include "srlab/carnot.hpp"
#include "srlab/functions.hpp"
#include "srlab/inequalities.hpp"
#include "srlab/reduction.hpp"
#include "srlab/santalo.hpp"
#include "srlab/spectral.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <regex>

namespace srlab {

namespace fs = std::filesystem;

const std::vector<std::string> kKnownChecks{"reduction", "santalo",       "visibility", "hardy", "p-hardy",
                                            "lambda1",   "isoperimetric", "spectral",   "carnot", "radii"};

namespace {

struct ModelId {
  std::string name;
  std::string arg;
};

ModelId split_id(const std::string& id) {
  static const std::regex re(R"(^\s*([a-z0-9\-]+)\s*(?:\(\s*([^()]*?)\s*\))?\s*$)");
  std::smatch m;
  if (!std::regex_match(id, m, re)) throw ConfigError("malformed model id '" + id + "'");
  return {m[1], m[2]};
}

int int_arg(const ModelId& m, const std::string& id) {
  try {
    std::size_t pos = 0;
    const int d = std::stoi(m.arg, &pos);
    if (pos != m.arg.size() || d < 1) throw std::invalid_argument("");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("model '" + id + "' needs a positive integer argument");
  }
}

double real_arg(const ModelId& m, const std::string& id) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(m.arg, &pos);
    if (pos != m.arg.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("model '" + id + "' needs a numeric argument");
  }
}

Json num(double v, std::optional<double> se, std::optional<double> tol, const std::string& prov) {
  Json j;
  if (std::isfinite(v)) {
    j["value"] = v;
  } else {
    j["value"] = nullptr;
    j["non_finite"] = std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  }
  if (se) j["stderr"] = *se;
  j["tolerance"] = tol ? Json(*tol) : Json(nullptr);
  j["provenance"] = prov;
  return j;
}

Json est(const Estimate& e, std::optional<double> tol, const std::string& prov) {
  return num(e.value, e.std_error, tol, prov);
}

struct CheckRecord {
  Json results = Json::object();
  Json flags = Json::object();
  Json notes = Json::array();
  bool pass = true;
};

std::vector<std::string> files_written;

Vec vec_of(const std::vector<double>& v) {
  Vec out(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<int>(i)) = v[i];
  return out;
}

TestFunction make_test_function(const Scenario& sc) {
  const auto& p = sc.params;
  const Model& m = *sc.model;
  if (p.test_function == "cos_delta") {
    if (m.chart() != ChartKind::UnitSphere) throw ConfigError("test_function cos_delta needs a sphere model");
    return cos_delta();
  }
  if (p.test_function == "bump") {
    Vec c;
    if (!p.bump_center.empty()) {
      c = vec_of(p.bump_center);
      if (c.size() != m.chart_dim()) throw ConfigError("bump_center has the wrong dimension");
    } else if (m.chart() == ChartKind::UnitSphere) {
      c = Vec::Unit(m.chart_dim(), 0);
    } else if (auto box = std::dynamic_pointer_cast<BoxDomain>(sc.domain)) {
      c = 0.5 * (box->lo() + box->hi());
    } else if (sc.domain_kind == "band") {
      c = Vec(2);
      c << 0.5 * kPi, kPi;
    } else {
      c = Vec::Zero(m.chart_dim());
    }
    return bump(c, p.bump_radius);
  }
  throw ConfigError("unknown test_function '" + p.test_function + "' (cos_delta, bump)");
}

SpectralCase spectral_case_of(const Scenario& sc, int& d) {
  if (!sc.params.spectral_case.empty()) {
    d = sc.params.spectral_d > 0 ? sc.params.spectral_d : 1;
    return parse_spectral_case(sc.params.spectral_case);
  }
  const ModelId id = split_id(sc.model_id);
  if (id.name == "round-sphere" || id.name == "chf" || id.name == "qhf") {
    d = sc.params.spectral_d > 0 ? sc.params.spectral_d : int_arg(id, sc.model_id);
    return parse_spectral_case(id.name == "round-sphere" ? "sphere" : id.name);
  }
  throw ConfigError("spectral check needs spectral_case for model " + sc.model_id);
}

double t_max_of(const Scenario& sc) { return sc.params.t_max; }

FlowOptions flow_of(const Scenario& sc) {
  FlowOptions f;
  f.rtol = sc.params.flow_rtol;
  f.atol = 0.1 * sc.params.flow_rtol;
  f.max_steps = sc.params.flow_max_steps;
  return f;
}

Json inequality_json(const InequalityReport& r) {
  Json j;
  j["available"] = r.available;
  if (!r.test_function.empty()) j["test_function"] = r.test_function;
  j["lhs"] = est(r.lhs, std::nullopt, "monte_carlo");
  j["rhs"] = est(r.rhs, std::nullopt, "monte_carlo");
  if (r.available) {
    if (std::isfinite(r.ratio.value))
      j["ratio"] = est(r.ratio, 3.0 * r.ratio.std_error + 1e-6, "monte_carlo");
    else
      j["ratio"] = num(r.ratio.value, std::nullopt, std::nullopt, "monte_carlo");
  }
  Json c;
  c["k"] = r.k;
  c["p"] = r.p;
  if (r.pi_p > 0.0) c["pi_p"] = r.pi_p;
  if (r.C_pk > 0.0) c["c_pk"] = r.C_pk;
  if (r.C > 0.0) c["c_iso"] = r.C;
  c["alpha"] = r.alpha;
  j["constants"] = c;
  j["pass"] = r.pass;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

// ---------------------------------------------------------------------------

CheckRecord check_reduction(const Scenario& sc) {
  const auto& p = sc.params;
  CheckRecord rec;
  ReductionCertificate c = certify_reduction(sc.model, p.reduction_samples, sc.seed, p.reduction_tol);
  rec.results["h1_residual"] = num(c.h1_residual, std::nullopt, p.reduction_tol, "certificate");
  rec.results["h1_dynamic"] = num(c.h1_dynamic, std::nullopt, p.reduction_tol, "integrator");
  rec.results["h2_residual"] = num(c.h2_residual, std::nullopt, p.reduction_tol, "certificate");
  if (c.skew_residual) rec.results["skew_residual"] = num(*c.skew_residual, std::nullopt, p.reduction_tol, "certificate");
  if (c.trace_residual)
    rec.results["trace_residual"] = num(*c.trace_residual, std::nullopt, p.reduction_tol, "certificate");
  if (c.rotated_frame_h2_residual)
    rec.results["rotated_frame_h2_residual"] = num(*c.rotated_frame_h2_residual, std::nullopt, 1e-6, "finite_difference");
  const bool certified = c.h1_pass && c.h2_pass;
  rec.flags["h1_pass"] = c.h1_pass;
  rec.flags["h2_pass"] = c.h2_pass;
  rec.flags["expected_certified"] = p.expect_reduction;

  // fiber measure identities at the model's rank
  const int k = sc.model->k();
  FiberScheme fs_;
  const bool det = k <= 4;
  auto fiber_check = [&](const char* key, const std::function<double(const Vec&)>& f, double expect) {
    Estimate e = fiber_quadrature(k, f, fs_);
    const double tol = det ? 1e-8 : 4.0 * e.std_error + 1e-12;
    rec.results[key] = est(e, tol, det ? "quadrature" : "monte_carlo");
    rec.results[std::string(key) + "_expected"] = num(expect, std::nullopt, std::nullopt, "closed_form");
    if (!(std::abs(e.value - expect) <= tol)) rec.pass = false;
  };
  Mat Q(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) Q(i, j) = 1.0 / (1.0 + i + j);
  fiber_check("fiber_total", [](const Vec&) { return 1.0; }, sphere_area(k - 1));
  fiber_check("fiber_quadratic", [&](const Vec& u) { return u.dot(Q * u); }, sphere_area(k - 1) * Q.trace() / k);
  fiber_check("fiber_hemisphere", [](const Vec& u) { return std::max(u(0), 0.0); }, sphere_area(k) / (2.0 * kPi));
  if (certified != p.expect_reduction) rec.pass = false;
  if (!p.expect_reduction)
    rec.notes.push_back("negative control: the certificate is expected to fail on this model");
  return rec;
}

std::vector<CovectorFunction> santalo_functions(const Scenario& sc) {
  std::vector<CovectorFunction> F;
  for (const auto& name : sc.params.santalo_functions) {
    if (name == "one") {
      F.push_back(constant_function(1.0));
    } else if (name == "grad_sq") {
      F.push_back(horizontal_derivative_sq(sc.model, make_test_function(sc)));
    } else if (name == "half_fiber") {
      int axis = sc.params.half_fiber_axis;
      if (axis < 0) axis = sc.model->chart() == ChartKind::UnitSphere ? 1 : 0;
      if (axis >= sc.model->chart_dim()) throw ConfigError("half_fiber_axis out of range");
      F.push_back(half_fiber_indicator(sc.model, Vec::Unit(sc.model->chart_dim(), axis)));
    } else {
      throw ConfigError("unknown santalo function '" + name + "' (one, grad_sq, half_fiber)");
    }
  }
  return F;
}

CheckRecord check_santalo(const Scenario& sc, Execution exec) {
  const auto& p = sc.params;
  CheckRecord rec;
  SantaloOptions o;
  o.n = p.santalo_samples;
  o.seed = sc.seed;
  o.exec = exec;
  o.t_max = t_max_of(sc);
  o.flow = flow_of(sc);
  auto F = santalo_functions(sc);
  auto res = santalo_balance(*sc.domain, F, o);
  bool all = true;
  for (std::size_t j = 0; j < res.size(); ++j) {
    const auto& r = res[j];
    const std::string& nm = p.santalo_functions[j];
    rec.results[nm + "_lhs"] = est(r.lhs, r.tolerance, "monte_carlo");
    rec.results[nm + "_rhs"] = est(r.rhs, r.tolerance, "monte_carlo");
    rec.results[nm + "_discrepancy_sigma"] = num(r.discrepancy, std::nullopt, 3.0, "monte_carlo");
    rec.flags[nm + "_balanced"] = r.balanced;
    all = all && r.balanced;
    if (j == 0) {
      rec.flags["n_interior"] = r.n_interior;
      rec.flags["n_boundary"] = r.n_boundary;
      rec.flags["capped_fraction"] = r.capped_fraction;
      rec.flags["characteristic_fraction"] = r.characteristic_fraction;
    }
  }
  rec.flags["expected_balance"] = p.expect_balance;
  rec.pass = all == p.expect_balance;
  if (!p.expect_balance) rec.notes.push_back("negative control: the reduction fails here, imbalance is expected");
  return rec;
}

std::vector<Vec> interior_points(const Scenario& sc, std::size_t n, std::uint64_t stream) {
  Rng rng = chunk_engine(sc.seed, stream, 0);
  std::vector<Vec> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(sc.domain->sample_interior(rng));
  return pts;
}

CheckRecord check_visibility(const Scenario& sc, Execution exec) {
  const auto& p = sc.params;
  CheckRecord rec;
  auto rep = visibility_angles(*sc.domain, interior_points(sc, p.visibility_points, 41), p.visibility_fiber, sc.seed,
                               flow_of(sc), t_max_of(sc), exec);
  rec.results["theta_inf"] = num(rep.theta_inf, rep.theta_inf_stderr, std::nullopt, "monte_carlo");
  rec.results["theta_inf_capped_visible"] = num(rep.theta_inf_capped_visible, std::nullopt, std::nullopt, "monte_carlo");
  if (rep.cut_known) rec.results["theta_opt_inf"] = num(rep.theta_opt_inf, std::nullopt, std::nullopt, "monte_carlo");
  rec.flags["capped_fraction"] = rep.capped_fraction;
  rec.flags["cut_known"] = rep.cut_known;
  rec.flags["n_points"] = rep.n_points;
  rec.flags["n_fiber"] = rep.n_fiber;
  bool ok = true;
  for (std::size_t i = 0; i < rep.theta.size(); ++i) {
    if (rep.theta[i] < 0.0 || rep.theta[i] > 1.0) ok = false;
    if (rep.cut_known && rep.theta_opt[i] > rep.theta[i]) ok = false;
  }
  if (p.expect_full_visibility && rep.theta_inf < 1.0) ok = false;
  rec.pass = ok;
  return rec;
}

HardyOptions hardy_options(const Scenario& sc, Execution exec) {
  HardyOptions o;
  o.n = sc.params.hardy_samples;
  o.seed = sc.seed;
  o.exec = exec;
  o.t_max = t_max_of(sc);
  o.flow = flow_of(sc);
  return o;
}

CheckRecord check_hardy(const Scenario& sc, Execution exec, const std::vector<double>& ps) {
  CheckRecord rec;
  const TestFunction f = make_test_function(sc);
  for (double p : ps) {
    auto reps = hardy_check(*sc.domain, f, p, hardy_options(sc, exec));
    std::ostringstream key;
    key << "p" << p;
    std::string k = key.str();
    for (char& ch : k)
      if (ch == '.') ch = '_';
    rec.results[k + "_by_chord"] = inequality_json(reps[0]);
    rec.results[k + "_by_exit"] = inequality_json(reps[1]);
    rec.pass = rec.pass && reps[0].pass && reps[1].pass;
  }
  rec.flags["test_function"] = f.id;
  return rec;
}

CheckRecord check_lambda1(const Scenario& sc, Execution exec) {
  const auto& p = sc.params;
  CheckRecord rec;
  auto b = lambda1_lower_bound(*sc.domain, p.lambda1_samples, sc.seed, flow_of(sc), t_max_of(sc), exec);
  rec.results["bound"] = num(b.value, std::nullopt, std::nullopt, "sampled_supremum");
  rec.results["l_sup"] = num(b.L_sup, std::nullopt, std::nullopt, "sampled_supremum");
  rec.flags["samples"] = b.samples;
  rec.flags["capped"] = b.capped;
  rec.flags["empirical"] = true;
  rec.notes.push_back("sampled L_sup is a lower estimate of the supremum; the bound is an upper estimate of the exact bound");
  const bool constant_L = sc.domain_kind == "hemisphere" || sc.domain_kind == "band";
  if (b.analytic_L) {
    const double L = *b.analytic_L;
    rec.results["l_analytic"] = num(L, std::nullopt, std::nullopt, "closed_form");
    rec.results["bound_analytic"] = num(*b.analytic_value, std::nullopt, std::nullopt, "closed_form");
    if (constant_L) {
      rec.results["l_sup"]["tolerance"] = p.lambda1_l_tol * L;
      if (!(std::abs(b.L_sup - L) <= p.lambda1_l_tol * L)) rec.pass = false;
    } else if (!(b.L_sup <= L * (1.0 + 1e-8))) {
      rec.pass = false;
    }
  }
  if (b.capped > 0) rec.notes.push_back("capped trajectories: L taken infinite and the bound set to 0");
  if (sc.domain->known.lambda1) {
    const double lam = *sc.domain->known.lambda1;
    rec.results["lambda1_exact"] = num(lam, std::nullopt, std::nullopt, "closed_form");
    if (b.value > lam * (1.0 + 1e-6)) rec.pass = false;
  }
  if (sc.domain_kind == "band") {
    auto band = std::dynamic_pointer_cast<SphericalBandModel>(sc.model);
    IntervalEigen e = band_eigenvalue(band->eps());
    rec.results["lambda1_numeric"] = num(e.extrapolated, std::nullopt, e.extrapolation_error, "extrapolated");
    const bool violated = b.value > e.extrapolated + e.extrapolation_error;
    rec.flags["bound_violated"] = violated;
    if (violated)
      rec.notes.push_back("the computed first Dirichlet eigenvalue of the band lies below the reduced bound; "
                          "consistent with the failing volume condition (reduction check)");
  }
  return rec;
}

CheckRecord check_isoperimetric(const Scenario& sc, Execution exec) {
  const auto& p = sc.params;
  CheckRecord rec;
  IsoperimetricOptions o;
  o.n_boundary = p.iso_boundary;
  o.n_points = p.iso_points;
  o.n_fiber = p.iso_fiber;
  o.seed = sc.seed;
  o.exec = exec;
  o.t_max = t_max_of(sc);
  o.flow = flow_of(sc);
  auto r = isoperimetric_check(*sc.domain, o);
  const bool det_sigma = sc.domain->boundary_measure().has_value();
  rec.results["sigma_boundary"] = est(r.sigma, std::nullopt, det_sigma ? "quadrature" : "monte_carlo");
  rec.results["omega_volume"] = est(r.omega, std::nullopt, "quadrature");
  rec.results["l_sup"] = num(r.l_sup_empirical, std::nullopt, std::nullopt, "sampled_supremum");
  rec.results["diam_r"] = num(r.diam_r_empirical, std::nullopt, std::nullopt, "sampled_supremum");
  if (r.l_analytic) rec.results["l_analytic"] = num(*r.l_analytic, std::nullopt, std::nullopt, "closed_form");
  if (r.diam_r_analytic) rec.results["diam_r_analytic"] = num(*r.diam_r_analytic, std::nullopt, std::nullopt, "closed_form");
  rec.results["theta_inf"] = num(r.visibility.theta_inf, r.visibility.theta_inf_stderr, std::nullopt, "monte_carlo");
  rec.results["via_l"] = inequality_json(r.reports[0]);
  rec.results["via_diam_r"] = inequality_json(r.reports[1]);
  rec.flags["capped_fraction"] = r.visibility.capped_fraction;
  for (const auto& rep : r.reports)
    if (rep.available && !rep.pass) rec.pass = false;
  // chf(d) hemisphere: compare with the closed-form ratio |S^{2d+1}| / |S^{2d}|
  const ModelId id = split_id(sc.model_id);
  if (id.name == "chf" && sc.domain_kind == "hemisphere") {
    const int d = int_arg(id, sc.model_id);
    const double ratio = sphere_area(2 * d + 1) / sphere_area(2 * d);
    rec.results["sigma_boundary_closed_form_ratio"] = num(ratio, std::nullopt, std::nullopt, "closed_form");
    const bool differs = std::abs(ratio - r.sigma.value) > 1e-6 * r.sigma.value;
    rec.flags["sigma_ratio_discrepancy"] = differs;
    if (differs)
      rec.notes.push_back("sigma(boundary) from quadrature differs from the closed-form sphere-area ratio; "
                          "the quadrature value is used");
  }
  return rec;
}

CheckRecord check_spectral(const Scenario& sc, const std::string& out_dir) {
  CheckRecord rec;
  int d = 1;
  const SpectralCase c = spectral_case_of(sc, d);
  SpectralResult r = separated_eigensolve(c, d, sc.params.spectral_grid);
  rec.results["lambda1_extrapolated"] = num(r.extrapolated, std::nullopt, 1e-3, "extrapolated");
  rec.results["lambda1_finest"] = num(r.lambda.back(), std::nullopt, std::nullopt, "finite_volume");
  rec.results["lambda1_analytic"] = num(r.analytic, std::nullopt, std::nullopt, "closed_form");
  rec.results["extrapolation_error"] = num(r.extrapolation_error, std::nullopt, std::nullopt, "extrapolated");
  rec.results["cylindrical_residual"] = num(r.residual, std::nullopt, 1e-10, "closed_form");
  Json grids = Json::array();
  for (std::size_t i = 0; i < r.grids.size(); ++i) grids.push_back({{"nodes", r.grids[i]}, {"lambda1", r.lambda[i]}});
  rec.results["convergence"] = grids;
  rec.flags["case"] = to_string(c);
  rec.flags["d"] = d;
  rec.pass = std::abs(r.extrapolated - r.analytic) <= 1e-3 && r.residual < 1e-10;
  if (!out_dir.empty()) {
    const fs::path path = fs::path(out_dir) / (sc.name + ".spectral.csv");
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path.string());
    write_convergence_csv(f, r);
    files_written.push_back(path.string());
  }
  return rec;
}

CheckRecord check_carnot(const Scenario& sc, Execution exec) {
  const auto& p = sc.params;
  CheckRecord rec;
  auto cm = std::dynamic_pointer_cast<CarnotModel>(sc.model);
  const CarnotSpec& spec = cm->spec();
  CarnotBounds b = carnot_bounds(spec, *sc.domain, p.carnot_samples, p.carnot_boundary, sc.seed, exec);
  rec.results["diam_h_sampled"] = num(b.diameter.sampled, std::nullopt, std::nullopt, "sampled_supremum");
  rec.results["diam_h_lower"] = num(b.diameter.lower, std::nullopt, std::nullopt, "pattern_search");
  rec.results["diam_h_upper"] = num(b.diameter.upper, std::nullopt, std::nullopt, "pattern_search");
  rec.results["lambda1_bound"] = num(b.lambda1_bound, std::nullopt, std::nullopt, "pattern_search");
  rec.results["perimeter_bound"] = num(b.perimeter_bound, std::nullopt, std::nullopt, "pattern_search");
  rec.results["sigma_over_omega"] = est(b.sigma_over_omega, std::nullopt, "monte_carlo");
  if (b.lambda1_analytic_bound)
    rec.results["lambda1_bound_analytic"] = num(*b.lambda1_analytic_bound, std::nullopt, std::nullopt, "closed_form");
  rec.flags["perimeter_holds"] = b.perimeter_holds;
  rec.flags["bracket_generating"] = is_bracket_generating(spec);
  rec.notes.push_back("bounds use the upper diameter bracket; the bracket is heuristic (local refinement)");
  // associativity on random triples
  Rng rng = chunk_engine(sc.seed, 51, 0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Vec a = standard_normal(rng, spec.dim()), x = standard_normal(rng, spec.dim()), y = standard_normal(rng, spec.dim());
    worst = std::max(worst, (group_multiply(spec, group_multiply(spec, a, x), y) -
                             group_multiply(spec, a, group_multiply(spec, x, y)))
                                .norm());
  }
  rec.results["associativity_residual"] = num(worst, std::nullopt, 1e-12, "closed_form");
  rec.pass = b.perimeter_holds && worst < 1e-12;
  if (sc.domain->known.diam_r) {
    const double D = *sc.domain->known.diam_r;
    rec.results["diam_h_analytic"] = num(D, std::nullopt, 1e-3 * D, "closed_form");
    if (!(std::abs(b.diameter.lower - D) <= 1e-3 * D)) rec.pass = false;
  }
  return rec;
}

CheckRecord check_radii(const Scenario& sc, const std::string& out_dir) {
  const auto& p = sc.params;
  CheckRecord rec;
  auto pts = interior_points(sc, p.radii_points, 61);
  FiberScheme scheme;
  scheme.nodes = 32;
  scheme.mc_samples = 4000;
  scheme.seed = sc.seed;
  double worst = 0.0;
  std::ostringstream csv;
  csv.precision(17);
  const int m = sc.model->chart_dim();
  for (int i = 0; i < m; ++i) csv << "q_" << i + 1 << ',';
  csv << "inv_R_p,inv_r_p\n";
  for (const Vec& q : pts) {
    RadiiEntry e = radii(*sc.domain, q, p.radii_p, scheme, flow_of(sc), t_max_of(sc));
    for (int i = 0; i < m; ++i) csv << q(i) << ',';
    csv << e.inv_R_p.value << ',' << e.inv_r_p.value << '\n';
    worst = std::max(worst, e.inv_R_p.value - e.inv_r_p.value);
  }
  rec.results["max_inv_chord_minus_inv_exit"] = num(worst, std::nullopt, 1e-8, "quadrature");
  rec.flags["points"] = pts.size();
  rec.flags["p"] = p.radii_p;
  rec.pass = worst <= 1e-8;
  if (!out_dir.empty()) {
    const fs::path path = fs::path(out_dir) / (sc.name + ".radii.csv");
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path.string());
    f << csv.str();
    files_written.push_back(path.string());
  }
  return rec;
}

Json echo_config(const Config& cfg) {
  Json j = Json::object();
  for (const auto& [k, v] : cfg.values()) {
    auto scalar = [](const ConfigValue& x) {
      static const std::regex integer("^[+-]?[0-9]{1,18}$");
      if (x.kind != ConfigValue::Kind::Number) return Json(x.text);
      if (std::regex_match(x.text, integer)) return Json(std::stoll(x.text));
      return Json(x.number);
    };
    if (v.kind == ConfigValue::Kind::Array) {
      Json a = Json::array();
      for (const auto& it : v.items) a.push_back(scalar(it));
      j[k] = a;
    } else {
      j[k] = scalar(v);
    }
  }
  return j;
}

std::size_t count(const Config& cfg, const std::string& key, std::size_t fallback) {
  const std::int64_t v = cfg.get_int(key, static_cast<std::int64_t>(fallback));
  if (v <= 0)
    throw ConfigError(cfg.source() + ":" + std::to_string(cfg.values().at(key).line) + ": key '" + key +
                      "' must be positive");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::shared_ptr<Model> make_model(const std::string& id, const std::string& base_dir) {
  const ModelId m = split_id(id);
  if (m.name == "round-sphere") return make_round_sphere(int_arg(m, id));
  if (m.name == "chf") return make_chf(int_arg(m, id));
  if (m.name == "qhf") return make_qhf(int_arg(m, id));
  if (m.name == "heisenberg") return make_heisenberg(int_arg(m, id));
  if (m.name == "martinet") {
    if (!m.arg.empty()) throw ConfigError("martinet takes no argument");
    return std::make_shared<MartinetModel>();
  }
  if (m.name == "spherical-band") {
    const double eps = real_arg(m, id);
    if (!(eps > 0.0 && eps < 0.5 * kPi)) throw ConfigError("spherical-band needs 0 < eps < pi/2");
    return std::make_shared<SphericalBandModel>(eps);
  }
  if (m.name == "carnot-step2") {
    if (m.arg.empty()) throw ConfigError("carnot-step2 needs a spec file argument");
    fs::path path(m.arg);
    if (path.is_relative()) path = fs::path(base_dir) / path;
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open carnot spec '" + path.string() + "'");
    CarnotSpec spec = parse_carnot_spec(f);
    return std::make_shared<CarnotModel>(id, spec);
  }
  throw ConfigError("unknown model '" + id + "'");
}

Scenario build_scenario(const Config& cfg, const std::string& base_dir) {
  Scenario sc;
  sc.name = cfg.get_string("name");
  static const std::regex name_re("^[A-Za-z0-9_.\\-]+$");
  if (!std::regex_match(sc.name, name_re)) throw ConfigError(cfg.source() + ": name must be a plain file stem");
  sc.model_id = cfg.get_string("model");
  if (!cfg.has("seed")) throw ConfigError(cfg.source() + ": key 'seed' is required");
  sc.seed = cfg.get_u64("seed", 1);
  sc.checks = cfg.get_strings("checks", {});
  for (const auto& c : sc.checks)
    if (std::find(kKnownChecks.begin(), kKnownChecks.end(), c) == kKnownChecks.end())
      throw ConfigError(cfg.source() + ":" + std::to_string(cfg.values().at("checks").line) + ": unknown check '" + c +
                        "'");
  sc.domain_kind = cfg.get_string("domain", "none");

  auto& p = sc.params;
  p.t_max = cfg.get_number("t_max", 0.0);
  if (p.t_max < 0.0) throw ConfigError(cfg.source() + ": t_max must be >= 0");
  p.flow_rtol = cfg.get_number("flow_rtol", p.flow_rtol);
  if (!(p.flow_rtol > 0.0 && p.flow_rtol < 1e-2)) throw ConfigError(cfg.source() + ": flow_rtol must lie in (0, 1e-2)");
  p.flow_max_steps = count(cfg, "flow_max_steps", p.flow_max_steps);
  p.reduction_samples = count(cfg, "reduction_samples", p.reduction_samples);
  p.reduction_tol = cfg.get_number("reduction_tol", p.reduction_tol);
  p.expect_reduction = cfg.get_bool("expect_reduction", p.expect_reduction);
  p.santalo_samples = count(cfg, "santalo_samples", p.santalo_samples);
  p.santalo_functions = cfg.get_strings("santalo_functions", p.santalo_functions);
  p.expect_balance = cfg.get_bool("expect_balance", p.expect_balance);
  p.half_fiber_axis = static_cast<int>(cfg.get_int("half_fiber_axis", p.half_fiber_axis));
  p.visibility_points = count(cfg, "visibility_points", p.visibility_points);
  p.visibility_fiber = count(cfg, "visibility_fiber", p.visibility_fiber);
  p.expect_full_visibility = cfg.get_bool("expect_full_visibility", p.expect_full_visibility);
  p.hardy_samples = count(cfg, "hardy_samples", p.hardy_samples);
  p.test_function = cfg.get_string("test_function", p.test_function);
  p.bump_radius = cfg.get_number("bump_radius", p.bump_radius);
  p.bump_center = cfg.get_numbers("bump_center", {});
  p.p_values = cfg.get_numbers("p_values", p.p_values);
  for (double x : p.p_values)
    if (!(x > 1.0)) throw ConfigError(cfg.source() + ": p_values must exceed 1");
  p.lambda1_samples = count(cfg, "lambda1_samples", p.lambda1_samples);
  p.lambda1_l_tol = cfg.get_number("lambda1_l_tol", p.lambda1_l_tol);
  p.iso_boundary = count(cfg, "iso_boundary", p.iso_boundary);
  p.iso_points = count(cfg, "iso_points", p.iso_points);
  p.iso_fiber = count(cfg, "iso_fiber", p.iso_fiber);
  p.spectral_case = cfg.get_string("spectral_case", "");
  p.spectral_d = static_cast<int>(cfg.get_int("spectral_d", 0));
  p.spectral_grid = static_cast<int>(cfg.get_int("spectral_grid", p.spectral_grid));
  p.carnot_samples = count(cfg, "carnot_samples", p.carnot_samples);
  p.carnot_boundary = count(cfg, "carnot_boundary", p.carnot_boundary);
  p.radii_points = count(cfg, "radii_points", p.radii_points);
  p.radii_p = cfg.get_number("radii_p", p.radii_p);

  std::vector<double> box_lo = cfg.get_numbers("box_lo", {}), box_hi = cfg.get_numbers("box_hi", {});
  const double domain_eps = cfg.get_number("domain_eps", 0.1);
  const double ball_radius = cfg.get_number("ball_radius", 1.0);

  auto unused = cfg.unused_keys();
  if (!unused.empty())
    throw ConfigError(cfg.source() + ":" + std::to_string(cfg.values().at(unused.front()).line) + ": unknown key '" +
                      unused.front() + "'");

  try {
    sc.model = make_model(sc.model_id, base_dir);
    const std::string& dk = sc.domain_kind;
    if (dk == "hemisphere" || dk == "slab") {
      auto sm = std::dynamic_pointer_cast<SphereModel>(sc.model);
      if (!sm) throw ConfigError("domain '" + dk + "' needs a sphere model");
      if (dk == "hemisphere")
        sc.domain = std::make_shared<HemisphereDomain>(sm);
      else
        sc.domain = std::make_shared<SphereSlabDomain>(sm, domain_eps);
    } else if (dk == "box") {
      if (box_lo.empty() || box_hi.empty()) throw ConfigError("domain 'box' needs box_lo and box_hi");
      sc.domain = std::make_shared<BoxDomain>(sc.model, vec_of(box_lo), vec_of(box_hi));
    } else if (dk == "ball") {
      auto cm = std::dynamic_pointer_cast<CarnotModel>(sc.model);
      if (!cm) throw ConfigError("domain 'ball' needs a heisenberg model");
      sc.domain = std::make_shared<HeisenbergBallDomain>(cm, ball_radius);
    } else if (dk == "band") {
      auto bm = std::dynamic_pointer_cast<SphericalBandModel>(sc.model);
      if (!bm) throw ConfigError("domain 'band' needs the spherical-band model");
      sc.domain = std::make_shared<BandChartDomain>(bm);
    } else if (dk != "none") {
      throw ConfigError("unknown domain '" + dk + "' (hemisphere, slab, box, ball, band, none)");
    }
  } catch (const ConfigError& e) {
    throw ConfigError(cfg.source() + ": " + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(cfg.source() + ": " + e.what());
  }
  for (const auto& c : sc.checks) {
    if (c != "reduction" && c != "spectral" && !sc.domain)
      throw ConfigError(cfg.source() + ": check '" + c + "' needs a domain");
    if (c == "carnot" && !std::dynamic_pointer_cast<CarnotModel>(sc.model))
      throw ConfigError(cfg.source() + ": check 'carnot' needs a carnot model");
    if (c == "hardy" || c == "p-hardy" || (c == "santalo" && std::count(p.santalo_functions.begin(),
                                                                          p.santalo_functions.end(), "grad_sq")))
      make_test_function(sc);
    if (c == "santalo") santalo_functions(sc);
    if (c == "spectral") {
      int d = 0;
      spectral_case_of(sc, d);
    }
  }
  sc.config = echo_config(cfg);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  Config cfg = Config::load(path);
  return build_scenario(cfg, fs::path(path).parent_path().string().empty() ? "." : fs::path(path).parent_path().string());
}

RunOutcome run_scenario(const Scenario& sc, const RunOptions& opts) {
  Scenario s = sc;
  if (opts.seed) s.seed = *opts.seed;
  if (opts.threads > 0) set_thread_count(opts.threads);
  files_written.clear();
  if (!opts.out_dir.empty()) fs::create_directories(opts.out_dir);

  RunOutcome out;
  Json report;
  report["schema_version"] = "1.0";
  Json scen;
  scen["name"] = s.name;
  scen["model"] = s.model_id;
  scen["domain"] = s.domain_kind;
  scen["seed"] = s.seed;
  scen["checks"] = s.checks;
  scen["config"] = s.config;
  report["scenario"] = scen;
  Json checks = Json::array();
  Json times = Json::object();
  std::size_t passed = 0;
  for (const auto& name : s.checks) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckRecord rec;
    std::string error;
    try {
      if (name == "reduction") rec = check_reduction(s);
      else if (name == "santalo") rec = check_santalo(s, opts.exec);
      else if (name == "visibility") rec = check_visibility(s, opts.exec);
      else if (name == "hardy") rec = check_hardy(s, opts.exec, {2.0});
      else if (name == "p-hardy") rec = check_hardy(s, opts.exec, s.params.p_values);
      else if (name == "lambda1") rec = check_lambda1(s, opts.exec);
      else if (name == "isoperimetric") rec = check_isoperimetric(s, opts.exec);
      else if (name == "spectral") rec = check_spectral(s, opts.out_dir);
      else if (name == "carnot") rec = check_carnot(s, opts.exec);
      else if (name == "radii") rec = check_radii(s, opts.out_dir);
    } catch (const NumericError& e) {
      error = e.what();
      out.numeric_error = true;
    } catch (const SamplingError& e) {
      error = e.what();
      out.numeric_error = true;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Json c;
    std::string key = name;
    std::replace(key.begin(), key.end(), '-', '_');
    c["name"] = key;
    c["pass"] = error.empty() && rec.pass;
    c["results"] = rec.results;
    c["flags"] = rec.flags;
    c["notes"] = rec.notes;
    if (!error.empty()) c["error"] = error;
    checks.push_back(c);
    times[key] = secs;
    if (c["pass"].get<bool>()) ++passed;
  }
  report["checks"] = checks;
  out.pass = passed == s.checks.size();
  report["summary"] = {{"checks", s.checks.size()}, {"passed", passed}, {"pass", out.pass}};

  Json info;
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  info["timestamp"] = buf;
  info["wall_time_s"] = times;
  info["threads"] = thread_count();
  info["execution"] = opts.exec == Execution::Parallel ? "parallel" : "serial";
#ifdef __VERSION__
  info["compiler"] = __VERSION__;
#endif
  info["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                  std::to_string(EIGEN_MINOR_VERSION);
  report["run_info"] = info;

  if (!opts.out_dir.empty()) {
    const fs::path path = fs::path(opts.out_dir) / (s.name + ".json");
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path.string());
    f << report.dump(2) << '\n';
    files_written.insert(files_written.begin(), path.string());
  }
  out.files = files_written;
  out.report = std::move(report);
  return out;
}

std::string canonical_dump(const Json& report) {
  Json copy = report;
  copy.erase("run_info");
  return copy.dump(2);
}

}  // namespace srlab
