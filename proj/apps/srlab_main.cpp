#include "srlab/goldens.hpp"
#include "srlab/scenario.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

std::string default_out(const std::string& fallback) {
  const char* env = std::getenv("SRLAB_OUT_DIR");
  return env && *env ? env : fallback;
}

srlab::Json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw srlab::ConfigError("cannot open " + path);
  try {
    return srlab::Json::parse(f);
  } catch (const srlab::Json::parse_error& e) {
    throw srlab::ConfigError(path + ": " + e.what());
  }
}

// compares against a previous report (run_info ignored) or an expectations table
bool compare(const srlab::Json& report, const std::string& path) {
  const srlab::Json ref = read_json(path);
  if (ref.contains("expectations")) {
    auto fails = srlab::compare_expectations(report, ref);
    for (const auto& f : fails) std::cerr << "compare: " << f << '\n';
    std::cout << "compare " << path << ": " << (fails.empty() ? "match" : "MISMATCH") << '\n';
    return fails.empty();
  }
  srlab::Json a = report, b = ref;
  a.erase("run_info");
  b.erase("run_info");
  if (a == b) {
    std::cout << "compare " << path << ": identical\n";
    return true;
  }
  const auto patch = srlab::Json::diff(b, a);
  std::size_t shown = 0;
  for (const auto& op : patch) {
    if (++shown > 20) break;
    std::cerr << "compare: " << op.value("op", "") << ' ' << op.value("path", "") << '\n';
  }
  std::cout << "compare " << path << ": DIFFERENT (" << patch.size() << " changes)\n";
  return false;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"srlab: reduced sub-Riemannian geodesic checks"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a scenario file");
  std::string cfg_path, out_dir, compare_path;
  std::uint64_t seed = 0;
  int threads = 0;
  bool serial = false;
  run->add_option("config", cfg_path, "scenario file")->required();
  run->add_option("--out", out_dir, "output directory (default $SRLAB_OUT_DIR or ./srlab-out)");
  auto* seed_opt = run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--threads", threads, "OpenMP threads")->check(CLI::PositiveNumber);
  run->add_option("--compare", compare_path, "previous report or expectations table");
  run->add_flag("--serial", serial, "use the serial kernels");

  auto* gold = app.add_subcommand("emit-goldens", "write the reference scenarios and expected tables");
  bool force = false, list = false;
  std::string gold_dir;
  gold->add_flag("--force", force, "overwrite existing files");
  gold->add_flag("--list", list, "print scenario names only");
  gold->add_option("--out", gold_dir, "target directory (default $SRLAB_OUT_DIR or ./goldens)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gold) {
      if (list) {
        for (const auto& g : srlab::golden_bundle()) std::cout << g.name << '\n';
        return kExitPass;
      }
      for (const auto& f : srlab::emit_goldens(gold_dir.empty() ? default_out("goldens") : gold_dir, force))
        std::cout << f << '\n';
      return kExitPass;
    }

    srlab::Scenario sc = srlab::load_scenario(cfg_path);
    srlab::RunOptions opts;
    if (*seed_opt) opts.seed = seed;
    opts.threads = threads;
    opts.exec = serial ? srlab::Execution::Serial : srlab::Execution::Parallel;
    opts.out_dir = out_dir.empty() ? default_out("srlab-out") : out_dir;
    srlab::RunOutcome res = srlab::run_scenario(sc, opts);

    for (const auto& c : res.report.at("checks")) {
      std::cout << (c.at("pass").get<bool>() ? "PASS " : "FAIL ") << c.at("name").get<std::string>();
      if (c.contains("error")) std::cout << "  error: " << c.at("error").get<std::string>();
      std::cout << '\n';
    }
    for (const auto& f : res.files) std::cout << "wrote " << f << '\n';
    bool ok = res.pass;
    if (!compare_path.empty()) ok = compare(res.report, compare_path) && ok;
    if (res.numeric_error) return kExitNumeric;
    return ok ? kExitPass : kExitFail;
  } catch (const srlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const srlab::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const srlab::SamplingError& e) {
    std::cerr << "sampling error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const srlab::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}
