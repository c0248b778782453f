#include "fbheat/catalog.hpp"
#include "fbheat/errors.hpp"
#include "fbheat/expcli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fbheat;

namespace {

constexpr int kUsageError = 2;

struct RunArgs {
  std::vector<std::string> scenarios;
  std::string out = "runs";
  int resolution = 0;
  int jobs = 1;
  bool strict = false;
  std::vector<std::string> only;
};

void add_run_flags(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--scenario", a.scenarios, "Scenario file (repeatable)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", a.out, "Run directory root");
  cmd->add_option("--resolution", a.resolution, "Grid points override (radial points or points per axis)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--jobs", a.jobs, "Scenarios run concurrently")->check(CLI::PositiveNumber);
  cmd->add_flag("--strict", a.strict, "Fail on any tolerance breach, not only declared expectations");
}

std::string status_line(const RunManifest& m) {
  std::ostringstream os;
  os << (m.expectations_met ? (m.all_pass ? "PASS " : "PASS*") : "FAIL ") << ' ' << m.scenario << "  ["
     << m.run_dir << "]";
  for (const auto& c : m.checks)
    os << "\n    " << (c.pass ? "ok  " : "FAIL") << ' ' << c.name << (c.expectation ? "" : " (informational)")
       << ": " << c.detail;
  return os.str();
}

int run_many(const RunArgs& a, std::vector<std::string> only) {
  std::vector<Scenario> scenarios;
  for (const auto& path : a.scenarios) {
    try {
      Scenario s = load_scenario(path);
      validate_or_throw(s);
      scenarios.push_back(std::move(s));
    } catch (const ValidationError& e) {
      std::cerr << path << ": " << e.what() << '\n';
      return kUsageError;
    }
  }
  RunOptions opt;
  opt.out = a.out;
  if (a.resolution > 0) opt.resolution = a.resolution;
  opt.jobs = a.jobs;
  opt.strict = a.strict;
  opt.only = std::move(only);

  std::vector<std::optional<RunManifest>> results(scenarios.size());
  std::vector<std::string> errors(scenarios.size());
  std::atomic<size_t> next{0};
  std::mutex print;
  auto worker = [&] {
    for (size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        results[i] = run_scenario(scenarios[i], opt);
        std::lock_guard lock(print);
        std::cout << status_line(*results[i]) << std::endl;
      } catch (const std::exception& e) {
        errors[i] = e.what();
        std::lock_guard lock(print);
        std::cerr << "ERROR " << scenarios[i].name << ": " << e.what() << std::endl;
      }
    }
  };
  const int n = std::max(1, std::min<int>(a.jobs, static_cast<int>(scenarios.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<RunManifest> done;
  bool failed = false;
  for (size_t i = 0; i < results.size(); ++i) {
    if (results[i]) done.push_back(*results[i]);
    else failed = true;
  }
  fs::create_directories(a.out);
  std::ofstream(fs::path(a.out) / "summary.csv") << summary_csv(done);
  if (failed) return 1;
  return exit_code(done, a.strict);
}

GridSpec radial_grid(int d, double r_max, int points, double r_min_factor) {
  return GridSpec::radial(d, r_max, points, r_min_factor);
}

int report(const std::vector<std::string>& dirs) {
  std::vector<std::string> manifests;
  for (const auto& d : dirs) {
    const fs::path p(d);
    if (fs::exists(p / "manifest.json")) {
      manifests.push_back((p / "manifest.json").string());
      continue;
    }
    if (!fs::is_directory(p)) {
      std::cerr << d << ": not a run directory\n";
      return kUsageError;
    }
    std::vector<std::string> found;
    for (const auto& e : fs::directory_iterator(p))
      if (fs::exists(e.path() / "manifest.json")) found.push_back((e.path() / "manifest.json").string());
    std::sort(found.begin(), found.end());
    manifests.insert(manifests.end(), found.begin(), found.end());
  }
  if (manifests.empty()) {
    std::cerr << "no manifests found\n";
    return kUsageError;
  }
  bool ok = true;
  for (const auto& m : manifests) {
    std::ifstream in(m);
    const json j = json::parse(in);
    const bool met = j.at("expectations_met").get<bool>();
    ok = ok && met;
    std::cout << (met ? "PASS " : "FAIL ") << j.at("scenario").get<std::string>() << "  "
              << j.at("scenario_hash").get<std::string>().substr(0, 12) << '\n';
    for (const auto& c : j.at("checks"))
      std::cout << "    " << (c.at("pass").get<bool>() ? "ok  " : "FAIL") << ' ' << c.at("name").get<std::string>()
                << ": " << c.at("detail").get<std::string>() << '\n';
    if (!j.at("ledger").is_null()) {
      const auto& l = j.at("ledger");
      std::cout << "    ledger: delta_a " << l.at("delta_a") << ", p_c " << l.at("p_c") << ", beta* "
                << l.at("beta_star") << ", c4 " << l.at("c4") << ", beta " << l.at("beta") << '\n';
    }
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat-kernel laboratory for drift-diffusion operators with form-bounded drift"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run scenarios end to end and persist their artifacts");
  add_run_flags(run, run_args);
  run->add_option("--only", run_args.only, "Restrict the pipeline to these checks (repeatable)");

  RunArgs fit_args;
  auto* fit = app.add_subcommand("fit-bounds", "Fit the lower and upper Gaussian envelopes of a scenario");
  add_run_flags(fit, fit_args);

  RunArgs nash_args;
  auto* nash = app.add_subcommand("nash", "Nash entropy and moment diagnostics of a scenario");
  add_run_flags(nash, nash_args);

  std::string fb_drift;
  double fb_c = 0.0, fb_rmax = 100.0, fb_rmin = 1e-2;
  int fb_points = 256, fb_levels = 3;
  auto* fb = app.add_subcommand("estimate-formbound", "Form-bound delta of a catalogued drift");
  fb->add_option("--drift", fb_drift, "Drift id, e.g. hardy:d=3,delta=0.25,sign=+")->required();
  fb->add_option("--c", fb_c, "Compensating constant c(delta)");
  fb->add_option("--points", fb_points, "Radial points on the first level");
  fb->add_option("--r-max", fb_rmax, "Outer radius");
  fb->add_option("--r-min-factor", fb_rmin, "Inner radius as a fraction of the outer one");
  fb->add_option("--levels", fb_levels, "Refinement levels")->check(CLI::PositiveNumber);

  std::string k_pot;
  double k_lambda = 0.0, k_rmax = 4.0, k_rmin = 1e-3;
  int k_points = 512;
  auto* kato = app.add_subcommand("estimate-kato", "Kato norm of a catalogued potential");
  kato->add_option("--potential", k_pot, "Potential id, e.g. indicator-ball:d=3")->required();
  kato->add_option("--lambda", k_lambda, "Resolvent parameter");
  kato->add_option("--points", k_points, "Radial points");
  kato->add_option("--r-max", k_rmax, "Outer radius");
  kato->add_option("--r-min-factor", k_rmin, "Inner radius as a fraction of the outer one");

  std::string m_drift;
  std::vector<double> m_eps{1.0, 0.1, 0.01};
  auto* moll = app.add_subcommand("mollify", "Check the preservation claims of E_eps b");
  moll->add_option("--drift", m_drift, "Drift id")->required();
  moll->add_option("--eps", m_eps, "Mollification parameters (repeatable)");

  ConstantInputs c_in;
  std::vector<double> cr;
  double cr_m1 = 1.0, cr_m2 = 1.0;
  auto* consts = app.add_subcommand("constants", "Constant ledger and Coulhon-Raynaud extrapolation");
  consts->add_option("--d", c_in.d, "Dimension");
  consts->add_option("--sigma", c_in.sigma, "Lower ellipticity constant");
  consts->add_option("--xi", c_in.xi, "Upper ellipticity constant");
  consts->add_option("--delta", c_in.delta, "Form-bound delta");
  consts->add_option("--c-delta", c_in.c_delta, "c(delta)");
  consts->add_option("--nu", c_in.nu, "Kato relative bound");
  consts->add_option("--lambda", c_in.lambda, "Kato lambda");
  consts->add_option("--c-n", c_in.c_n, "Nash constant");
  consts->add_option("--c-plus", c_in.c_plus, "Measured moment bound c_+");
  consts->add_option("--c-hat", c_in.c_hat, "Integral-bound constant");
  consts->add_option("--r", c_in.r, "Exponent r > 2 in c(beta)");
  consts->add_option("--coulhon-raynaud", cr, "Exponents p q r (r may be inf)")->expected(3);
  consts->add_option("--m1", cr_m1, "L^p stability constant M1");
  consts->add_option("--m2", cr_m2, "L^q -> L^r smoothing constant M2");

  std::vector<std::string> report_dirs;
  auto* rep = app.add_subcommand("report", "Summarize persisted runs");
  rep->add_option("dirs", report_dirs, "Run directories or run roots")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_many(run_args, run_args.only);
    if (*fit) return run_many(fit_args, {"fit"});
    if (*nash) return run_many(nash_args, {"nash"});
    if (*fb) {
      const DriftField b = drift_from_id(fb_drift);
      FormBoundOptions o;
      o.levels = fb_levels;
      std::cout << to_json(estimate_form_bound(b, fb_c, radial_grid(b.dim(), fb_rmax, fb_points, fb_rmin), o)) << '\n';
      return 0;
    }
    if (*kato) {
      const ScalarField v = scalar_from_id(k_pot);
      std::cout << to_json(estimate_kato_norm(v, k_lambda, radial_grid(v.dim(), k_rmax, k_points, k_rmin))) << '\n';
      return 0;
    }
    if (*moll) {
      const auto r = verify_preservation(drift_from_id(m_drift), m_eps);
      std::cout << to_json(r) << '\n';
      return r.all_pass() ? 0 : 1;
    }
    if (*consts) {
      c_in.c_n_source = "command line";
      json out = json::parse(to_json(proof_constants(c_in)));
      if (!cr.empty()) {
        const auto x = coulhon_raynaud(cr[0], cr[1], cr[2], c_in.nu, cr_m1, cr_m2);
        out["coulhon_raynaud"] = {{"p", cr[0]}, {"q", cr[1]}, {"r", std::isinf(cr[2]) ? json("inf") : json(cr[2])},
                                  {"beta", x.beta}, {"exponent", x.exponent}, {"M", x.m}};
      }
      std::cout << out.dump(2) << '\n';
      return 0;
    }
    if (*rep) return report(report_dirs);
  } catch (const ValidationError& e) {
    std::cerr << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
