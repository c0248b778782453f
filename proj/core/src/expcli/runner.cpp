#include "fbheat/catalog.hpp"
#include "fbheat/errors.hpp"
#include "fbheat/expcli.hpp"
#include "fbheat/gaussian.hpp"
#include "json_detail.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace fbheat {

using detail::json;
namespace fs = std::filesystem;

namespace {

constexpr int kSeriesSteps = 20;

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

bool wants(const Scenario& s, const RunOptions& opt, const std::string& check) {
  if (std::find(s.checks.begin(), s.checks.end(), check) == s.checks.end()) return false;
  return opt.only.empty() || std::find(opt.only.begin(), opt.only.end(), check) != opt.only.end();
}

class Recorder {
 public:
  Recorder(RunManifest& m, fs::path dir) : m_(m), dir_(std::move(dir)) {}

  void event(const std::string& e) { m_.events.push_back({static_cast<long>(m_.events.size()), e}); }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw Error("cannot write artifact '" + (dir_ / name).string() + "'");
    out << content;
    m_.artifacts.push_back(name);
    event("artifact " + name);
  }

  void write_binary(const std::string& name, const Vec& v) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw Error("cannot write artifact '" + (dir_ / name).string() + "'");
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    m_.artifacts.push_back(name);
    event("artifact " + name);
  }

  void check(CheckResult c) {
    if (!c.pass) m_.all_pass = false;
    if (c.expectation && !c.pass) m_.expectations_met = false;
    event("check " + c.name + (c.pass ? " pass" : " fail"));
    m_.checks.push_back(std::move(c));
  }

  template <class F>
  auto timed(const std::string& stage, F&& f) {
    event("begin " + stage);
    const auto t0 = std::chrono::steady_clock::now();
    auto finish = [&] {
      timing_[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      event("end " + stage);
    };
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      finish();
    } else {
      auto r = f();
      finish();
      return r;
    }
  }

  const json& timing() const { return timing_; }

 private:
  RunManifest& m_;
  fs::path dir_;
  json timing_ = json::object();
};

Vec source_point(const Scenario& s, int d) {
  Vec x = Vec::Zero(d);
  for (int i = 0; i < d && i < static_cast<int>(s.source.size()); ++i) x[i] = s.source[i];
  return x;
}

GridSpec make_grid(const Scenario& s, const RunOptions& opt, const ParabolicProblem& pb, const Vec& x) {
  const int d = pb.b.dim();
  const bool radial = s.grid.kind == "radial";
  int points = opt.resolution.value_or(s.grid.points);
  if (points <= 0) points = radial ? 1024 : 40;
  double extent = s.grid.extent;
  if (!(extent > 0.0)) extent = s.grid.box_factor * suggest_box_half_width(pb, s.t - s.s);
  if (radial) return GridSpec::radial(d, extent, points, s.grid.r_min_factor);
  std::vector<double> lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = x[i] - extent;
    hi[i] = x[i] + extent;
  }
  return GridSpec::cartesian(lo, hi, std::vector<int>(d, points));
}

GridSpec nash_refinement(const GridSpec& g) {
  if (g.is_radial()) return g.refined();
  std::vector<int> pts = g.points;
  for (auto& p : pts) p = p * 3 / 2;
  return GridSpec::cartesian(g.lower, g.upper, pts);
}

std::vector<double> series_taus(double tau) {
  std::vector<double> out;
  for (int k = 2; k <= kSeriesSteps; ++k) out.push_back(tau * k / kSeriesSteps);
  return out;
}

std::vector<HeatKernelEstimate> fit_family(const std::vector<HeatKernelEstimate>& series) {
  std::vector<HeatKernelEstimate> out;
  for (int k : {5, 10, 15, 20}) out.push_back(series[k - 2]);
  return out;
}

SideResult try_fit(const std::vector<HeatKernelEstimate>& family, Side side, double sigma, double xi,
                   const std::vector<Vec>& singular, json& record) {
  SideResult r;
  try {
    BoundFit f = fit_bound(family, side, sigma, xi, singular);
    r.outcome = FitOutcome::Feasible;
    record = detail::fit_json(f);
    record["outcome"] = "feasible";
    record["envelope_holds"] = envelope_holds(f, family, singular);
    r.fit = f;
  } catch (const InfeasibleFit& e) {
    r.outcome = FitOutcome::Infeasible;
    record = {{"outcome", "infeasible"},
              {"side", to_string(side)},
              {"reason", e.what()},
              {"worst", detail::sample_json(e.worst())},
              {"singular_slope", e.slope()}};
  }
  return r;
}

/// Kernel cross-section next to the fitted envelopes.
std::string envelope_csv(const std::vector<HeatKernelEstimate>& family, const SideResult& lower,
                         const SideResult& upper, const Vec& x) {
  std::ostringstream os;
  os << "tau,offset,u,k_unit,lower,upper\n";
  for (const auto& k : family) {
    const Mesh& mesh = *k.values.mesh;
    const double tau = k.t - k.s;
    const int d = mesh.dim();
    const double rmax = 6.0 * std::sqrt(tau * std::max(1.0, upper.fit ? upper.fit->xi : 1.0));
    std::vector<int> anchor;
    if (!mesh.radial()) anchor = mesh.multi_index(mesh.nearest(x));
    for (Index i = 0; i < mesh.size(); ++i) {
      double offset;
      if (mesh.radial()) {
        offset = mesh.radius(i);
      } else {
        const auto mi = mesh.multi_index(i);
        bool on_line = true;
        for (int j = 1; j < d; ++j) on_line = on_line && mi[j] == anchor[j];
        if (!on_line) continue;
        offset = mesh.coordinate(i, 0) - x[0];
      }
      if (std::abs(offset) > rmax) continue;
      const double r2 = offset * offset;
      os << fmt(tau) << ',' << fmt(offset) << ',' << fmt(k.values.values[i]) << ','
         << fmt(gaussian_kernel_r2(1.0, tau, r2, d)) << ',';
      if (lower.fit)
        os << fmt(lower.fit->multiplier * gaussian_kernel_r2(lower.fit->scale, tau, r2, d) *
                  std::exp(-lower.fit->rate * tau));
      os << ',';
      if (upper.fit)
        os << fmt(upper.fit->multiplier * gaussian_kernel_r2(upper.fit->scale, tau, r2, d) *
                  std::exp(upper.fit->rate * tau));
      os << '\n';
    }
  }
  return os.str();
}

std::string nash_csv(const std::vector<std::pair<std::string, NashDiagnostics>>& runs) {
  std::ostringstream os;
  os << "grid,tau,Q,M,Q_tilde,Q_minus_Q_tilde,M_over_sqrt_tau,expQd_over_M\n";
  for (const auto& [label, n] : runs)
    for (size_t i = 0; i < n.taus.size(); ++i)
      os << label << ',' << fmt(n.taus[i]) << ',' << fmt(n.q[i]) << ',' << fmt(n.m[i]) << ',' << fmt(n.q_tilde[i])
         << ',' << fmt(n.q[i] - n.q_tilde[i]) << ',' << fmt(n.m[i] / std::sqrt(n.taus[i])) << ','
         << fmt(n.entropy_moment.ratios[i]) << '\n';
  return os.str();
}

double relative_change(double fine, double coarse) {
  return std::abs(fine - coarse) / std::max(std::abs(fine), 1e-300);
}

std::string describe(const ComparisonReport& r) {
  std::ostringstream os;
  os << r.violations << " violations over " << r.cells << " cells, worst excess " << r.worst_excess
     << ", tolerance " << r.tolerance;
  return os.str();
}

}  // namespace

RunManifest run_scenario(const Scenario& s, const RunOptions& opt) {
  validate_or_throw(s);
  std::string material = canonical_json(s);
  if (opt.resolution) material += "|resolution=" + std::to_string(*opt.resolution);
  if (!opt.only.empty()) {
    material += "|only=";
    for (const auto& c : opt.only) material += c + ";";
  }
  RunManifest man;
  man.scenario = s.name;
  man.scenario_hash = sha256_hex(material);
  const fs::path dir = fs::path(opt.out) / (s.name + "-" + man.scenario_hash.substr(0, 12));
  fs::create_directories(dir);
  man.run_dir = dir.string();
  Recorder rec(man, dir);
  rec.event("validated " + to_string(s.regime));

  const DriftField b = drift_from_id(s.drift);
  const DiffusionMatrix a = matrix_from_id(s.matrix);
  const int d = b.dim();
  const double sigma = a.sigma(), xi = a.xi();
  const double tau = s.t - s.s;
  const auto& meta = b.meta();
  const Vec x = source_point(s, d);
  const std::vector<Vec> singular = meta.singular_points;

  ParabolicProblem pb{a, b, Variant::Lambda, 2.0, {}, {}, {}};
  if (s.solve_epsilon) {
    pb.b = rec.timed("mollify", [&] { return mollify_drift(b, *s.solve_epsilon); });
  }
  SolverConfig cfg;
  cfg.scheme = s.scheme == "crank-nicolson" ? Scheme::CrankNicolson : Scheme::BackwardEuler;
  cfg.grid = make_grid(s, opt, pb, x);
  rec.event("grid " + detail::grid_json(cfg.grid).dump());

  json fits = json::object();
  json summary = {{"scenario", s.name}, {"regime", to_string(s.regime)}, {"scheme", to_string(cfg.scheme)}};

  const bool need_series = wants(s, opt, "fit") || wants(s, opt, "weight") || wants(s, opt, "growth") ||
                           wants(s, opt, "halving") || wants(s, opt, "nash") || wants(s, opt, "conservation");
  std::vector<HeatKernelEstimate> series;
  if (need_series) {
    series = rec.timed("solve lambda", [&] { return estimate_kernel_series(pb, s.s, series_taus(tau), x, cfg); });
    int idx = 0;
    for (const auto& k : fit_family(series)) {
      const std::string stem = "slice_" + std::to_string(idx++);
      rec.write_binary(stem + ".bin", k.values.values);
      json side = {{"tau", k.t - k.s},
                   {"s", k.s},
                   {"t", k.t},
                   {"source", std::vector<double>(k.source.data(), k.source.data() + k.source.size())},
                   {"direction", to_string(k.direction)},
                   {"variant", to_string(k.variant)},
                   {"scheme", k.scheme},
                   {"tau0", k.tau0},
                   {"mass", k.mass},
                   {"sup_constant", k.sup_constant},
                   {"grid", detail::grid_json(k.grid)},
                   {"dtype", "float64-le"},
                   {"count", k.values.values.size()}};
      const Mesh& mesh = *k.values.mesh;
      if (mesh.radial()) {
        std::vector<double> radii(mesh.size());
        for (Index i = 0; i < mesh.size(); ++i) radii[i] = mesh.radius(i);
        side["radii"] = radii;
      }
      rec.write(stem + ".json", side.dump(2));
    }
  }

  if (wants(s, opt, "conservation")) {
    double worst = 0.0;
    for (const auto& k : series) worst = std::max(worst, std::abs(k.row_mass.value_or(k.mass) - 1.0));
    rec.check({"conservation", worst <= 1e-3, true, "max |row mass - 1| = " + fmt(worst)});
  }

  SideResult lower, upper;
  if (wants(s, opt, "fit")) {
    const auto family = fit_family(series);
    json lj, uj;
    rec.timed("fit", [&] {
      lower = try_fit(family, Side::Lower, sigma, xi, singular, lj);
      upper = try_fit(family, Side::Upper, sigma, xi, singular, uj);
    });
    fits["lower"] = lj;
    fits["upper"] = uj;
    for (auto [side, res, expected, j] :
         {std::tuple{Side::Lower, &lower, s.expect.lower_feasible, &lj},
          std::tuple{Side::Upper, &upper, s.expect.upper_feasible, &uj}}) {
      const bool feasible = res->outcome == FitOutcome::Feasible;
      res->expected_infeasible = expected && !*expected;
      CheckResult c{"fit-" + to_string(side), true, expected.has_value(), to_string(res->outcome)};
      if (expected) c.pass = feasible == *expected;
      if (feasible) {
        const bool holds = (*j)["envelope_holds"].get<bool>();
        c.pass = c.pass && holds;
        c.detail += " (" + fmt(res->fit->multiplier) + ", " + fmt(res->fit->scale) + ", " + fmt(res->fit->rate) +
                    ")" + (holds ? "" : ", envelope violated");
      } else {
        c.detail += ": " + (*j)["reason"].get<std::string>();
      }
      rec.check(c);
    }
    rec.write("envelope.csv", envelope_csv(family, lower, upper, x));
  }

  std::ostringstream weight_rows;
  weight_rows << "kind,radius,ratio\n";
  bool weight_rows_used = false;
  const double root = std::sqrt(tau);
  const double kappa = std::sqrt(meta.delta) * (d - 2) / (2.0 * sigma);
  if (wants(s, opt, "weight")) {
    const double theory = meta.sign == DivergenceSign::Nonpositive ? -kappa : kappa;
    CheckResult c{"weight", false, s.expect.weight_exponent.has_value(), ""};
    try {
      const WeightProfile w = rec.timed("weight", [&] {
        return fit_weight_exponent(series.back(), s.weight_r_lo * root, s.weight_r_hi * root, 1.0, theory);
      });
      rec.write("weight.json", detail::weight_json(w).dump(2));
      for (size_t i = 0; i < w.radii.size(); ++i)
        weight_rows << "weight," << fmt(w.radii[i]) << ',' << fmt(w.ratios[i]) << '\n';
      weight_rows_used = true;
      fits["weight"] = {{"exponent", w.exponent}, {"theoretical", theory}};
      c.detail = "p_hat = " + fmt(w.exponent) + ", theory " + fmt(theory);
      if (s.expect.weight_exponent) {
        const double target = *s.expect.weight_exponent;
        const double band = target == 0.0 ? s.expect.weight_tolerance : s.expect.weight_tolerance * std::abs(target);
        c.pass = std::abs(w.exponent - target) <= band;
      } else {
        c.pass = true;
      }
    } catch (const CheckFailure& e) {
      c.detail = e.what();
    }
    rec.check(c);
  }

  if (wants(s, opt, "growth")) {
    const GrowthReport g = rec.timed("growth", [&] {
      return counterexample_growth(series.back(), 4.0 * xi, s.weight_r_lo * root, 0.5 * root);
    });
    for (size_t i = 0; i < g.radii.size(); ++i)
      weight_rows << "growth," << fmt(g.radii[i]) << ',' << fmt(g.ratios[i]) << '\n';
    weight_rows_used = true;
    fits["growth"] = {{"power", g.power}, {"decades", g.decades}, {"mu", 4.0 * xi}};
    rec.check({"growth", g.power > 0.0 && g.decades >= 1.0, s.regime == Regime::CounterexampleUgb,
               "max u/k_{4 xi} ~ r^-" + fmt(g.power) + " over " + fmt(g.decades) + " decades"});
  }

  if (wants(s, opt, "halving")) {
    const HalvingReport h = rec.timed("halving", [&] { return ratio_under_halving(series.back(), 1.0, 0.5 * root); });
    for (size_t i = 0; i < h.radii.size(); ++i)
      weight_rows << "halving," << fmt(h.radii[i]) << ',' << fmt(h.ratios[i]) << '\n';
    weight_rows_used = true;
    fits["halving"] = {{"radii", h.radii}, {"ratios", h.ratios}, {"decreasing", h.decreasing}};
    rec.check({"halving", h.decreasing, s.regime == Regime::CounterexampleLgb,
               std::to_string(h.radii.size()) + " halvings, decreasing = " + (h.decreasing ? "yes" : "no")});
  }
  if (weight_rows_used) rec.write("weight.csv", weight_rows.str());

  // Ledger inputs that do not depend on measurements.
  ConstantInputs in;
  in.d = d;
  in.sigma = sigma;
  in.xi = xi;
  in.delta = meta.delta;
  in.c_delta = meta.c_delta;
  if (const auto& k = meta.kato_div_abs ? meta.kato_div_abs : meta.kato_div_plus) {
    in.nu = k->nu;
    in.lambda = k->lambda;
  }
  if (s.c_n) {
    in.c_n = *s.c_n;
    in.c_n_source = "scenario";
  } else {
    const auto mesh = make_mesh(cfg.grid);
    in.c_n = rec.timed("calibrate c_N", [&] { return calibrate_nash_constant(*mesh); });
    in.c_n_source = "calibrated";
  }
  const double beta_star = proof_constants(in).beta_star;

  if (wants(s, opt, "nash")) {
    CheckResult c{"nash", false, true, ""};
    try {
      std::vector<std::pair<std::string, NashDiagnostics>> runs;
      runs.emplace_back("base", rec.timed("nash", [&] { return nash_diagnostics(series, beta_star); }));
      const NashDiagnostics& n = runs.front().second;
      in.c_plus = n.c_plus;
      json nj = {{"base", detail::nash_json(n)}, {"base_grid", detail::grid_json(cfg.grid)}};
      std::ostringstream detail;
      detail << "C_NEE " << n.c_nee << ", M/sqrt(t-s) in [" << n.c_minus << ", " << n.c_plus << "], e^{Q/d}/M <= "
             << n.entropy_moment.sup;
      c.pass = n.c_minus > 0.0 && std::isfinite(n.c_plus) && n.entropy_moment.finite;
      if (s.nash_refine) {
        SolverConfig fine = cfg;
        fine.grid = nash_refinement(cfg.grid);
        const auto fs_series =
            rec.timed("solve lambda refined", [&] { return estimate_kernel_series(pb, s.s, series_taus(tau), x, fine); });
        runs.emplace_back("refined", nash_diagnostics(fs_series, beta_star));
        const NashDiagnostics& r = runs.back().second;
        const double dq = relative_change(r.c_nee, n.c_nee);
        const double dc = relative_change(r.entropy_moment.sup, n.entropy_moment.sup);
        nj["refined"] = detail::nash_json(r);
        nj["refined_grid"] = detail::grid_json(fine.grid);
        nj["stability"] = {{"C_NEE", dq}, {"entropy_moment", dc}};
        detail << "; refinement changes C_NEE by " << dq << ", e^{Q/d}/M by " << dc;
        c.pass = c.pass && dq <= 0.1 && dc <= 0.1 && r.c_minus > 0.0;
      }
      c.detail = detail.str();
      rec.write("nash.json", nj.dump(2));
      rec.write("nash.csv", nash_csv(runs));
    } catch (const CheckFailure& e) {
      c.detail = e.what();
    }
    rec.check(c);
  }

  if (wants(s, opt, "domination")) {
    const auto reps = rec.timed("domination", [&] {
      ParabolicProblem star = pb;
      star.variant = Variant::LambdaStar;
      const auto ku = estimate_kernel(pb, s.s, s.t, x, cfg);
      const auto ks = estimate_kernel(star, s.s, s.t, x, cfg);
      return meta.sign == DivergenceSign::Nonnegative ? domination_check(ks, ku, cfg.solver_tolerance)
                                                      : domination_check(ku, ks, cfg.solver_tolerance);
    });
    rec.check({"domination", reps.pass, true,
               std::string(meta.sign == DivergenceSign::Nonnegative ? "u_* <= u: " : "u <= u_*: ") + describe(reps)});
  }

  if (wants(s, opt, "sandwich")) {
    const double p = s.sandwich_p;
    const auto rep = rec.timed("sandwich", [&] {
      ParabolicProblem h1 = pb, hp = pb;
      h1.variant = Variant::Hminus;
      hp.variant = Variant::HminusPprime;
      hp.p_prime = p / (p - 1.0);
      const auto ku = estimate_kernel(pb, s.s, s.t, x, cfg);
      const auto k1 = estimate_kernel(h1, s.s, s.t, x, cfg);
      const auto kp = estimate_kernel(hp, s.s, s.t, x, cfg);
      return sandwich_check(k1, ku, kp, p, cfg.solver_tolerance);
    });
    rec.check({"sandwich", rep.pass, true, "p = " + fmt(p) + ": " + describe(rep)});
  }

  if (wants(s, opt, "preservation")) {
    const auto rep = rec.timed("preservation", [&] { return verify_preservation(b, s.epsilons); });
    rec.write("preservation.json", detail::preservation_json(rep).dump(2));
    std::string first;
    for (const auto& r : rep.results)
      if (!r.pass && !r.skipped && first.empty()) first = r.claim + " at eps = " + fmt(r.epsilon);
    rec.check({"preservation", rep.all_pass(), true,
               rep.all_pass() ? std::to_string(rep.results.size()) + " claims hold" : "fails: " + first});
  }

  if (wants(s, opt, "lp-decay")) {
    CheckResult c{"lp-decay", false, true, ""};
    const auto mesh = make_mesh(cfg.grid);
    const double delta_a = meta.delta / (sigma * sigma);
    const double p = delta_a > 0.0 ? std::max(2.0, 2.0 / (2.0 - std::sqrt(delta_a))) : 2.0;
    const GridFunction f{mesh, dirac_approximation(*mesh, x, 0.05 * tau)};
    const auto rep = rec.timed("lp-decay", [&] { return lp_decay_check(pb, f, p, tau, cfg); });
    c.pass = rep.pass;
    c.detail = "p = " + fmt(p) + ", worst excess " + fmt(rep.worst_excess);
    rec.check(c);
  }

  if (!series.empty()) {
    double c_hat = 0.0;
    for (const auto& k : series) c_hat = std::max(c_hat, k.sup_constant);
    in.c_hat = c_hat;
  }
  const ConstantLedger ledger = proof_constants(in);
  man.ledger_json = to_json(ledger, 2);
  rec.write("ledger.json", man.ledger_json);

  if (wants(s, opt, "fit")) {
    TheoryInputs th;
    th.sign = meta.sign;
    th.zero_drift = meta.delta == 0.0 && meta.c_delta == 0.0;
    th.div_plus_kato = meta.kato_div_plus.has_value() || meta.sign == DivergenceSign::Nonpositive;
    th.div_abs_kato = meta.kato_div_abs.has_value();
    const TheoryReport tr = theory_vs_fit(ledger, th, lower, upper);
    json rows = json::array();
    for (const auto& r : tr.rows)
      rows.push_back({{"side", to_string(r.side)},
                      {"guaranteed", r.guaranteed},
                      {"reason", r.reason},
                      {"outcome", to_string(r.outcome)},
                      {"expected_infeasible", r.expected_infeasible},
                      {"consistent", r.consistent},
                      {"fitted_scale", r.fitted_scale ? json(*r.fitted_scale) : json(nullptr)},
                      {"ledger_scale", r.ledger_scale ? json(*r.ledger_scale) : json(nullptr)}});
    fits["theory"] = {{"rows", rows}, {"consistent", tr.consistent}};
    rec.check({"theory-consistency", tr.consistent, true,
               tr.consistent ? "fit outcomes agree with the regime hypotheses"
                             : "a guaranteed side failed or an expected-infeasible side fitted"});
    rec.write("fits.json", fits.dump(2));
  }

  rec.write("timing.json", rec.timing().dump(2));
  rec.event("complete");
  man.artifacts.push_back("manifest.json");
  std::ofstream(dir / "manifest.json") << manifest_json(man);
  return man;
}

std::string manifest_json(const RunManifest& m) {
  json j;
  j["scenario"] = m.scenario;
  j["scenario_hash"] = m.scenario_hash;
  j["tool_version"] = m.tool_version;
  j["run_dir"] = fs::path(m.run_dir).filename().string();
  j["ledger"] = m.ledger_json.empty() ? json(nullptr) : json::parse(m.ledger_json);
  json ev = json::array();
  for (const auto& e : m.events) ev.push_back({{"seq", e.seq}, {"event", e.event}});
  j["events"] = ev;
  j["artifacts"] = m.artifacts;
  json checks = json::array();
  for (const auto& c : m.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"expectation", c.expectation}, {"detail", c.detail}});
  j["checks"] = checks;
  j["expectations_met"] = m.expectations_met;
  j["all_pass"] = m.all_pass;
  return j.dump(2);
}

int exit_code(const std::vector<RunManifest>& runs, bool strict) {
  for (const auto& r : runs) {
    if (!r.expectations_met) return 1;
    if (strict && !r.all_pass) return 1;
  }
  return 0;
}

std::string summary_csv(const std::vector<RunManifest>& runs) {
  std::ostringstream os;
  os << "scenario,hash,checks_passed,checks_total,expectations_met,all_pass,failed,run_dir\n";
  for (const auto& r : runs) {
    int passed = 0;
    std::string failed;
    for (const auto& c : r.checks) {
      if (c.pass) ++passed;
      else failed += (failed.empty() ? "" : ";") + c.name;
    }
    os << r.scenario << ',' << r.scenario_hash.substr(0, 12) << ',' << passed << ',' << r.checks.size() << ','
       << (r.expectations_met ? "true" : "false") << ',' << (r.all_pass ? "true" : "false") << ',' << failed << ','
       << r.run_dir << '\n';
  }
  return os.str();
}

}  // namespace fbheat
