// Runs every acceptance criterion of the primary modules and prints one PASS/FAIL line each.

#include "fbheat/constlab.hpp"
#include "fbheat/errors.hpp"
#include "fbheat/evolve.hpp"
#include "fbheat/expcli.hpp"
#include "fbheat/mollify.hpp"
#include "fbheat/quadform.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

using namespace fbheat;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes << (notes.tellp() > 0 ? "; " : "") << "failed: " << what;
    }
  }
  template <class T>
  void note(const std::string& key, T value) {
    notes << (notes.tellp() > 0 ? "; " : "") << key << " = " << value;
  }
};

int failures = 0;

void criterion(const std::string& name, const std::function<void(Verdict&)>& body) {
  Verdict v;
  try {
    body(v);
  } catch (const std::exception& e) {
    v.pass = false;
    v.notes << (v.notes.tellp() > 0 ? "; " : "") << "error: " << e.what();
  }
  if (!v.pass) ++failures;
  std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.notes.str() << std::endl;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("missing artifact " + p.string());
  return json::parse(in);
}

class Runs {
 public:
  explicit Runs(fs::path out) : out_(std::move(out)) {}

  const RunManifest& get(const std::string& name) {
    auto it = cache_.find(name);
    if (it == cache_.end()) {
      RunOptions opt;
      opt.out = out_.string();
      it = cache_.emplace(name, run_scenario(load_scenario((fs::path(FBHEAT_SCENARIO_DIR) / (name + ".yaml")).string()), opt))
               .first;
    }
    return it->second;
  }

  json fits(const std::string& name) { return read_json(fs::path(get(name).run_dir) / "fits.json"); }

  const std::map<std::string, RunManifest>& all() const { return cache_; }

 private:
  fs::path out_;
  std::map<std::string, RunManifest> cache_;
};

const CheckResult* find_check(const RunManifest& m, const std::string& name) {
  for (const auto& c : m.checks)
    if (c.name == name) return &c;
  return nullptr;
}

constexpr const char* kScenarios[] = {"baseline",     "hardy-attracting-0.25", "hardy-attracting-1", "hardy-repelling-1",
                                      "tanh-sandwich", "checkerboard",          "hardy-mollified-0.25"};
constexpr const char* kSmooth[] = {"baseline", "tanh-sandwich", "checkerboard", "hardy-mollified-0.25"};

}  // namespace

int main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "fbheat-acceptance";
  fs::remove_all(out);
  Runs runs(out);
  for (const char* name : kScenarios) runs.get(name);

  criterion("baseline exactness", [&](Verdict& v) {
    const ParabolicProblem pb{make_matrix(MatrixKind::Identity, {}), zero_drift(3), Variant::Lambda, 2.0, {}, {}, {}};
    SolverConfig cfg;
    cfg.grid = GridSpec::radial(3, 1.25 * suggest_box_half_width(pb, 1.0), 1024);
    const auto k = estimate_kernel(pb, 0.0, 1.0, Vec::Zero(3), cfg);
    double err = 0.0, peak = 0.0;
    for (Index i = 0; i < k.values.mesh->size(); ++i) {
      const double r = k.values.mesh->radius(i);
      const double exact = std::pow(4.0 * std::numbers::pi, -1.5) * std::exp(-r * r / 4.0);
      peak = std::max(peak, exact);
      err = std::max(err, std::abs(k.values.values[i] - exact));
    }
    v.note("relative Linf error", err / peak);
    v.require(err / peak <= 1e-3, "kernel error above 1e-3");
    const json f = runs.fits("baseline");
    for (const char* side : {"lower", "upper"}) {
      const json& s = f.at(side);
      v.require(s.at("outcome") == "feasible", std::string(side) + " envelope infeasible");
      if (s.at("outcome") != "feasible") continue;
      const double c = s.at("multiplier"), mu = s.at("scale"), rate = s.at("rate");
      v.notes << "; " << side << " (" << c << ", " << mu << ", " << rate << ")";
      v.require(std::abs(c - 1.0) <= 0.05 && std::abs(mu - 1.0) <= 0.05 && std::abs(rate) <= 0.05,
                std::string(side) + " envelope not within 5% of (1, 1, 0)");
    }
  });

  criterion("weight exponent", [&](Verdict& v) {
    for (auto [name, delta] : {std::pair{"hardy-attracting-0.25", 0.25}, std::pair{"hardy-attracting-1", 1.0}}) {
      const double target = std::sqrt(delta) * (3 - 2) / 2.0;
      const double p = runs.fits(name).at("weight").at("exponent");
      v.note(std::string("p_hat(delta=") + (delta == 1.0 ? "1" : "0.25") + ")", p);
      v.require(std::abs(p - target) <= 0.1 * target, std::string(name) + " exponent off by more than 10%");
    }
  });

  criterion("upper bound counterexample", [&](Verdict& v) {
    const json f = runs.fits("hardy-attracting-0.25");
    const json& up = f.at("upper");
    v.require(up.at("outcome") == "infeasible", "upper envelope fits");
    if (up.contains("worst")) {
      const double dist = up.at("worst").at("distance"), tau = up.at("worst").at("tau");
      v.note("worst |y| / sqrt(t)", dist / std::sqrt(tau));
      v.require(dist <= 0.05 * std::sqrt(tau), "fit region does not reach |y| <= 0.05 sqrt(t)");
    } else {
      v.require(false, "no worst sample recorded");
    }
    const double power = f.at("growth").at("power"), decades = f.at("growth").at("decades");
    v.note("growth power", power);
    v.note("decades", decades);
    v.require(power > 0.0 && decades >= 1.0, "max u/k_{4 xi} does not grow over a decade");
  });

  criterion("lower bound counterexample", [&](Verdict& v) {
    const json f = runs.fits("hardy-repelling-1");
    v.require(f.at("lower").at("outcome") == "infeasible", "lower envelope fits");
    const auto ratios = f.at("halving").at("ratios").get<std::vector<double>>();
    v.note("halvings", ratios.size() - 1);
    v.require(ratios.size() >= 3, "fewer than two halvings resolved");
    for (size_t i = 1; i < ratios.size(); ++i) v.require(ratios[i] < ratios[i - 1], "ratio rose at step " + std::to_string(i));
    if (!ratios.empty()) v.note("ratio drop", ratios.front() / ratios.back());
  });

  criterion("form-bound estimator", [&](Verdict& v) {
    for (double delta : {0.25, 1.0}) {
      const auto est = estimate_form_bound(hardy_drift(3, delta, HardySign::Attracting), 0.0, GridSpec::radial(3, 1.0, 1024));
      v.require(est.trace.size() == 3, "expected three refinement levels");
      for (size_t i = 1; i < est.trace.size(); ++i)
        v.require(est.trace[i].value > est.trace[i - 1].value, "not monotone");
      for (const auto& l : est.trace) v.require(l.value <= delta * (1.0 + 1e-3), "exceeds declared delta");
      v.note("delta_hat/delta(" + std::to_string(delta).substr(0, 4) + ")", est.delta_hat / delta);
      v.require(est.delta_hat >= 0.85 * delta, "more than 15% below delta");
    }
  });

  criterion("kato estimator", [&](Verdict& v) {
    const auto ball = estimate_kato_norm(indicator_ball(3), 0.0, GridSpec::radial(3, 2.0, 1024));
    v.note("nu_hat(ball)", ball.nu_hat);
    v.require(std::abs(ball.nu_hat - 0.5) <= 0.02 * 0.5, "ball nu_hat outside 0.5 +- 2%");
    v.require(!ball.divergent, "ball flagged divergent");
    const auto inv = estimate_kato_norm(inverse_square(3), 0.0, GridSpec::radial(3, 2.0, 1024));
    v.note("inverse-square divergent", inv.divergent ? "yes" : "no");
    v.require(inv.divergent, "|x|^-2 not flagged");
  });

  criterion("mollifier claims", [&](Verdict& v) {
    const double delta = 0.25;
    const auto rep = verify_preservation(hardy_drift(3, delta, HardySign::Attracting), {1.0, 0.1, 0.01});
    std::map<std::string, int> seen;
    for (const auto& c : rep.results) {
      if (c.skipped) continue;
      ++seen[c.claim];
      const std::string at = c.claim + " at eps " + std::to_string(c.epsilon);
      if (c.claim == "sup-bound")
        v.require(c.lhs <= std::sqrt(delta * 3 / (8.0 * c.epsilon)) * 1.02, at);
      else if (c.claim == "divergence-sign")
        v.require(c.lhs >= -1e-8, at);
      v.require(c.pass, at);
    }
    for (const char* claim : {"sup-bound", "form-bound", "divergence-sign", "commutation"}) {
      v.note(claim, seen[claim]);
      v.require(seen[claim] == 3, std::string(claim) + " not evaluated at every epsilon");
    }
  });

  criterion("nash diagnostics", [&](Verdict& v) {
    int counted = 0;
    for (const auto& [name, m] : runs.all()) {
      if (!m.expectations_met) continue;
      const CheckResult* c = find_check(m, "nash");
      if (!c) continue;
      ++counted;
      v.require(c->pass, name + ": " + c->detail);
      const json n = read_json(fs::path(m.run_dir) / "nash.json");
      const double c_minus = n.at("base").at("c_minus");
      v.require(c_minus > 0.0, name + ": c_minus not positive");
      if (n.contains("stability"))
        for (const auto& [key, change] : n.at("stability").items())
          v.require(change.get<double>() <= 0.1, name + ": " + key + " moved more than 10% under refinement");
    }
    v.note("scenarios", counted);
    v.require(counted >= 5, "too few passing scenarios carry Nash diagnostics");
  });

  criterion("inequality sandwich", [&](Verdict& v) {
    int dom = 0, sand = 0;
    for (const auto& [name, m] : runs.all()) {
      if (const CheckResult* c = find_check(m, "domination")) {
        ++dom;
        v.require(c->pass, name + " domination: " + c->detail);
      }
      if (const CheckResult* c = find_check(m, "sandwich")) {
        ++sand;
        v.require(c->pass, name + " sandwich: " + c->detail);
      }
    }
    v.note("domination runs", dom);
    v.note("sandwich runs", sand);
    v.require(dom >= 3 && sand >= 3, "too few scenarios exercise the comparisons");
  });

  criterion("constant ledger", [&](Verdict& v) {
    ConstantInputs in;
    in.delta = 1.0;
    in.xi = 1.0;
    in.c_n = 1.0;
    in.c_n_source = "acceptance";
    const auto l = proof_constants(in);
    v.require(l.p_c && *l.p_c == 2.0, "p_c");
    v.require(l.beta_star == 15.0 / 8.0, "beta*");
    v.require(l.k1 && *l.k1 == 3.0, "K1");
    v.require(l.k2 && *l.k2 == 4.0, "K2");
    v.require(l.c_delta_a_moser == 5.0 / 4.0, "C");
    v.require(l.c4 == 5.0 / 4.0, "c4");
    const double nu = 0.7, m1 = 1.3, m2 = 1.9;
    const auto a = coulhon_raynaud(1.0, 2.0, std::numeric_limits<double>::infinity(), nu, m1, m2);
    v.require(std::abs(a.exponent - 2.0 * nu) <= 1e-12, "(1,2,inf) exponent");
    v.require(std::abs(a.m / (std::pow(2.0, 4.0 * nu) * m1 * m2 * m2) - 1.0) <= 1e-12, "(1,2,inf) constant");
    const auto b = coulhon_raynaud(2.0, 4.0, 8.0, nu, m1, m2);
    v.require(std::abs(b.exponent - 3.0 * nu) <= 1e-12, "(2,4,8) exponent");
    v.require(std::abs(b.m / (std::pow(2.0, 9.0 * nu) * m1 * std::pow(m2, 3.0)) - 1.0) <= 1e-12, "(2,4,8) constant");
    v.notes << "p_c = 2, beta* = 15/8, K1 = 3, K2 = 4, C = 5/4, c4 = 5/4";
  });

  criterion("conservation", [&](Verdict& v) {
    for (const char* name : kSmooth) {
      const CheckResult* c = find_check(runs.get(name), "conservation");
      v.require(c != nullptr, std::string(name) + " has no conservation check");
      if (!c) continue;
      v.require(c->pass, std::string(name) + ": " + c->detail);
      v.notes << (v.notes.tellp() > 0 ? "; " : "") << name << " " << c->detail;
    }
  });

  std::cout << (failures == 0 ? "all acceptance criteria met" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
