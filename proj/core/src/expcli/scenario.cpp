#include "fbheat/catalog.hpp"
#include "fbheat/errors.hpp"
#include "fbheat/expcli.hpp"

#include <json.hpp>
#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace fbheat {

using nlohmann::json;

namespace {

const std::vector<std::pair<Regime, std::string>>& regime_names() {
  static const std::vector<std::pair<Regime, std::string>> names{
      {Regime::Thm1Lower, "thm1-lower"},
      {Regime::Thm2Upper, "thm2-upper"},
      {Regime::Thm3TwoSided, "thm3-two-sided"},
      {Regime::CounterexampleUgb, "counterexample-ugb"},
      {Regime::CounterexampleLgb, "counterexample-lgb"},
      {Regime::Baseline, "baseline"}};
  return names;
}

const std::set<std::string>& known_checks() {
  static const std::set<std::string> names{"fit",      "weight",   "growth",       "halving",  "nash",
                                           "conservation", "domination", "sandwich", "preservation",
                                           "lp-decay"};
  return names;
}

void reject_unknown(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ValidationError("unknown key '" + key + "' in " + where);
  }
}

bool feasibility(const YAML::Node& n, const std::string& key) {
  const auto v = n.as<std::string>();
  if (v == "feasible") return true;
  if (v == "infeasible") return false;
  throw ValidationError("expect." + key + " must be 'feasible' or 'infeasible'");
}

}  // namespace

std::string to_string(Regime r) {
  for (const auto& [k, v] : regime_names())
    if (k == r) return v;
  return "?";
}

Regime regime_from_string(const std::string& s) {
  for (const auto& [k, v] : regime_names())
    if (v == s) return k;
  throw ValidationError("unknown regime '" + s + "'");
}

Scenario parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ValidationError(std::string("scenario is not valid YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ValidationError("scenario must be a mapping");
  reject_unknown(root,
                 {"name", "regime", "matrix", "drift", "epsilons", "solve_epsilon", "time", "source", "grid",
                  "scheme", "checks", "sandwich_p", "weight", "nash", "c_N", "expect"},
                 "scenario");
  Scenario s;
  try {
    if (!root["name"]) throw ValidationError("scenario needs a name");
    s.name = root["name"].as<std::string>();
    if (!root["regime"]) throw ValidationError("scenario needs a regime");
    s.regime = regime_from_string(root["regime"].as<std::string>());
    if (root["matrix"]) s.matrix = root["matrix"].as<std::string>();
    if (root["drift"]) s.drift = root["drift"].as<std::string>();
    if (root["epsilons"]) s.epsilons = root["epsilons"].as<std::vector<double>>();
    if (root["solve_epsilon"]) s.solve_epsilon = root["solve_epsilon"].as<double>();
    if (const auto t = root["time"]) {
      reject_unknown(t, {"s", "t"}, "time");
      if (t["s"]) s.s = t["s"].as<double>();
      if (t["t"]) s.t = t["t"].as<double>();
    }
    if (root["source"]) s.source = root["source"].as<std::vector<double>>();
    if (const auto g = root["grid"]) {
      reject_unknown(g, {"kind", "points", "extent", "box_factor", "r_min_factor"}, "grid");
      if (g["kind"]) s.grid.kind = g["kind"].as<std::string>();
      if (g["points"]) s.grid.points = g["points"].as<int>();
      if (g["extent"]) s.grid.extent = g["extent"].as<double>();
      if (g["box_factor"]) s.grid.box_factor = g["box_factor"].as<double>();
      if (g["r_min_factor"]) s.grid.r_min_factor = g["r_min_factor"].as<double>();
    }
    if (root["scheme"]) s.scheme = root["scheme"].as<std::string>();
    if (root["checks"]) s.checks = root["checks"].as<std::vector<std::string>>();
    if (root["sandwich_p"]) s.sandwich_p = root["sandwich_p"].as<double>();
    if (const auto w = root["weight"]) {
      reject_unknown(w, {"r_lo", "r_hi"}, "weight");
      if (w["r_lo"]) s.weight_r_lo = w["r_lo"].as<double>();
      if (w["r_hi"]) s.weight_r_hi = w["r_hi"].as<double>();
    }
    if (const auto n = root["nash"]) {
      reject_unknown(n, {"refine"}, "nash");
      if (n["refine"]) s.nash_refine = n["refine"].as<bool>();
    }
    if (root["c_N"]) s.c_n = root["c_N"].as<double>();
    if (const auto e = root["expect"]) {
      reject_unknown(e, {"lower", "upper", "weight_exponent", "weight_tolerance"}, "expect");
      if (e["lower"]) s.expect.lower_feasible = feasibility(e["lower"], "lower");
      if (e["upper"]) s.expect.upper_feasible = feasibility(e["upper"], "upper");
      if (e["weight_exponent"]) s.expect.weight_exponent = e["weight_exponent"].as<double>();
      if (e["weight_tolerance"]) s.expect.weight_tolerance = e["weight_tolerance"].as<double>();
    }
  } catch (const YAML::Exception& e) {
    throw ValidationError(std::string("malformed scenario value: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string canonical_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["regime"] = to_string(s.regime);
  j["matrix"] = s.matrix;
  j["drift"] = s.drift;
  j["epsilons"] = s.epsilons;
  j["solve_epsilon"] = s.solve_epsilon ? json(*s.solve_epsilon) : json(nullptr);
  j["time"] = {{"s", s.s}, {"t", s.t}};
  j["source"] = s.source;
  j["grid"] = {{"kind", s.grid.kind},
               {"points", s.grid.points},
               {"extent", s.grid.extent},
               {"box_factor", s.grid.box_factor},
               {"r_min_factor", s.grid.r_min_factor}};
  j["scheme"] = s.scheme;
  j["checks"] = s.checks;
  j["sandwich_p"] = s.sandwich_p;
  j["weight"] = {{"r_lo", s.weight_r_lo}, {"r_hi", s.weight_r_hi}};
  j["nash"] = {{"refine", s.nash_refine}};
  j["c_N"] = s.c_n ? json(*s.c_n) : json(nullptr);
  json e;
  e["lower"] = s.expect.lower_feasible ? json(*s.expect.lower_feasible ? "feasible" : "infeasible") : json(nullptr);
  e["upper"] = s.expect.upper_feasible ? json(*s.expect.upper_feasible ? "feasible" : "infeasible") : json(nullptr);
  e["weight_exponent"] = s.expect.weight_exponent ? json(*s.expect.weight_exponent) : json(nullptr);
  e["weight_tolerance"] = s.expect.weight_tolerance;
  j["expect"] = e;
  return j.dump();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

std::vector<std::string> validate(const Scenario& s) {
  std::vector<std::string> bad;
  std::optional<DriftField> b;
  std::optional<DiffusionMatrix> a;
  try {
    b = drift_from_id(s.drift);
  } catch (const Error& e) {
    bad.push_back(std::string("drift: ") + e.what());
  }
  try {
    a = matrix_from_id(s.matrix);
  } catch (const Error& e) {
    bad.push_back(std::string("matrix: ") + e.what());
  }
  if (!(s.s >= 0.0) || !(s.t > s.s)) bad.push_back("time window must satisfy 0 <= s < t");
  if (s.grid.kind != "radial" && s.grid.kind != "cartesian") bad.push_back("grid.kind must be radial or cartesian");
  if (s.grid.points < 0) bad.push_back("grid.points must be nonnegative");
  if (!(s.grid.box_factor >= 1.0)) bad.push_back("grid.box_factor must be at least 1");
  if (s.scheme != "backward-euler" && s.scheme != "crank-nicolson") bad.push_back("scheme must be backward-euler or crank-nicolson");
  for (const auto& c : s.checks)
    if (!known_checks().count(c)) bad.push_back("unknown check '" + c + "'");
  for (double e : s.epsilons)
    if (!(e > 0.0)) bad.push_back("epsilons must be positive");
  if (s.solve_epsilon && !(*s.solve_epsilon > 0.0)) bad.push_back("solve_epsilon must be positive");
  if (!(s.sandwich_p > 1.0)) bad.push_back("sandwich_p must exceed 1");
  if (!(s.weight_r_lo > 0.0) || !(s.weight_r_hi > s.weight_r_lo) || s.weight_r_hi > 1.0)
    bad.push_back("weight radii must satisfy 0 < r_lo < r_hi <= 1 (fractions of sqrt(t - s))");
  if (!b || !a) return bad;

  const int d = b->dim();
  if (a->dim() != d) bad.push_back("matrix and drift dimensions differ");
  if (d < 3) bad.push_back("dimension must be at least 3");
  if (!s.source.empty() && static_cast<int>(s.source.size()) != d) bad.push_back("source has the wrong dimension");
  const bool radial = s.grid.kind == "radial";
  if (radial) {
    if (!b->is_radial()) bad.push_back("radial grids need a radially symmetric drift");
    if (!(a->flags().constant && a->flags().isotropic)) bad.push_back("radial grids need a constant isotropic matrix");
    for (double x : s.source)
      if (x != 0.0) bad.push_back("radial grids need the source at the origin");
  } else if (!a->flags().diagonal) {
    bad.push_back("Cartesian grids need a diagonal matrix");
  }
  for (const auto& c : s.checks)
    if (!radial && (c == "weight" || c == "growth" || c == "halving" || c == "preservation"))
      bad.push_back("check '" + c + "' needs a radial grid");
  if (s.expect.weight_exponent && std::find(s.checks.begin(), s.checks.end(), "weight") == s.checks.end())
    bad.push_back("expect.weight_exponent declared without the weight check");
  if ((s.expect.lower_feasible || s.expect.upper_feasible) &&
      std::find(s.checks.begin(), s.checks.end(), "fit") == s.checks.end())
    bad.push_back("fit expectations declared without the fit check");

  const auto& m = b->meta();
  const double sigma = a->sigma();
  const double delta_a = m.delta / (sigma * sigma);
  auto requested = [&](const char* c) { return std::find(s.checks.begin(), s.checks.end(), c) != s.checks.end(); };
  if (s.solve_epsilon && !b->is_radial()) bad.push_back("solve_epsilon needs a radially symmetric drift");
  if (requested("preservation") && s.epsilons.empty()) bad.push_back("preservation check needs a nonempty epsilons list");
  if (requested("domination") && m.sign != DivergenceSign::Nonnegative && m.sign != DivergenceSign::Nonpositive)
    bad.push_back("domination check needs a divergence of definite sign");
  if (requested("lp-decay") && !(delta_a < 4.0)) bad.push_back("lp-decay check needs delta_a < 4");
  const bool finite = std::isfinite(m.delta);
  const bool has_singular = !m.singular_points.empty();
  const std::string r = to_string(s.regime);
  auto need = [&](bool ok, const std::string& why) {
    if (!ok) bad.push_back(r + " but " + why);
  };
  switch (s.regime) {
    case Regime::Baseline:
      need(m.delta == 0.0 && m.c_delta == 0.0, "the drift is not zero (delta = " + std::to_string(m.delta) + ")");
      break;
    case Regime::Thm1Lower:
      need(delta_a < 4.0, "delta_a >= 4");
      need(m.sign == DivergenceSign::Nonnegative, "div b is not declared nonnegative");
      break;
    case Regime::Thm2Upper:
      need(finite, "delta is infinite");
      need(m.kato_div_plus.has_value() || m.sign == DivergenceSign::Nonpositive, "div b_+ has no Kato data");
      break;
    case Regime::Thm3TwoSided:
      need(finite, "delta is infinite");
      need(m.kato_div_abs.has_value(), "|div b| has no Kato data");
      break;
    case Regime::CounterexampleUgb:
      need(delta_a < 4.0, "delta_a >= 4");
      need(m.sign == DivergenceSign::Nonnegative, "div b is not declared nonnegative");
      need(has_singular, "the drift has no singular point");
      break;
    case Regime::CounterexampleLgb:
      need(finite, "delta is infinite");
      need(m.sign == DivergenceSign::Nonpositive, "div b is not declared nonpositive");
      need(has_singular, "the drift has no singular point");
      break;
  }
  return bad;
}

void validate_or_throw(const Scenario& s) {
  const auto bad = validate(s);
  if (bad.empty()) return;
  std::ostringstream os;
  os << "scenario '" << s.name << "' is invalid:";
  for (const auto& b : bad) os << "\n  - " << b;
  throw ValidationError(os.str());
}

}  // namespace fbheat
