#include "fbheat/constlab.hpp"

#include "fbheat/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace fbheat {

using nlohmann::json;

double critical_exponent(double delta_a) {
  if (!(delta_a >= 0.0)) throw InvalidArgument("delta_a must be nonnegative");
  if (delta_a >= 4.0) throw InvalidArgument("supercritical form-bound: lower-bound theory inapplicable");
  return 2.0 / (2.0 - std::sqrt(delta_a));
}

double c_p(double p, double delta_a) {
  const double pc = critical_exponent(delta_a);
  if (p < pc) throw InvalidArgument("p must be at least p_c");
  return 1.0 / pc - 1.0 / p;
}

double ConstantLedger::c_p_at(double p) const {
  if (!p_c) throw InvalidArgument("supercritical form-bound: lower-bound theory inapplicable");
  if (p < *p_c) throw InvalidArgument("p must be at least p_c");
  return 1.0 / *p_c - 1.0 / p;
}

ConstantLedger proof_constants(const ConstantInputs& in) {
  if (in.d < 3) throw InvalidArgument("dimension must be at least 3");
  if (!(in.sigma > 0.0) || !(in.xi >= in.sigma)) throw InvalidArgument("ellipticity needs 0 < sigma <= xi");
  if (in.delta < 0.0 || in.c_delta < 0.0 || in.nu < 0.0 || in.lambda < 0.0)
    throw InvalidArgument("delta, c(delta), nu, lambda must be nonnegative");
  if (!(in.r > 2.0)) throw InvalidArgument("exponent r must exceed 2");
  ConstantLedger l;
  l.inputs = in;
  const double s2 = in.sigma * in.sigma;
  l.delta_a = in.delta / s2;
  l.c_delta_a = in.c_delta / s2;
  if (l.delta_a < 4.0) {
    l.p_c = critical_exponent(l.delta_a);
    l.k1 = std::sqrt(2.0 * *l.p_c) * (1.0 + std::sqrt(l.delta_a / 4.0));
    if (l.delta_a > 0.0) l.k2 = 1.0 + *l.k1 / std::sqrt(l.delta_a);
    l.c_g = 2.0 * in.sigma * in.c_n / *l.p_c;
  }
  l.beta_star = 1.5 * (1.0 + l.delta_a / 4.0) * in.xi;
  l.c_delta_a_moser = 1.0 + l.delta_a / 4.0;
  if (l.delta_a > 0.0) l.omega = l.c_delta_a / (2.0 * l.delta_a);
  else if (l.c_delta_a == 0.0) l.omega = 0.0;
  l.c4 = l.c_delta_a_moser * in.xi;
  l.beta = l.beta_star;
  if (in.c_plus) l.beta = std::max(l.beta_star, 16.0 * *in.c_plus * *in.c_plus);
  l.c_beta = std::pow(4.0 * std::numbers::pi * l.beta, -0.5 * in.d) * std::exp(-0.25);
  if (in.c_hat) {
    if (!(*in.c_hat > 0.0)) throw InvalidArgument("c^ must be positive");
    l.c_of_beta = in.sigma * l.c_beta / (4.0 * l.beta * *in.c_hat) * std::pow(2.0, -in.d / (2.0 * (in.r - 1.0)));
  }
  return l;
}

namespace {

template <class T>
void put(json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> get(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

std::string to_json(const ConstantLedger& l, int indent) {
  json in;
  in["d"] = l.inputs.d;
  in["sigma"] = l.inputs.sigma;
  in["xi"] = l.inputs.xi;
  in["delta"] = l.inputs.delta;
  in["c_delta"] = l.inputs.c_delta;
  in["nu"] = l.inputs.nu;
  in["lambda"] = l.inputs.lambda;
  in["c_N"] = l.inputs.c_n;
  in["c_N_source"] = l.inputs.c_n_source;
  put(in, "c_plus", l.inputs.c_plus);
  put(in, "c_hat", l.inputs.c_hat);
  in["r"] = l.inputs.r;
  json j;
  j["inputs"] = in;
  j["delta_a"] = l.delta_a;
  j["c_delta_a"] = l.c_delta_a;
  put(j, "p_c", l.p_c);
  put(j, "K1", l.k1);
  put(j, "K2", l.k2);
  put(j, "c_g", l.c_g);
  j["beta_star"] = l.beta_star;
  j["C_delta_a"] = l.c_delta_a_moser;
  put(j, "omega", l.omega);
  j["c4"] = l.c4;
  j["beta"] = l.beta;
  j["c_beta"] = l.c_beta;
  put(j, "c_of_beta", l.c_of_beta);
  return j.dump(indent);
}

ConstantLedger ledger_from_json(const std::string& text) {
  const json j = json::parse(text);
  ConstantLedger l;
  const json& in = j.at("inputs");
  l.inputs.d = in.at("d").get<int>();
  l.inputs.sigma = in.at("sigma").get<double>();
  l.inputs.xi = in.at("xi").get<double>();
  l.inputs.delta = in.at("delta").get<double>();
  l.inputs.c_delta = in.at("c_delta").get<double>();
  l.inputs.nu = in.at("nu").get<double>();
  l.inputs.lambda = in.at("lambda").get<double>();
  l.inputs.c_n = in.at("c_N").get<double>();
  l.inputs.c_n_source = in.at("c_N_source").get<std::string>();
  l.inputs.c_plus = get<double>(in, "c_plus");
  l.inputs.c_hat = get<double>(in, "c_hat");
  l.inputs.r = in.at("r").get<double>();
  l.delta_a = j.at("delta_a").get<double>();
  l.c_delta_a = j.at("c_delta_a").get<double>();
  l.p_c = get<double>(j, "p_c");
  l.k1 = get<double>(j, "K1");
  l.k2 = get<double>(j, "K2");
  l.c_g = get<double>(j, "c_g");
  l.beta_star = j.at("beta_star").get<double>();
  l.c_delta_a_moser = j.at("C_delta_a").get<double>();
  l.omega = get<double>(j, "omega");
  l.c4 = j.at("c4").get<double>();
  l.beta = j.at("beta").get<double>();
  l.c_beta = j.at("c_beta").get<double>();
  l.c_of_beta = get<double>(j, "c_of_beta");
  return l;
}

bool operator==(const ConstantLedger& a, const ConstantLedger& b) {
  const auto& x = a.inputs;
  const auto& y = b.inputs;
  return x.d == y.d && x.sigma == y.sigma && x.xi == y.xi && x.delta == y.delta && x.c_delta == y.c_delta &&
         x.nu == y.nu && x.lambda == y.lambda && x.c_n == y.c_n && x.c_n_source == y.c_n_source &&
         x.c_plus == y.c_plus && x.c_hat == y.c_hat && x.r == y.r && a.delta_a == b.delta_a &&
         a.c_delta_a == b.c_delta_a && a.p_c == b.p_c && a.k1 == b.k1 && a.k2 == b.k2 && a.c_g == b.c_g &&
         a.beta_star == b.beta_star && a.c_delta_a_moser == b.c_delta_a_moser && a.omega == b.omega &&
         a.c4 == b.c4 && a.beta == b.beta && a.c_beta == b.c_beta && a.c_of_beta == b.c_of_beta;
}

CoulhonRaynaud coulhon_raynaud(double p, double q, double r, double nu, double m1, double m2) {
  if (!(p >= 1.0 && p < q && q < r)) throw InvalidArgument("Coulhon-Raynaud requires 1 <= p < q < r <= infinity");
  if (!(nu > 0.0) || !(m1 > 0.0) || !(m2 > 0.0)) throw InvalidArgument("nu, M1, M2 must be positive");
  CoulhonRaynaud out;
  out.beta = std::isinf(r) ? (q - p) / q : (r / q) * (q - p) / (r - p);
  const double one = 1.0 - out.beta;
  out.exponent = nu / one;
  out.m = std::pow(2.0, nu / (one * one)) * m1 * std::pow(m2, 1.0 / one);
  return out;
}

std::string to_string(FitOutcome o) {
  switch (o) {
    case FitOutcome::Feasible: return "feasible";
    case FitOutcome::Infeasible: return "infeasible";
    case FitOutcome::NotRun: return "not-run";
  }
  return "?";
}

TheoryReport theory_vs_fit(const ConstantLedger& l, const TheoryInputs& th, const SideResult& lower,
                           const SideResult& upper) {
  TheoryReport rep;
  const bool sub = l.delta_a < 4.0;
  auto row = [&](Side side, const SideResult& res) {
    TheoryRow r;
    r.side = side;
    r.outcome = res.outcome;
    r.expected_infeasible = res.expected_infeasible;
    if (res.fit) r.fitted_scale = res.fit->scale;
    if (th.zero_drift) {
      r.guaranteed = true;
      r.reason = "b = 0: De Giorgi-Nash baseline";
    } else if (side == Side::Lower && sub && th.sign == DivergenceSign::Nonnegative) {
      r.guaranteed = true;
      r.reason = "delta_a < 4 and div b >= 0";
    } else if (side == Side::Upper && th.div_plus_kato) {
      r.guaranteed = true;
      r.reason = "div b_+ in the Kato class";
    } else if (th.div_abs_kato) {
      r.guaranteed = true;
      r.reason = "|div b| in the Kato class";
    } else {
      r.reason = "no hypothesis guarantees this side";
    }
    if (side == Side::Upper) r.ledger_scale = l.c4;
    // A guaranteed side that fails its fit, or an expected-infeasible side that fits, is inconsistent.
    if (r.guaranteed && res.outcome == FitOutcome::Infeasible) r.consistent = false;
    if (res.expected_infeasible && res.outcome == FitOutcome::Feasible) r.consistent = false;
    rep.consistent = rep.consistent && r.consistent;
    rep.rows.push_back(r);
  };
  row(Side::Lower, lower);
  row(Side::Upper, upper);
  return rep;
}

}  // namespace fbheat
