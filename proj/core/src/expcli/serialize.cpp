#include "json_detail.hpp"

namespace fbheat {

namespace detail {

namespace {

json levels_json(const std::vector<RefinementLevel>& trace) {
  json out = json::array();
  for (const auto& l : trace) out.push_back({{"grid", grid_json(l.grid)}, {"value", l.value}, {"iterations", l.iterations}});
  return out;
}

}  // namespace

json grid_json(const GridSpec& g) {
  json j;
  j["dim"] = g.dim;
  if (g.is_radial()) {
    j["kind"] = "radial";
    j["r_min"] = g.r_min;
    j["r_max"] = g.r_max;
    j["points"] = g.radial_points;
    j["spacing"] = g.spacing == RadialSpacing::Geometric ? "geometric" : "uniform";
  } else {
    j["kind"] = "cartesian";
    j["lower"] = g.lower;
    j["upper"] = g.upper;
    j["points"] = g.points;
  }
  return j;
}

json form_bound_json(const FormBoundEstimate& e) {
  return {{"delta_hat", e.delta_hat}, {"c_of_delta", e.c_of_delta}, {"grid", grid_json(e.grid)}, {"trace", levels_json(e.trace)}};
}

json kato_json(const KatoEstimate& e) {
  return {{"nu_hat", e.nu_hat},
          {"lambda", e.lambda},
          {"refined_value", e.refined_value},
          {"divergent", e.divergent},
          {"grid", grid_json(e.grid)},
          {"trace", levels_json(e.trace)}};
}

json preservation_json(const PreservationReport& r) {
  json rows = json::array();
  for (const auto& c : r.results)
    rows.push_back({{"claim", c.claim},
                    {"epsilon", c.epsilon},
                    {"lhs", c.lhs},
                    {"rhs", c.rhs},
                    {"pass", c.pass},
                    {"skipped", c.skipped}});
  return {{"results", rows}, {"all_pass", r.all_pass()}};
}

json fit_json(const BoundFit& f) {
  json j;
  j["side"] = to_string(f.side);
  j["multiplier"] = f.multiplier;
  j["scale"] = f.scale;
  j["rate"] = f.rate;
  j["region"] = {{"t_min", f.region.t_min},
                 {"t_max", f.region.t_max},
                 {"radius_factor", f.region.radius_factor},
                 {"exclude_radius", f.region.exclude_radius},
                 {"floor", f.region.floor}};
  j["xi"] = f.xi;
  j["spatial_radius"] = f.spatial_radius;
  j["samples"] = f.samples;
  j["mean_log_gap"] = f.mean_log_gap;
  j["worst_ratio"] = f.worst_ratio;
  j["singular_slope"] = f.singular_slope ? json(*f.singular_slope) : json(nullptr);
  return j;
}

json weight_json(const WeightProfile& w) {
  return {{"exponent", w.exponent},
          {"theoretical", w.theoretical},
          {"r_lo", w.r_lo},
          {"r_hi", w.r_hi},
          {"residual", w.residual},
          {"points", w.points},
          {"bounded", w.bounded},
          {"vanishes_at_zero", w.vanishes_at_zero},
          {"radii", w.radii},
          {"ratios", w.ratios}};
}

json nash_json(const NashDiagnostics& n) {
  return {{"taus", n.taus},
          {"Q", n.q},
          {"M", n.m},
          {"Q_tilde", n.q_tilde},
          {"dissipation", n.dissipation},
          {"C_NEE", n.c_nee},
          {"c_minus", n.c_minus},
          {"c_plus", n.c_plus},
          {"beta", n.beta},
          {"tau_half", n.tau_half},
          {"G_hat", n.g_hat},
          {"G_constant", n.g_constant},
          {"entropy_moment", {{"ratios", n.entropy_moment.ratios}, {"sup", n.entropy_moment.sup}, {"finite", n.entropy_moment.finite}}}};
}

json sample_json(const FitSample& s) {
  return {{"tau", s.tau}, {"distance", s.distance}, {"value", s.value}, {"ratio", s.ratio}};
}

}  // namespace detail

std::string to_json(const FormBoundEstimate& e) { return detail::form_bound_json(e).dump(2); }
std::string to_json(const KatoEstimate& e) { return detail::kato_json(e).dump(2); }
std::string to_json(const PreservationReport& r) { return detail::preservation_json(r).dump(2); }
std::string to_json(const BoundFit& f) { return detail::fit_json(f).dump(2); }
std::string to_json(const WeightProfile& w) { return detail::weight_json(w).dump(2); }
std::string to_json(const NashDiagnostics& n) { return detail::nash_json(n).dump(2); }
std::string to_json(const GridSpec& g) { return detail::grid_json(g).dump(2); }

}  // namespace fbheat
