#include "fbheat/mollify.hpp"

#include "fbheat/errors.hpp"
#include "fbheat/quadform.hpp"
#include "fbheat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace fbheat {

namespace {

std::string eps_tag(double eps) {
  std::ostringstream os;
  os << "E[" << eps << "]";
  return os.str();
}

double radial_heat_integral(const Profile& f, int d, double eps, double r, bool vector,
                            const std::vector<double>& extra) {
  const double w = std::sqrt(eps);
  const double lo = std::max(0.0, r - 12.0 * w), hi = r + 12.0 * w;
  std::vector<double> breaks{lo, hi};
  double start = lo;
  if (lo == 0.0) {
    const double s = std::min(hi, w);
    for (int k = 40; k >= 1; --k) breaks.push_back(s * std::ldexp(1.0, -k));
    breaks.push_back(s);
    start = s;
  }
  const int panels = 24;
  for (int i = 1; i < panels; ++i) breaks.push_back(start + (hi - start) * i / panels);
  for (double b : extra)
    if (b > lo && b < hi) breaks.push_back(b);
  if (r > lo && r < hi) breaks.push_back(r);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  const double pref = unit_sphere_area(d) * std::pow(4.0 * std::numbers::pi * eps, -0.5 * d);
  auto integrand = [&](double rho) {
    const double a = r * rho / (2.0 * eps);
    const double ang = vector ? sphere_mean_u_exp(d, a) : sphere_mean_exp(d, a);
    const double z = r - rho;
    return std::pow(rho, d - 1) * f(rho) * std::exp(-z * z / (4.0 * eps)) * ang;
  };
  return pref * integrate_panels(integrand, breaks, 12);
}

void check_eps(double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("mollification requires epsilon > 0");
}

// Tensor Gauss-Legendre approximation of the Gaussian average for non-radial fields.
struct GaussianCubature {
  std::vector<Vec> offsets;
  std::vector<double> weights;
};

GaussianCubature gaussian_cubature(int d, double eps, int n) {
  const auto& g = gauss_legendre(n);
  const double sd = std::sqrt(2.0 * eps), half = 6.0 * sd;
  std::vector<double> x(n), w(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    x[i] = half * g.nodes[i];
    w[i] = g.weights[i] * std::exp(-x[i] * x[i] / (2.0 * sd * sd));
    total += w[i];
  }
  for (auto& v : w) v /= total;
  GaussianCubature c;
  long count = 1;
  for (int k = 0; k < d; ++k) count *= n;
  for (long idx = 0; idx < count; ++idx) {
    Vec off(d);
    double wt = 1.0;
    long rem = idx;
    for (int k = 0; k < d; ++k) {
      const int j = static_cast<int>(rem % n);
      rem /= n;
      off[k] = x[j];
      wt *= w[j];
    }
    c.offsets.push_back(off);
    c.weights.push_back(wt);
  }
  return c;
}

}  // namespace

Profile mollify_radial_profile(const Profile& f, int d, double eps,
                               const std::vector<double>& breakpoints) {
  check_eps(eps);
  return [f, d, eps, breakpoints](double r) { return radial_heat_integral(f, d, eps, r, false, breakpoints); };
}

Profile mollify_radial_vector_profile(const Profile& g, int d, double eps,
                                      const std::vector<double>& breakpoints) {
  check_eps(eps);
  return [g, d, eps, breakpoints](double r) { return radial_heat_integral(g, d, eps, r, true, breakpoints); };
}

ScalarField mollify_scalar(const ScalarField& f, double eps) {
  check_eps(eps);
  ScalarInfo info;
  info.id = eps_tag(eps) + f.info().id;
  info.sup = f.info().sup;
  info.constant = f.info().constant;
  if (f.is_radial()) {
    const Profile p = f.radial_profile();
    return ScalarField::radial(f.dim(), mollify_radial_profile(p, f.dim(), eps, f.info().breakpoints), info);
  }
  const auto cub = std::make_shared<GaussianCubature>(gaussian_cubature(f.dim(), eps, 16));
  ScalarField src = f;
  return ScalarField(
      f.dim(),
      [src, cub](const Vec& x) {
        double acc = 0.0;
        for (size_t i = 0; i < cub->offsets.size(); ++i) acc += cub->weights[i] * src(x + cub->offsets[i]);
        return acc;
      },
      info);
}

DriftField mollify_drift(const DriftField& b, double eps) {
  check_eps(eps);
  DriftMetadata m = b.meta();
  m.id = eps_tag(eps) + b.meta().id;
  m.singular_points.clear();
  const int d = b.dim();
  if (b.is_radial()) {
    const Profile g = mollify_radial_vector_profile(b.radial_profile(), d, eps);
    std::optional<Profile> div;
    if (b.has_divergence()) {
      const DriftField src = b;
      div = mollify_radial_profile([src](double r) { return src.radial_divergence(r); }, d, eps);
    }
    return DriftField::radial(d, g, div, m);
  }
  const auto cub = std::make_shared<GaussianCubature>(gaussian_cubature(d, eps, 12));
  const DriftField src = b;
  auto eval = [src, cub](const Vec& x) -> Vec {
    Vec acc = Vec::Zero(x.size());
    for (size_t i = 0; i < cub->offsets.size(); ++i) acc += cub->weights[i] * src(x + cub->offsets[i]);
    return acc;
  };
  std::optional<DriftField::ScalarEval> div;
  if (b.has_divergence()) {
    div = [src, cub](const Vec& x) {
      double acc = 0.0;
      for (size_t i = 0; i < cub->offsets.size(); ++i) acc += cub->weights[i] * src.divergence(x + cub->offsets[i]);
      return acc;
    };
  }
  return DriftField(d, eval, div, m);
}

double required_padding(double eps) {
  check_eps(eps);
  return 6.0 * std::sqrt(eps);
}

Vec convolve_cartesian(const Mesh& padded, const Vec& source, const Mesh& target, double eps) {
  check_eps(eps);
  if (padded.radial() || target.radial()) throw InvalidArgument("Cartesian convolution needs Cartesian meshes");
  const int d = padded.dim();
  const double need = required_padding(eps);
  const auto& ps = padded.spec();
  const auto& ts = target.spec();
  for (int k = 0; k < d; ++k) {
    const double margin = std::min(ts.lower[k] - ps.lower[k], ps.upper[k] - ts.upper[k]);
    if (margin < need * (1.0 - 1e-12)) {
      std::ostringstream os;
      os << "insufficient padding " << margin << " on axis " << k << ": need at least " << need
         << " (6 sqrt(eps))";
      throw InvalidArgument(os.str());
    }
  }
  const double scale = 2.0 * std::sqrt(eps);
  std::vector<int> dims(ps.points.begin(), ps.points.end());
  Vec data = source;
  for (int k = 0; k < d; ++k) {
    const int nt = ts.points[k], ns = ps.points[k];
    const double hs = ps.spacing_along(k), ht = ts.spacing_along(k);
    Mat w = Mat::Zero(nt, ns);
    for (int i = 0; i < nt; ++i) {
      const double x = ts.lower[k] + (i + 0.5) * ht;
      for (int j = 0; j < ns; ++j) {
        const double a = ps.lower[k] + j * hs, b = a + hs;
        if (a - x > 10.0 * scale || x - b > 10.0 * scale) continue;
        w(i, j) = 0.5 * (std::erf((b - x) / scale) - std::erf((a - x) / scale));
      }
    }
    std::vector<int> next = dims;
    next[k] = nt;
    std::vector<Index> so(d), sn(d);
    Index acc_o = 1, acc_n = 1;
    for (int j = 0; j < d; ++j) {
      so[j] = acc_o;
      sn[j] = acc_n;
      acc_o *= dims[j];
      acc_n *= next[j];
    }
    Vec out = Vec::Zero(acc_n);
    for (Index o = 0; o < acc_n; ++o) {
      Index rem = o, base = 0;
      int t = 0;
      for (int j = 0; j < d; ++j) {
        const int m = static_cast<int>(rem % next[j]);
        rem /= next[j];
        if (j == k) t = m;
        else base += m * so[j];
      }
      double s = 0.0;
      for (int j = 0; j < ns; ++j)
        if (w(t, j) != 0.0) s += w(t, j) * data[base + j * so[k]];
      out[o] = s;
    }
    data = std::move(out);
    dims = next;
  }
  return data;
}

namespace {

GridSpec padded_spec(const GridSpec& g, double padding) {
  GridSpec p = g;
  for (int k = 0; k < g.dim; ++k) {
    const double h = g.spacing_along(k);
    const int extra = static_cast<int>(std::ceil(padding / h - 1e-9));
    p.lower[k] -= extra * h;
    p.upper[k] += extra * h;
    p.points[k] += 2 * extra;
  }
  return p;
}

double pick_padding(double eps, std::optional<double> padding) {
  const double need = required_padding(eps);
  if (padding && *padding < need) {
    std::ostringstream os;
    os << "insufficient padding " << *padding << ": need at least " << need << " (6 sqrt(eps))";
    throw InvalidArgument(os.str());
  }
  return padding ? *padding : 8.0 * std::sqrt(eps);
}

}  // namespace

MollifiedField mollify(const ScalarField& f, double eps, const GridSpec& grid,
                       std::optional<double> padding) {
  check_eps(eps);
  MollifiedField out;
  out.source_id = f.info().id;
  out.epsilon = eps;
  out.certificate = f.info().sup.value_or(std::numeric_limits<double>::infinity());
  auto mesh = make_mesh(grid);
  if (grid.is_radial()) {
    const ScalarField fe = mollify_scalar(f, eps);
    out.values = sample(fe, mesh);
    return out;
  }
  const double pad = pick_padding(eps, padding);
  const Mesh big(padded_spec(grid, pad));
  Vec src(big.size());
  for (Index i = 0; i < big.size(); ++i) src[i] = f(big.point(i));
  out.values = {mesh, convolve_cartesian(big, src, *mesh, eps)};
  return out;
}

MollifiedField mollify(const DriftField& b, double eps, const GridSpec& grid,
                       std::optional<double> padding) {
  check_eps(eps);
  MollifiedField out;
  out.source_id = b.meta().id;
  out.epsilon = eps;
  out.certificate = std::isfinite(b.meta().delta) && std::isfinite(b.meta().c_delta)
                        ? mollified_sup_bound(b.meta().delta, b.meta().c_delta, b.dim(), eps)
                        : std::numeric_limits<double>::infinity();
  auto mesh = make_mesh(grid);
  if (grid.is_radial()) {
    if (!b.is_radial()) throw InvalidArgument("radial grids require a radial drift");
    const DriftField be = mollify_drift(b, eps);
    Vec g(mesh->size());
    for (Index i = 0; i < mesh->size(); ++i) g[i] = be.radial_component(mesh->radius(i));
    out.components = {{mesh, g}};
    out.values = {mesh, g.cwiseAbs()};
    return out;
  }
  const double pad = pick_padding(eps, padding);
  const Mesh big(padded_spec(grid, pad));
  const int d = b.dim();
  std::vector<Vec> src(d, Vec(big.size()));
  for (Index i = 0; i < big.size(); ++i) {
    const Vec v = b(big.point(i));
    for (int k = 0; k < d; ++k) src[k][i] = v[k];
  }
  Vec norm2 = Vec::Zero(mesh->size());
  for (int k = 0; k < d; ++k) {
    Vec c = convolve_cartesian(big, src[k], *mesh, eps);
    norm2 += c.cwiseAbs2();
    out.components.push_back({mesh, std::move(c)});
  }
  out.values = {mesh, norm2.cwiseSqrt()};
  return out;
}

double mollified_sup_bound(double delta, double c_delta, int d, double eps) {
  if (delta < 0.0 || c_delta < 0.0) throw InvalidArgument("delta and c(delta) must be nonnegative");
  check_eps(eps);
  return std::sqrt(delta * d / (8.0 * eps) + c_delta);
}

bool PreservationReport::all_pass() const {
  return std::all_of(results.begin(), results.end(), [](const ClaimResult& r) { return r.pass || r.skipped; });
}

void PreservationReport::throw_if_failed() const {
  for (const auto& r : results) {
    if (r.pass || r.skipped) continue;
    std::ostringstream os;
    os << "claim '" << r.claim << "' failed at eps = " << r.epsilon << ": " << r.lhs << " vs " << r.rhs;
    throw CheckFailure(os.str());
  }
}

PreservationReport verify_preservation(const DriftField& b, const std::vector<double>& epsilons,
                                       const PreservationOptions& opt) {
  if (!b.is_radial()) throw InvalidArgument("preservation checks need a radial drift");
  const int d = b.dim();
  const auto& meta = b.meta();
  const double tol = opt.relative_tolerance;
  PreservationReport rep;
  for (double eps : epsilons) {
    check_eps(eps);
    const double radius = std::max(opt.min_radius, opt.radius_factor * std::sqrt(eps));
    const GridSpec grid = GridSpec::radial(d, radius, opt.radial_points);
    const auto mesh = make_mesh(grid);
    const DriftField be = mollify_drift(b, eps);

    if (std::isfinite(meta.delta) && std::isfinite(meta.c_delta)) {
      double sup = 0.0;
      for (Index i = 0; i < mesh->size(); ++i) sup = std::max(sup, std::abs(be.radial_component(mesh->radius(i))));
      const double bound = mollified_sup_bound(meta.delta, meta.c_delta, d, eps);
      rep.results.push_back({"sup-bound", eps, sup, bound * (1.0 + tol), sup <= bound * (1.0 + tol)});

      FormBoundOptions fo;
      fo.levels = opt.form_bound_levels;
      const auto fb = estimate_form_bound(be, meta.c_delta, grid, fo);
      const size_t n = fb.trace.size();
      const double band = n > 1 ? std::abs(fb.trace[n - 1].value - fb.trace[n - 2].value) : 0.0;
      const double rhs = meta.delta * (1.0 + tol) + band;
      rep.results.push_back({"form-bound", eps, fb.delta_hat, rhs, fb.delta_hat <= rhs});
    } else {
      rep.results.push_back({"sup-bound", eps, 0.0, 0.0, false, true});
      rep.results.push_back({"form-bound", eps, 0.0, 0.0, false, true});
    }

    if (be.has_divergence() &&
        (meta.sign == DivergenceSign::Nonnegative || meta.sign == DivergenceSign::Nonpositive)) {
      const double s = meta.sign == DivergenceSign::Nonnegative ? 1.0 : -1.0;
      double worst = s * be.radial_divergence(0.0);
      for (Index i = 0; i < mesh->size(); ++i) worst = std::min(worst, s * be.radial_divergence(mesh->radius(i)));
      rep.results.push_back({"divergence-sign", eps, worst, -opt.divergence_tolerance,
                             worst >= -opt.divergence_tolerance});
    } else {
      rep.results.push_back({"divergence-sign", eps, 0.0, 0.0, false, true});
    }

    if (meta.kato_div_plus && b.has_divergence()) {
      const DriftField src = b;
      const ScalarField vplus = ScalarField::radial(
          d, [src](double r) { return std::max(0.0, src.radial_divergence(r)); }, ScalarInfo{"div b+", {}, {}, {}, {}});
      const auto est = estimate_kato_norm(mollify_scalar(vplus, eps), meta.kato_div_plus->lambda, grid);
      const double rhs = meta.kato_div_plus->nu * (1.0 + tol);
      rep.results.push_back({"kato-div-plus", eps, est.refined_value, rhs, est.refined_value <= rhs});
    } else {
      rep.results.push_back({"kato-div-plus", eps, 0.0, 0.0, false, true});
    }
    if (opt.potential && opt.potential_kato) {
      const auto est = estimate_kato_norm(mollify_scalar(*opt.potential, eps), opt.potential_kato->lambda, grid);
      const double rhs = opt.potential_kato->nu * (1.0 + tol);
      rep.results.push_back({"kato-potential", eps, est.refined_value, rhs, est.refined_value <= rhs});
    }

    if (be.has_divergence()) {
      auto commutation_error = [&](const GridSpec& g) {
        const auto m = make_mesh(g);
        const GridFunction num = numeric_divergence(be, m);
        double err = 0.0, scale = 0.0;
        for (Index i = 0; i < m->size(); ++i) {
          const double ref = be.radial_divergence(m->radius(i));
          err = std::max(err, std::abs(num.values[i] - ref));
          scale = std::max(scale, std::abs(ref));
        }
        return scale > 0.0 ? err / scale : err;
      };
      const double e1 = commutation_error(grid);
      const double e2 = commutation_error(grid.refined());
      const bool ok = e1 <= 1e-6 || e2 <= e1 / 3.0;
      rep.results.push_back({"commutation", eps, e2, e1, ok});
    } else {
      rep.results.push_back({"commutation", eps, 0.0, 0.0, false, true});
    }
  }
  return rep;
}

}  // namespace fbheat
