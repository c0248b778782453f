#include "fbheat/catalog.hpp"

#include "fbheat/errors.hpp"

#include <sstream>

namespace fbheat {

CatalogId CatalogId::parse(const std::string& text) {
  CatalogId id;
  const auto colon = text.find(':');
  id.name = text.substr(0, colon);
  if (id.name.empty()) throw InvalidArgument("empty catalog identifier");
  if (colon == std::string::npos) return id;
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidArgument("catalog parameter '" + item + "' lacks '='");
    id.params[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return id;
}

double CatalogId::number(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw InvalidArgument("parameter '" + key + "' of '" + name + "' is not a number");
  }
}

double CatalogId::number(const std::string& key) const {
  if (!params.count(key)) throw InvalidArgument("'" + name + "' requires parameter '" + key + "'");
  return number(key, 0.0);
}

int CatalogId::integer(const std::string& key, int fallback) const {
  return static_cast<int>(number(key, fallback));
}

std::string CatalogId::text(const std::string& key, const std::string& fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

DriftField drift_from_id(const std::string& text) {
  const auto id = CatalogId::parse(text);
  const int d = id.integer("d", 3);
  if (id.name == "hardy") {
    const std::string s = id.text("sign", "+");
    HardySign sign;
    if (s == "+" || s == "attracting") sign = HardySign::Attracting;
    else if (s == "-" || s == "repelling") sign = HardySign::Repelling;
    else throw InvalidArgument("Hardy sign must be '+' or '-'");
    return hardy_drift(d, id.number("delta"), sign);
  }
  if (id.name == "zero") return zero_drift(d);
  if (id.name == "constant") {
    Vec v = Vec::Zero(d);
    v[0] = id.number("v", 0.0);
    for (int k = 0; k < d; ++k) v[k] = id.number("v" + std::to_string(k + 1), v[k]);
    return constant_drift(v);
  }
  if (id.name == "linear") return linear_drift(d, id.number("c"), id.integer("axis", -1));
  if (id.name == "tanh") return tanh_drift(d, id.number("amp", 1.0));
  throw InvalidArgument("unknown drift '" + id.name + "'");
}

DiffusionMatrix matrix_from_id(const std::string& text) {
  const auto id = CatalogId::parse(text);
  MatrixParams p;
  p.dim = id.integer("d", 3);
  if (id.name == "identity") return make_matrix(MatrixKind::Identity, p);
  if (id.name == "diag") {
    p.diagonal = Vec::Ones(p.dim);
    for (int k = 0; k < p.dim; ++k) p.diagonal[k] = id.number("a" + std::to_string(k + 1), 1.0);
    return make_matrix(MatrixKind::DiagonalConstant, p);
  }
  if (id.name == "checkerboard") {
    p.matrix = id.number("a", 1.0) * Mat::Identity(p.dim, p.dim);
    p.matrix2 = id.number("b", 2.0) * Mat::Identity(p.dim, p.dim);
    p.cell = id.number("cell", 1.0);
    return make_matrix(MatrixKind::Checkerboard, p);
  }
  throw InvalidArgument("unknown matrix '" + id.name + "'");
}

ScalarField scalar_from_id(const std::string& text) {
  const auto id = CatalogId::parse(text);
  const int d = id.integer("d", 3);
  if (id.name == "indicator-ball") return indicator_ball(d, id.number("radius", 1.0));
  if (id.name == "inverse-square") return inverse_square(d);
  if (id.name == "constant") return constant_scalar(d, id.number("value"));
  throw InvalidArgument("unknown scalar field '" + id.name + "'");
}

}  // namespace fbheat
