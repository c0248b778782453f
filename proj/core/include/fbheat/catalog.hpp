#pragma once

#include "fbheat/fields.hpp"

#include <map>
#include <string>

namespace fbheat {

/// A parsed identifier of the form "name:key=value,key=value".
struct CatalogId {
  std::string name;
  std::map<std::string, std::string> params;

  static CatalogId parse(const std::string& text);
  double number(const std::string& key, double fallback) const;
  double number(const std::string& key) const;
  int integer(const std::string& key, int fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
};

/// hardy, zero, constant, linear, tanh. Example: "hardy:d=3,delta=1,sign=+".
DriftField drift_from_id(const std::string& id);
/// identity, diag, checkerboard. Example: "checkerboard:d=3,a=1,b=2,cell=1".
DiffusionMatrix matrix_from_id(const std::string& id);
/// indicator-ball, inverse-square, constant.
ScalarField scalar_from_id(const std::string& id);

}  // namespace fbheat
