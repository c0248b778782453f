#pragma once

#include "fbheat/expcli.hpp"

#include <json.hpp>

namespace fbheat::detail {

using nlohmann::json;

json grid_json(const GridSpec& g);
json form_bound_json(const FormBoundEstimate& e);
json kato_json(const KatoEstimate& e);
json preservation_json(const PreservationReport& r);
json fit_json(const BoundFit& f);
json weight_json(const WeightProfile& w);
json nash_json(const NashDiagnostics& n);
json sample_json(const FitSample& s);

}  // namespace fbheat::detail
