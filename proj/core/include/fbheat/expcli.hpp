#pragma once

#include "fbheat/constlab.hpp"
#include "fbheat/kernelfit.hpp"
#include "fbheat/mollify.hpp"
#include "fbheat/nashlab.hpp"
#include "fbheat/quadform.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fbheat {

inline constexpr const char* kToolVersion = "0.3.0";

enum class Regime { Thm1Lower, Thm2Upper, Thm3TwoSided, CounterexampleUgb, CounterexampleLgb, Baseline };
std::string to_string(Regime r);
Regime regime_from_string(const std::string& s);

struct GridConfig {
  /// "radial" or "cartesian".
  std::string kind = "radial";
  /// 0 picks the default (1024 radial points, 40 per Cartesian axis).
  int points = 0;
  /// Box radius / half-width; 0 uses box_factor times the suggested half-width.
  double extent = 0.0;
  double box_factor = 1.25;
  double r_min_factor = 1e-3;
};

struct Expectations {
  std::optional<bool> lower_feasible;
  std::optional<bool> upper_feasible;
  std::optional<double> weight_exponent;
  double weight_tolerance = 0.1;
};

struct Scenario {
  std::string name;
  Regime regime = Regime::Baseline;
  std::string matrix = "identity:d=3";
  std::string drift = "zero:d=3";
  /// Preservation claims run over this list.
  std::vector<double> epsilons;
  /// Drift used by the solver is E_eps b when set.
  std::optional<double> solve_epsilon;
  double s = 0.0;
  double t = 1.0;
  std::vector<double> source;
  GridConfig grid;
  std::string scheme = "backward-euler";
  /// fit, weight, growth, halving, nash, conservation, domination, sandwich, preservation, lp-decay.
  std::vector<std::string> checks;
  double sandwich_p = 2.0;
  /// Weight-fit radii as fractions of sqrt(t - s). The tolerance is relative, absolute for a zero target.
  double weight_r_lo = 0.01;
  double weight_r_hi = 1.0;
  /// Nash diagnostics are repeated on a grid with twice the points.
  bool nash_refine = true;
  std::optional<double> c_n;
  Expectations expect;
};

Scenario parse_scenario(const std::string& yaml_text);
Scenario load_scenario(const std::string& path);
/// Canonical JSON of the scenario (sorted keys); the content hash is taken over it.
std::string canonical_json(const Scenario& s);
std::string sha256_hex(const std::string& bytes);

/// Every hypothesis of the declared regime the drift metadata contradicts. Empty when valid.
std::vector<std::string> validate(const Scenario& s);
/// Throws ValidationError listing every violation.
void validate_or_throw(const Scenario& s);

struct CheckResult {
  std::string name;
  bool pass = false;
  /// Declared in the scenario's expectations; decides the exit code.
  bool expectation = false;
  std::string detail;
};

struct RunEvent {
  long seq = 0;
  std::string event;
};

struct RunOptions {
  std::string out = "runs";
  std::optional<int> resolution;
  int jobs = 1;
  bool strict = false;
  /// Restricts the pipeline to these checks when non-empty.
  std::vector<std::string> only;
};

struct RunManifest {
  std::string scenario;
  std::string scenario_hash;
  std::string tool_version = kToolVersion;
  std::string run_dir;
  std::string ledger_json;
  std::vector<RunEvent> events;
  std::vector<std::string> artifacts;
  std::vector<CheckResult> checks;
  bool expectations_met = true;
  bool all_pass = true;
};

RunManifest run_scenario(const Scenario& s, const RunOptions& opt);
std::string manifest_json(const RunManifest& m);
/// 0 iff every declared expectation holds (and, with strict, every check passes).
int exit_code(const std::vector<RunManifest>& runs, bool strict);
/// One row per run for the consolidated table.
std::string summary_csv(const std::vector<RunManifest>& runs);

std::string to_json(const FormBoundEstimate& e);
std::string to_json(const KatoEstimate& e);
std::string to_json(const PreservationReport& r);
std::string to_json(const BoundFit& f);
std::string to_json(const WeightProfile& w);
std::string to_json(const NashDiagnostics& n);
std::string to_json(const GridSpec& g);

}  // namespace fbheat
