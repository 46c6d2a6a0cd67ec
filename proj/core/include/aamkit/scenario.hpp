#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aamkit/cost.hpp"
#include "aamkit/divergence.hpp"
#include "aamkit/schedule.hpp"
#include "aamkit/sets.hpp"
#include "aamkit/trace.hpp"

namespace aamkit::io {

inline constexpr const char* kScenarioSchema = "aamkit.scenario/1";
inline constexpr const char* kToolVersion = "0.1.0";

enum class ScenarioKind { kClassical, kAamDivergence, kAamHilbert, kPortfolio };

std::string to_string(ScenarioKind kind);

/// One parametric set, as written in a scenario file.
struct SetSpec {
  std::string family;  // point | finite | box | ball | halfspace | affine | simplex
  Point at;                   // point
  std::vector<Point> points;  // finite
  Point lo, hi;               // box; also sampling box of unbounded families
  Point center;               // ball
  double radius = 0.0;        // ball
  Point normal;               // halfspace
  double offset = 0.0;        // halfspace
  Point anchor;               // affine
  std::vector<Point> basis;   // affine
  std::size_t dim = 0;        // simplex
  double floor = 0.0;         // simplex

  std::size_t dimension() const;
};

SetPtr build_set(const SetSpec& spec);

struct ClassicalSpec {
  std::string cost = "squared-euclidean";  // or "kl"
  SetSpec p_set;
  SetSpec q_set;
  Point q0;
};

struct HilbertSpec {
  std::vector<double> weights;
  std::size_t block_dim = 0;
  std::vector<SetSpec> blocks;  // limit sets S_i
  std::vector<Point> directions;
  DriftLaw drift;
  std::optional<Point> q0;
};

struct DivergenceSpec {
  std::vector<std::string> outcomes;
  std::vector<std::vector<double>> components;
  double c0 = 0.0;
  std::optional<double> mu0;  // default: smallest component entry
  // Sample source: generated from true_weights, or listed explicitly.
  std::optional<std::vector<double>> true_weights;
  std::size_t sample_count = 0;
  std::optional<std::vector<std::string>> samples;
  // Distribution source: an explicit marginal drifting along a direction.
  std::optional<std::vector<double>> marginal;
  std::vector<double> marginal_direction;
  DriftLaw drift;
  div::EstimationMode mode = div::EstimationMode::kBatch;
  std::size_t batch_size = 1;

  div::MixtureProblem problem() const;
};

struct PortfolioSpec {
  div::ReturnMatrix returns;
  double c0 = 0.0;
};

struct OutputSpec {
  std::string trace_path;
  std::string summary_path;
};

struct ScenarioConfig {
  std::string name;
  ScenarioKind kind = ScenarioKind::kClassical;
  std::uint64_t seed = 0;
  StoppingRule stop;
  /// Also solve the limit problem (classical alternation to tight
  /// tolerance) and report the gap.
  bool oracle = false;
  std::size_t modulus_samples = 2000;
  OutputSpec output;

  std::optional<ClassicalSpec> classical;
  std::optional<HilbertSpec> hilbert;
  std::optional<DivergenceSpec> divergence;
  std::optional<PortfolioSpec> portfolio;

  /// Canonical (sorted-key) form of the parsed document.
  std::string canonical;

  /// FNV-1a 64 of the canonical document and the effective seed/stop/output.
  std::uint64_t hash() const;
};

/// Parses and validates. Throws ConfigError listing every problem found;
/// JSON syntax errors carry line and column, field errors the field path.
ScenarioConfig parse_scenario(const std::string& text,
                              const std::string& source = "<string>");
/// Throws IoError when the file cannot be read.
ScenarioConfig load_scenario(const std::string& path);

/// Returns every semantic problem; empty when valid.
std::vector<std::string> validate(const ScenarioConfig& config);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_iter;
  std::optional<double> tol;
  std::optional<std::string> out;
};

/// AAMKIT_SEED / AAMKIT_OUT from the environment.
Overrides environment_overrides();

/// Applies env first, then flags (flags win). Re-validates.
void apply_overrides(ScenarioConfig& config, const Overrides& env,
                     const Overrides& flags);

/// Independent draws from sum_i c_i mu_i: component by c, outcome by mu_i.
/// Throws DomainError unless weights are >= c0 and sum to 1.
std::vector<std::size_t> generate_mixture_samples(
    const div::MixtureProblem& problem, std::span<const double> true_weights,
    std::size_t n, std::uint64_t seed);

struct ScenarioResult {
  AamTrace trace;
  std::string metric_note;
  std::optional<double> oracle_value;
  std::vector<double> weights;  // divergence / portfolio
  Point filter_point;           // hilbert

  double final_cost() const { return trace.last().cost; }
};

/// Runs the scenario, then annotates the trace with the drift check using a
/// modulus estimated on the scenario's compact domain.
ScenarioResult run_scenario(const ScenarioConfig& config);

std::string format_summary(const ScenarioConfig& config,
                           const ScenarioResult& result);

/// The pieces the condition checkers need, taken at the first step of the
/// scenario's schedule: P_1 with Q_0 for the three point check, P_1 with
/// Q_1 for the four point check.
struct ConditionSetup {
  std::shared_ptr<const CostFunction> cost;
  SetPtr p_set;
  SetPtr q_set_prev;
  SetPtr q_set;
};

ConditionSetup condition_setup(const ScenarioConfig& config);

/// Compact region M the modulus is estimated on.
struct ModulusSetup {
  std::shared_ptr<const CostFunction> cost;
  SetPtr domain;
};

ModulusSetup modulus_setup(const ScenarioConfig& config);

/// Limit problem solved by classical alternation at tol 1e-14.
OracleMinimizer limit_oracle(const ScenarioConfig& config);

}  // namespace aamkit::io
