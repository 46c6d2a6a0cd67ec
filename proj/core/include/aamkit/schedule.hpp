#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aamkit/sets.hpp"

namespace aamkit {

/// Rate law for the drift of scheduled sets towards their limits.
struct DriftLaw {
  enum class Kind { kConstant, kHarmonic, kGeometric, kCustom };

  Kind kind = Kind::kConstant;
  /// Ratio for kGeometric (0 < rate < 1), scale for kHarmonic.
  double rate = 1.0;
  std::vector<double> values;  // kCustom

  static DriftLaw constant() { return {}; }
  static DriftLaw harmonic(double scale = 1.0) {
    return {Kind::kHarmonic, scale, {}};
  }
  static DriftLaw geometric(double ratio) {
    return {Kind::kGeometric, ratio, {}};
  }
  static DriftLaw custom(std::vector<double> values) {
    return {Kind::kCustom, 1.0, std::move(values)};
  }

  /// Drift magnitude at step n: 0, scale / max(n, 1), ratio^n or values[n].
  double at(std::size_t n) const;
  /// Longest schedule the law supports (unbounded laws return max size_t).
  std::size_t max_length() const;
  std::string name() const;
};

/// Limit-problem minimizer (P*, Q*) used for the proof sequences.
struct OracleMinimizer {
  Point p;
  Point q;
};

/// The revealed set pairs (P_n, Q_n), n = 0 .. size()-1, and the limits.
class SetSchedule {
 public:
  SetSchedule(std::vector<SetPtr> p_sets, std::vector<SetPtr> q_sets,
              SetPtr p_limit, SetPtr q_limit);

  /// length copies of (p, q); limits are the sets themselves.
  static SetSchedule constant(SetPtr p, SetPtr q, std::size_t length);

  std::size_t size() const { return p_sets_.size(); }
  const ProjectableSet& p_at(std::size_t n) const { return *p_sets_.at(n); }
  const ProjectableSet& q_at(std::size_t n) const { return *q_sets_.at(n); }
  const SetPtr& p_ptr(std::size_t n) const { return p_sets_.at(n); }
  const SetPtr& q_ptr(std::size_t n) const { return q_sets_.at(n); }
  const ProjectableSet& p_limit() const { return *p_limit_; }
  const ProjectableSet& q_limit() const { return *q_limit_; }
  const SetPtr& p_limit_ptr() const { return p_limit_; }
  const SetPtr& q_limit_ptr() const { return q_limit_; }

  /// eps_n = d_H(P_n, P) + d_H(Q_n, Q). Memoized; pointer-identical sets
  /// contribute exactly zero.
  double eps(std::size_t n) const;

  /// Limits known only empirically (e.g. a full-sample distribution).
  bool eps_estimated() const { return eps_estimated_; }
  void set_eps_estimated(bool v) { eps_estimated_ = v; }

  const std::optional<OracleMinimizer>& oracle() const { return oracle_; }
  void set_oracle(OracleMinimizer m) { oracle_ = std::move(m); }

  /// Net spacing for limits that need the sampled Hausdorff fallback.
  void set_hausdorff_resolution(double h) { hausdorff_resolution_ = h; }

 private:
  double set_distance(const SetPtr& a, const SetPtr& b) const;

  std::vector<SetPtr> p_sets_;
  std::vector<SetPtr> q_sets_;
  SetPtr p_limit_;
  SetPtr q_limit_;
  bool eps_estimated_ = false;
  std::optional<OracleMinimizer> oracle_;
  double hausdorff_resolution_ = 1e-2;
  mutable std::vector<std::optional<double>> eps_cache_;
};

}  // namespace aamkit
