#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "aamkit/cost.hpp"
#include "aamkit/sets.hpp"
#include "aamkit/trace.hpp"

namespace aamkit {

// ----------------------------------------------------------------------------
// Three / four point conditions

struct Violation {
  std::size_t sample = 0;
  Point p;
  Point p_tilde;
  Point q;
  Point q_tilde;  // empty for the three point check
  /// rhs - lhs of the inequality; negative means violated.
  double slack = 0.0;
};

struct ViolationReport {
  std::string condition;
  std::size_t samples = 0;
  double tol = 0.0;
  double worst_slack = 0.0;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

inline constexpr double kConditionTol = 1e-9;

/// Samples P in p_set and Q in q_set_prev, projects P~ = argmin D(., Q) and
/// checks delta(P,P~) + D(P~,Q) <= D(P,Q) + tol * max(1, |D(P,Q)|).
ViolationReport check_three_point(const CostFunction& cost,
                                  const ProjectableSet& p_set,
                                  const ProjectableSet& q_set_prev,
                                  std::size_t sample_count, std::uint64_t seed,
                                  double tol = kConditionTol);

/// Samples P, P~ in p_set and Q in q_set, projects Q~ = argmin D(P~, .) and
/// checks D(P,Q~) <= D(P,Q) + delta(P,P~) + tol * max(1, |rhs|).
///
/// P~ cycles through three regimes: the projection of Q (the case the
/// convergence proof uses), an independent sample, and P itself.
ViolationReport check_four_point(const CostFunction& cost,
                                 const ProjectableSet& p_set,
                                 const ProjectableSet& q_set,
                                 std::size_t sample_count, std::uint64_t seed,
                                 double tol = kConditionTol);

// ----------------------------------------------------------------------------
// Modulus of continuity

/// Sampled lower bound on the modulus of continuity of D on (M x M, d_2),
/// d_2((A,B),(A',B')) = d(A,A') + d(B,B').
///
/// Base pairs (A,B) and partner pairs are drawn from `domain`; every other
/// base pair starts from the nearest points of random bounding-box corners.
/// Displaced pairs are taken along the segments towards the partners at a
/// fixed ladder of fractions (geometric down to 2^-50 plus a linear ladder).
/// Every evaluated pair is kept, so the estimate is exactly non-decreasing
/// in t. Segments need a convex domain; for non-convex domains only
/// endpoint pairs are used.
class ModulusEstimator {
 public:
  ModulusEstimator(const CostFunction& cost, const ProjectableSet& domain,
                   std::size_t sample_count, std::uint64_t seed);

  double operator()(double t) const;
  std::size_t pair_count() const { return distances_.size(); }

 private:
  std::vector<double> distances_;   // sorted ascending
  std::vector<double> prefix_max_;  // running max of |dD|
};

double estimate_modulus(const CostFunction& cost, const ProjectableSet& domain,
                        double t, std::size_t sample_count,
                        std::uint64_t seed);

using Modulus = std::function<double(double)>;

// ----------------------------------------------------------------------------
// Proof-quantity diagnostics. These are necessary-condition checks: the
// convergence argument uses the true modulus, they use an estimate.

struct DriftReport {
  std::vector<bool> step_ok;          // index n; step 0 is vacuous
  std::vector<double> slack;          // D(P_n,Q_{n-1}) + w(g_n) - D(P_n,Q_n)
  std::vector<double> partial_sums;   // sum_{m<=n} w(2 eps_m)
  std::size_t failures = 0;
  /// Tail test on the partial sums: growth over the second half of the
  /// trace is below 1% of the total.
  bool appears_summable = false;
  double tail_growth_ratio = 0.0;

  bool all_ok() const { return failures == 0; }
};

inline constexpr double kDiagnosticTol = 1e-9;

DriftReport drift_inequality_check(const AamTrace& trace, const Modulus& omega,
                                   double tol = kDiagnosticTol);

/// Writes drift_ok / drift_slack into the trace records.
void annotate_drift(AamTrace& trace, const DriftReport& report);

struct Lemma1Report {
  bool evaluable = true;
  std::string note;
  std::vector<bool> step_ok;               // a_n + b_n <= b_{n-1} + c + tol
  std::size_t failures = 0;
  std::vector<double> running_min_a;
  std::vector<double> positive_part_sums;  // sum (c - a_n)^+
  double final_min_a = 0.0;
  double c = 0.0;

  bool hypothesis_holds() const { return evaluable && failures == 0; }
};

Lemma1Report lemma1_diagnostic(std::span<const double> a,
                               std::span<const double> b, double c,
                               double tol = kDiagnosticTol);

/// Uses the records' proof_a / oracle_cross fields; reports "not evaluable"
/// when any is missing.
Lemma1Report lemma1_diagnostic(const AamTrace& trace, double c,
                               double tol = kDiagnosticTol);

/// Fills proof_a = D(P_n,Q_n) - 2 w(gamma_n) - w(eps_n) for n >= 1.
void attach_proof_sequences(AamTrace& trace, const Modulus& omega);

}  // namespace aamkit
