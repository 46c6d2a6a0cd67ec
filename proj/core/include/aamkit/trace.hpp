#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "aamkit/metric.hpp"

namespace aamkit {

struct StoppingRule {
  std::size_t max_iter = 10'000;
  /// Converged once |D_n - D_{n-1}| < tol for `window` consecutive steps.
  double tol = 1e-9;
  std::size_t window = 5;
};

enum class RunStatus {
  kConverged,  // stopping rule met
  kExhausted,  // hit max_iter
  kTruncated,  // schedule ran out first
};

std::string to_string(RunStatus status);
RunStatus run_status_from_string(const std::string& s);

inline constexpr double kNotAvailable = std::numeric_limits<double>::quiet_NaN();

/// One iteration of the alternation. Record n = 0 holds Q_0 and
/// P_0 = argmin_{P in P_0} D(P, Q_0).
struct TraceRecord {
  std::size_t n = 0;
  Point p;
  Point q;
  double cost = 0.0;                  // D(P_n, Q_n)
  double cross_cost = kNotAvailable;  // D(P_n, Q_{n-1}); NaN at n = 0
  double eps = 0.0;                   // d_H(P_n,P) + d_H(Q_n,Q)
  double gamma = kNotAvailable;       // eps_{n-1} + eps_n; NaN at n = 0
  /// Filled by annotate_drift(): D(P_n,Q_n) <= D(P_n,Q_{n-1}) + w(gamma_n).
  std::optional<bool> drift_ok;
  std::optional<double> drift_slack;
  /// b_n = D(P*_n, Q_n), when the schedule carries an oracle minimizer.
  std::optional<double> oracle_cross;
  /// a_n = D(P_n,Q_n) - 2 w(gamma_n) - w(eps_n), filled by
  /// attach_proof_sequences().
  std::optional<double> proof_a;
};

struct LimitCandidate {
  Point p;
  Point q;
  double cost = 0.0;
  std::size_t n = 0;
};

struct AamTrace {
  std::vector<TraceRecord> records;
  RunStatus status = RunStatus::kExhausted;
  /// False for classical runs (no limit sets to drift towards).
  bool eps_available = true;
  bool eps_estimated = false;
  /// Minimum cost over the trailing window (final 10% of iterations).
  double liminf_estimate = kNotAvailable;
  std::vector<LimitCandidate> limit_candidates;

  std::size_t iterations() const {
    return records.empty() ? 0 : records.size() - 1;
  }
  const TraceRecord& last() const { return records.back(); }
};

}  // namespace aamkit
