#pragma once

#include "aamkit/cost.hpp"
#include "aamkit/schedule.hpp"
#include "aamkit/sets.hpp"
#include "aamkit/trace.hpp"

namespace aamkit {

struct EngineOptions {
  /// Tolerance for the q0 membership precondition.
  double membership_tol = 1e-9;
  /// Fraction of iterations forming the trailing window for the liminf
  /// estimate and limit-point extraction.
  double window_fraction = 0.1;
  /// Trailing points within this d_2 radius are merged into one candidate.
  double cluster_radius = 1e-6;
  double fallback_resolution = kDefaultFallbackResolution;
};

/// Adaptive alternating minimization:
///   P_n in argmin_{P in P_n} D(P, Q_{n-1}),  Q_n in argmin_{Q in Q_n} D(P_n, Q).
///
/// Throws DomainError when q0 is not in Q_0 and ProjectionError (carrying
/// the iteration) when an oracle fails. Stops on the stopping rule
/// (kConverged), at stop.max_iter (kExhausted) or when the schedule has no
/// set pair for the next step (kTruncated).
AamTrace run_aam(const CostFunction& cost, const SetSchedule& schedule,
                 PointView q0, const StoppingRule& stop = {},
                 const EngineOptions& options = {});

/// Classical alternating minimization on fixed sets; the constant-schedule
/// specialization of run_aam, so traces agree bit for bit.
AamTrace run_classical(const CostFunction& cost, const SetPtr& p_set,
                       const SetPtr& q_set, PointView q0,
                       const StoppingRule& stop = {},
                       const EngineOptions& options = {});

/// Recomputes the trailing-window liminf estimate and limit-point candidates.
void summarize_tail(AamTrace& trace, const Metric& metric,
                    const EngineOptions& options = {});

}  // namespace aamkit
