#include "aamkit/engine.hpp"

#include <cmath>
#include <limits>

#include "aamkit/error.hpp"

namespace aamkit {

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kConverged:
      return "converged";
    case RunStatus::kExhausted:
      return "exhausted";
    case RunStatus::kTruncated:
      return "truncated";
  }
  return "unknown";
}

RunStatus run_status_from_string(const std::string& s) {
  if (s == "converged") return RunStatus::kConverged;
  if (s == "exhausted") return RunStatus::kExhausted;
  if (s == "truncated") return RunStatus::kTruncated;
  throw DomainError("unknown run status '" + s + "'");
}

namespace {

Point project_at(const CostFunction& cost, const ProjectableSet& set,
                 PointView fixed, Side side, std::size_t n,
                 const EngineOptions& options) {
  try {
    return set.project(cost, fixed, side, options.fallback_resolution);
  } catch (const ProjectionError&) {
    throw;
  } catch (const std::exception& e) {
    throw ProjectionError(n, e.what());
  }
}

// P*_n: the oracle minimizer's P moved onto P_n along the metric.
Point oracle_on(const ProjectableSet& set, const Point& p_star) {
  if (auto p = set.nearest(p_star)) return std::move(*p);
  return set.project(SquaredDistanceCost(set.metric()), p_star, Side::kFirst);
}

}  // namespace

AamTrace run_aam(const CostFunction& cost, const SetSchedule& schedule,
                 PointView q0, const StoppingRule& stop,
                 const EngineOptions& options) {
  const auto& q_first = schedule.q_at(0);
  if (q0.size() != q_first.dimension()) {
    throw DomainError("q0 has dimension " + std::to_string(q0.size()) +
                      ", Q_0 has dimension " +
                      std::to_string(q_first.dimension()));
  }
  if (!q_first.contains(q0, options.membership_tol)) {
    throw DomainError("q0 is not in Q_0");
  }

  AamTrace trace;
  trace.eps_estimated = schedule.eps_estimated();
  const auto& oracle = schedule.oracle();

  auto record_oracle = [&](TraceRecord& rec) {
    if (oracle) {
      rec.oracle_cross = cost(oracle_on(schedule.p_at(rec.n), oracle->p), rec.q);
    }
  };

  {
    TraceRecord rec;
    rec.n = 0;
    rec.q.assign(q0.begin(), q0.end());
    rec.p = project_at(cost, schedule.p_at(0), rec.q, Side::kFirst, 0, options);
    rec.cost = cost(rec.p, rec.q);
    rec.eps = schedule.eps(0);
    record_oracle(rec);
    trace.records.push_back(std::move(rec));
  }

  const std::size_t window = std::max<std::size_t>(stop.window, 1);
  std::size_t streak = 0;
  trace.status = RunStatus::kExhausted;
  for (std::size_t n = 1;; ++n) {
    if (n > stop.max_iter) {
      trace.status = RunStatus::kExhausted;
      break;
    }
    if (n >= schedule.size()) {
      trace.status = RunStatus::kTruncated;
      break;
    }
    const TraceRecord& prev = trace.records.back();
    TraceRecord rec;
    rec.n = n;
    rec.p = project_at(cost, schedule.p_at(n), prev.q, Side::kFirst, n, options);
    rec.cross_cost = cost(rec.p, prev.q);
    rec.q = project_at(cost, schedule.q_at(n), rec.p, Side::kSecond, n, options);
    rec.cost = cost(rec.p, rec.q);
    rec.eps = schedule.eps(n);
    rec.gamma = prev.eps + rec.eps;
    record_oracle(rec);

    streak = std::abs(rec.cost - prev.cost) < stop.tol ? streak + 1 : 0;
    trace.records.push_back(std::move(rec));
    if (streak >= window) {
      trace.status = RunStatus::kConverged;
      break;
    }
  }
  summarize_tail(trace, schedule.p_at(0).metric(), options);
  return trace;
}

AamTrace run_classical(const CostFunction& cost, const SetPtr& p_set,
                       const SetPtr& q_set, PointView q0,
                       const StoppingRule& stop, const EngineOptions& options) {
  if (!p_set || !q_set) throw DomainError("classical run needs both sets");
  const std::size_t length =
      stop.max_iter == std::numeric_limits<std::size_t>::max() ? stop.max_iter
                                                               : stop.max_iter + 1;
  auto schedule = SetSchedule::constant(p_set, q_set, length);
  auto trace = run_aam(cost, schedule, q0, stop, options);
  trace.eps_available = false;
  return trace;
}

void summarize_tail(AamTrace& trace, const Metric& metric,
                    const EngineOptions& options) {
  trace.limit_candidates.clear();
  trace.liminf_estimate = kNotAvailable;
  if (trace.records.empty()) return;

  const std::size_t iters = trace.iterations();
  std::size_t first = 0;
  if (iters > 0) {
    const auto width = static_cast<std::size_t>(
        std::ceil(options.window_fraction * static_cast<double>(iters)));
    first = iters + 1 - std::clamp<std::size_t>(width, 1, iters);
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t n = first; n < trace.records.size(); ++n) {
    const auto& rec = trace.records[n];
    best = std::min(best, rec.cost);
    bool merged = false;
    for (auto& cand : trace.limit_candidates) {
      if (metric(rec.p, cand.p) + metric(rec.q, cand.q) <= options.cluster_radius) {
        if (rec.cost < cand.cost) cand = {rec.p, rec.q, rec.cost, rec.n};
        merged = true;
        break;
      }
    }
    if (!merged) trace.limit_candidates.push_back({rec.p, rec.q, rec.cost, rec.n});
  }
  trace.liminf_estimate = best;
}

}  // namespace aamkit
