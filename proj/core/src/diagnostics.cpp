#include "aamkit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "aamkit/error.hpp"

namespace aamkit {

namespace {

void require_samples(std::size_t n) {
  if (n == 0) throw DomainError("sample count must be at least 1");
}

void record(ViolationReport& report, Violation v, double scale) {
  report.worst_slack = std::min(report.worst_slack, v.slack);
  if (v.slack < -report.tol * std::max(1.0, std::abs(scale))) {
    report.violations.push_back(std::move(v));
  }
}

}  // namespace

ViolationReport check_three_point(const CostFunction& cost,
                                  const ProjectableSet& p_set,
                                  const ProjectableSet& q_set_prev,
                                  std::size_t sample_count, std::uint64_t seed,
                                  double tol) {
  require_samples(sample_count);
  ViolationReport report{"three-point", sample_count, tol,
                         std::numeric_limits<double>::infinity(), {}};
  Rng rng(seed);
  for (std::size_t s = 0; s < sample_count; ++s) {
    Point p = p_set.sample(rng);
    Point q = q_set_prev.sample(rng);
    Point p_tilde = p_set.project(cost, q, Side::kFirst);
    const double rhs = cost(p, q);
    const double lhs = cost.delta(p, p_tilde) + cost(p_tilde, q);
    record(report, {s, std::move(p), std::move(p_tilde), std::move(q), {}, rhs - lhs},
           rhs);
  }
  return report;
}

ViolationReport check_four_point(const CostFunction& cost,
                                 const ProjectableSet& p_set,
                                 const ProjectableSet& q_set,
                                 std::size_t sample_count, std::uint64_t seed,
                                 double tol) {
  require_samples(sample_count);
  ViolationReport report{"four-point", sample_count, tol,
                         std::numeric_limits<double>::infinity(), {}};
  Rng rng(seed);
  for (std::size_t s = 0; s < sample_count; ++s) {
    Point p = p_set.sample(rng);
    Point q = q_set.sample(rng);
    Point p_tilde;
    switch (s % 3) {
      case 0:
        p_tilde = p_set.project(cost, q, Side::kFirst);
        break;
      case 1:
        p_tilde = p_set.sample(rng);
        break;
      default:
        p_tilde = p;
        break;
    }
    Point q_tilde = q_set.project(cost, p_tilde, Side::kSecond);
    const double rhs = cost(p, q) + cost.delta(p, p_tilde);
    const double lhs = cost(p, q_tilde);
    record(report,
           {s, std::move(p), std::move(p_tilde), std::move(q), std::move(q_tilde),
            rhs - lhs},
           rhs);
  }
  return report;
}

// ----------------------------------------------------------------------------

ModulusEstimator::ModulusEstimator(const CostFunction& cost,
                                   const ProjectableSet& domain,
                                   std::size_t sample_count,
                                   std::uint64_t seed) {
  std::vector<double> fractions;
  if (domain.is_convex()) {
    for (int k = 0; k <= 50; ++k) fractions.push_back(std::ldexp(1.0, -k));
    for (int k = 1; k < 16; ++k) fractions.push_back(k / 16.0);
  } else {
    fractions.push_back(1.0);
  }

  const Metric& d = cost.metric();
  std::vector<std::pair<double, double>> pairs;  // (d_2, |dD|)
  pairs.reserve(sample_count * fractions.size() * 3 + 1);
  pairs.emplace_back(0.0, 0.0);

  // Odd samples start from the nearest point of a random bounding-box
  // corner: costs tend to vary fastest on the boundary, which uniform draws
  // rarely reach.
  const auto box = domain.bounding_box();
  Rng rng(seed);
  auto draw_base = [&](bool corner) {
    if (corner && box) {
      Point c(box->first.size());
      for (std::size_t j = 0; j < c.size(); ++j) {
        c[j] = (rng.next_u64() & 1U) ? box->second[j] : box->first[j];
      }
      if (auto near = domain.nearest(c)) return std::move(*near);
    }
    return domain.sample(rng);
  };
  Point a_f, b_f;
  for (std::size_t s = 0; s < sample_count; ++s) {
    const Point a = draw_base(s % 2 == 1);
    const Point b = draw_base(s % 2 == 1);
    const Point a2 = domain.sample(rng);
    const Point b2 = domain.sample(rng);
    const double base = cost(a, b);
    for (int mode = 0; mode < 3; ++mode) {
      const bool move_a = mode != 1;
      const bool move_b = mode != 0;
      for (double f : fractions) {
        a_f = a;
        b_f = b;
        for (std::size_t j = 0; j < a.size(); ++j) {
          if (move_a) a_f[j] = a[j] + f * (a2[j] - a[j]);
          if (move_b) b_f[j] = b[j] + f * (b2[j] - b[j]);
        }
        const double dist = d(a, a_f) + d(b, b_f);
        pairs.emplace_back(dist, std::abs(cost(a_f, b_f) - base));
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  distances_.reserve(pairs.size());
  prefix_max_.reserve(pairs.size());
  double running = 0.0;
  for (const auto& [dist, diff] : pairs) {
    running = std::max(running, diff);
    distances_.push_back(dist);
    prefix_max_.push_back(running);
  }
}

double ModulusEstimator::operator()(double t) const {
  if (!(t >= 0.0)) throw DomainError("modulus argument must be nonnegative");
  const auto it = std::upper_bound(distances_.begin(), distances_.end(), t);
  if (it == distances_.begin()) return 0.0;
  return prefix_max_[static_cast<std::size_t>(it - distances_.begin()) - 1];
}

double estimate_modulus(const CostFunction& cost, const ProjectableSet& domain,
                        double t, std::size_t sample_count,
                        std::uint64_t seed) {
  return ModulusEstimator(cost, domain, sample_count, seed)(t);
}

// ----------------------------------------------------------------------------

DriftReport drift_inequality_check(const AamTrace& trace, const Modulus& omega,
                                   double tol) {
  if (trace.records.size() < 2) {
    throw DomainError("drift check needs a trace with at least two records");
  }
  DriftReport report;
  const std::size_t count = trace.records.size();
  report.step_ok.assign(count, true);
  report.slack.assign(count, 0.0);
  report.partial_sums.assign(count, 0.0);

  double sum = 0.0;
  for (std::size_t n = 0; n < count; ++n) {
    const auto& rec = trace.records[n];
    sum += omega(2.0 * rec.eps);
    report.partial_sums[n] = sum;
    if (n == 0) continue;
    const double rhs = rec.cross_cost + omega(rec.gamma);
    report.slack[n] = rhs - rec.cost;
    if (report.slack[n] < -tol * std::max(1.0, std::abs(rhs))) {
      report.step_ok[n] = false;
      ++report.failures;
    }
  }
  const double total = report.partial_sums.back();
  const double half = report.partial_sums[(count - 1) / 2];
  report.tail_growth_ratio = total > 0.0 ? (total - half) / total : 0.0;
  report.appears_summable = report.tail_growth_ratio < 0.01;
  return report;
}

void annotate_drift(AamTrace& trace, const DriftReport& report) {
  const std::size_t count = std::min(trace.records.size(), report.step_ok.size());
  for (std::size_t n = 1; n < count; ++n) {
    trace.records[n].drift_ok = static_cast<bool>(report.step_ok[n]);
    trace.records[n].drift_slack = report.slack[n];
  }
}

namespace {

// a[k] pairs with b[k + offset] and b[k + offset - 1]; offset is 0 when the
// sequences start together (step 0 vacuous) and 1 when a starts at n = 1.
Lemma1Report lemma1_impl(std::span<const double> a, std::span<const double> b,
                         std::size_t offset, double c, double tol) {
  Lemma1Report report;
  report.c = c;
  report.final_min_a = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const std::size_t n = k + offset;
    bool ok = true;
    if (n >= 1) {
      const double rhs = b[n - 1] + c;
      ok = a[k] + b[n] <= rhs + tol * std::max(1.0, std::abs(rhs));
    }
    report.step_ok.push_back(ok);
    if (!ok) ++report.failures;
    report.final_min_a = std::min(report.final_min_a, a[k]);
    report.running_min_a.push_back(report.final_min_a);
    sum += std::max(0.0, c - a[k]);
    report.positive_part_sums.push_back(sum);
  }
  return report;
}

}  // namespace

Lemma1Report lemma1_diagnostic(std::span<const double> a,
                               std::span<const double> b, double c,
                               double tol) {
  if (a.size() != b.size()) {
    throw DomainError("lemma1 sequences must have equal length");
  }
  return lemma1_impl(a, b, 0, c, tol);
}

Lemma1Report lemma1_diagnostic(const AamTrace& trace, double c, double tol) {
  std::vector<double> a, b;
  for (const auto& rec : trace.records) {
    if (!rec.oracle_cross || (rec.n >= 1 && !rec.proof_a)) {
      Lemma1Report report;
      report.evaluable = false;
      report.c = c;
      report.note = rec.oracle_cross
                        ? "not evaluable: proof sequence a_n was not attached"
                        : "not evaluable: no limit minimizer proxy for b_n";
      return report;
    }
    b.push_back(*rec.oracle_cross);
    if (rec.n >= 1) a.push_back(*rec.proof_a);
  }
  if (a.empty()) {
    Lemma1Report report;
    report.evaluable = false;
    report.c = c;
    report.note = "not evaluable: trace has no iterations";
    return report;
  }
  return lemma1_impl(a, b, 1, c, tol);
}

void attach_proof_sequences(AamTrace& trace, const Modulus& omega) {
  for (auto& rec : trace.records) {
    if (rec.n == 0) continue;
    rec.proof_a = rec.cost - 2.0 * omega(rec.gamma) - omega(rec.eps);
  }
}

}  // namespace aamkit
