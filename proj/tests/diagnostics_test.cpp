#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "aamkit/diagnostics.hpp"
#include "aamkit/divergence.hpp"
#include "aamkit/engine.hpp"
#include "oracles.hpp"

using namespace aamkit;

namespace {

SetPtr box(Point lo, Point hi) { return std::make_shared<BoxSet>(std::move(lo), std::move(hi)); }

// Ball of radius 1 + 1/n drifting onto the unit ball, Q fixed at (3, 0).
struct BallDrift {
  SquaredDistanceCost cost;
  SetSchedule schedule;
  AamTrace trace;

  static SetSchedule make(std::size_t len) {
    std::vector<SetPtr> ps, qs;
    const SetPtr q = std::make_shared<PointSet>(Point{3, 0});
    for (std::size_t n = 0; n < len; ++n) {
      ps.push_back(std::make_shared<BallSet>(
          Point{0, 0}, 1.0 + 1.0 / static_cast<double>(std::max<std::size_t>(n, 1))));
      qs.push_back(q);
    }
    SetSchedule s(ps, qs, std::make_shared<BallSet>(Point{0, 0}, 1.0), q);
    s.set_oracle({{1, 0}, {3, 0}});
    return s;
  }

  BallDrift() : schedule(make(301)) {
    trace = run_aam(cost, schedule, Point{3, 0}, {300, 1e-300, 5});
  }
};

AamTrace trace_with_eps(std::size_t len, double (*eps)(std::size_t)) {
  AamTrace t;
  for (std::size_t n = 0; n < len; ++n) {
    TraceRecord r;
    r.n = n;
    r.p = {0.0};
    r.q = {0.0};
    r.eps = eps(n);
    r.cost = 1.0;
    if (n > 0) {
      r.cross_cost = 1.0;
      r.gamma = t.records.back().eps + r.eps;
    }
    t.records.push_back(r);
  }
  return t;
}

}  // namespace

TEST(ThreePoint, ConvexEuclideanSetsHaveNoViolations) {
  const SquaredDistanceCost cost;
  const auto r = check_three_point(cost, *box({0, 0}, {1, 1}),
                                   BallSet({3, 1}, 1.0), 1000, 5);
  EXPECT_EQ(r.samples, 1000u);
  EXPECT_TRUE(r.ok());
}

TEST(ThreePoint, ConvexMeasureSetsHaveNoViolations) {
  const div::KlCost cost;
  auto problem = std::make_shared<div::MixtureProblem>();
  problem->outcomes = {"a", "b", "c"};
  problem->components = {{0.6, 0.3, 0.1}, {0.1, 0.2, 0.7}};
  problem->weight_floor = 0.1;
  problem->component_floor = 0.1;
  const div::CouplingSet p(problem, {0.2, 0.5, 0.3});
  const div::WeightSet q(problem);
  EXPECT_TRUE(check_three_point(cost, p, q, 1000, 9).ok());
  EXPECT_TRUE(check_four_point(cost, p, q, 1000, 9).ok());
}

TEST(ThreePoint, TwoPointSetIsACounterexample) {
  // P = {(0,0),(2,0)}, Q = (1,1): both candidates are at distance^2 2 and
  // the tie goes to (0,0). With P = (2,0): delta = 4, D(P~,Q) = 2,
  // D(P,Q) = 2, slack = 2 - 6 = -4.
  const SquaredDistanceCost cost;
  const FiniteSet p({{0, 0}, {2, 0}});
  const PointSet q({1, 1});
  const auto r = check_three_point(cost, p, q, 200, 3);
  ASSERT_FALSE(r.ok());
  EXPECT_DOUBLE_EQ(r.worst_slack, -4.0);
  for (const auto& v : r.violations) {
    EXPECT_EQ(v.p, (Point{2, 0}));
    EXPECT_EQ(v.p_tilde, (Point{0, 0}));
  }
}

TEST(FourPoint, BoxesHaveNoViolations) {
  const SquaredDistanceCost cost;
  const auto r = check_four_point(cost, *box({0, 0}, {1, 1}), *box({2, -1}, {4, 0.5}), 1000, 8);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.condition, "four-point");
}

TEST(FourPoint, DegeneratePairsHold) {
  // Every third sample uses P~ = P; a point P-set makes all of them so.
  const SquaredDistanceCost cost;
  EXPECT_TRUE(check_four_point(cost, PointSet({0.5, 0.5}), *box({2, 2}, {3, 3}), 300, 1).ok());
}

TEST(Modulus, ZeroAtZero) {
  const SquaredDistanceCost cost;
  const ModulusEstimator w(cost, *box({0, 0}, {1, 1}), 500, 1);
  EXPECT_EQ(w(0.0), 0.0);
}

TEST(Modulus, LinearFunctionOnInterval) {
  // D(a, b) = a: omega(t) = min(t, 1).
  const FunctionCost cost([](PointView a, PointView) { return a[0]; },
                          [](PointView, PointView) { return 0.0; });
  const ModulusEstimator w(cost, *box({0}, {1}), 2000, 4);
  EXPECT_LE(w(0.3), 0.3 + 1e-12);
  EXPECT_GE(w(0.3), 0.29);
  EXPECT_LE(w(2.0), 1.0 + 1e-12);
  EXPECT_GE(w(2.0), 0.95);
}

TEST(Modulus, MonotoneInT) {
  const div::KlCost cost;
  const div::MeasureSpaceSet m(3, 0.1, 1.0);
  const ModulusEstimator w(cost, m, 500, 2);
  double prev = 0.0;
  for (double t = 0.0; t < 1.0; t += 0.01) {
    EXPECT_GE(w(t), prev);
    prev = w(t);
  }
}

TEST(Modulus, KlOnBoundedMeasuresAgainstGrid) {
  // Exhaustive 0.05-grid over M({a,b}, 0.1, 1): every base pair (A, B)
  // against every displaced pair with d(A,A') + d(B,B') <= 0.05.
  const div::KlCost cost;
  const double t = 0.05, g = 0.05;
  std::vector<Point> pts;
  for (const auto& x : oracle::lattice({0.1, 0.1}, {0.9, 0.9}, g)) {
    if (x[0] + x[1] <= 1.0 + 1e-12) pts.push_back(x);
  }
  double grid = 0.0;
  for (const auto& a : pts) {
    for (const auto& b : pts) {
      const double base = cost(a, b);
      for (const auto& a2 : pts) {
        const double da = max_norm_distance(a, a2);
        if (da > t + 1e-12) continue;
        for (const auto& b2 : pts) {
          if (da + max_norm_distance(b, b2) > t + 1e-12) continue;
          grid = std::max(grid, std::abs(cost(a2, b2) - base));
        }
      }
    }
  }
  const double est = estimate_modulus(cost, div::MeasureSpaceSet(2, 0.1, 1.0), t, 4000, 6);
  EXPECT_GT(est, 0.0);
  // Both are lower bounds on the true modulus; they must be of one size.
  EXPECT_GE(est, 0.9 * grid);
  EXPECT_LE(est, 1.5 * grid);
}

TEST(Lemma1, ConstantZeroSequences) {
  const std::vector<double> a(20, 0.0), b(20, 0.0);
  const auto r = lemma1_diagnostic(a, b, 0.0);
  EXPECT_TRUE(r.hypothesis_holds());
  EXPECT_EQ(r.final_min_a, 0.0);
}

TEST(Lemma1, SequenceAboveC) {
  const double c = 0.5;
  std::vector<double> a, b;
  for (int n = 1; n <= 200; ++n) {
    a.push_back(c + 1.0 / (n * n));
    b.push_back(0.0);
  }
  const auto r = lemma1_diagnostic(a, b, c);
  for (double s : r.positive_part_sums) EXPECT_EQ(s, 0.0);
  EXPECT_NEAR(r.final_min_a, c, 1e-4);
}

TEST(Lemma1, MissingProofSequencesAreNotEvaluable) {
  const auto t = trace_with_eps(10, [](std::size_t) { return 0.0; });
  const auto r = lemma1_diagnostic(t, 0.0);
  EXPECT_FALSE(r.evaluable);
  EXPECT_FALSE(r.note.empty());
}

TEST(Lemma1, BallDriftTrace) {
  BallDrift bd;
  const ModulusEstimator w(bd.cost, *box({-2, -2}, {3, 2}), 2000, 11);
  const Modulus omega = [&w](double t) { return w(t); };
  attach_proof_sequences(bd.trace, omega);
  const auto r = lemma1_diagnostic(bd.trace, 4.0);
  ASSERT_TRUE(r.evaluable) << r.note;
  EXPECT_EQ(r.failures, 0u);
}

TEST(Drift, ConstantScheduleReducesToMinimizerProperty) {
  const SquaredDistanceCost cost;
  const auto t = run_classical(cost, box({0, 0}, {1, 1}),
                               std::make_shared<BallSet>(Point{3, 3}, 1.0), Point{3, 3});
  const auto r = drift_inequality_check(t, [](double) { return 0.0; });
  EXPECT_TRUE(r.all_ok());
}

TEST(Drift, BallDriftPassesEverywhere) {
  BallDrift bd;
  const ModulusEstimator w(bd.cost, *box({-2, -2}, {3, 2}), 2000, 12);
  const auto r = drift_inequality_check(bd.trace, [&w](double t) { return w(t); });
  EXPECT_TRUE(r.all_ok());
  annotate_drift(bd.trace, r);
  for (std::size_t n = 1; n < bd.trace.records.size(); ++n) {
    EXPECT_TRUE(bd.trace.records[n].drift_ok.value_or(false));
  }
}

TEST(Drift, HarmonicDriftIsFlaggedNonSummable) {
  // omega(t) = t: partial sums of 2/n grow like 2 log n.
  const auto t = trace_with_eps(10001, [](std::size_t n) {
    return 1.0 / static_cast<double>(std::max<std::size_t>(n, 1));
  });
  const auto r = drift_inequality_check(t, [](double x) { return x; });
  EXPECT_FALSE(r.appears_summable);
  EXPECT_NEAR(r.partial_sums.back() - r.partial_sums[5000], 2.0 * std::log(2.0), 1e-3);
}

TEST(Drift, GeometricDriftIsSummable) {
  const auto t = trace_with_eps(200, [](std::size_t n) { return std::pow(0.5, n); });
  const auto r = drift_inequality_check(t, [](double x) { return x; });
  EXPECT_TRUE(r.appears_summable);
  for (std::size_t n = 1; n < r.partial_sums.size(); ++n) {
    EXPECT_GE(r.partial_sums[n], r.partial_sums[n - 1]);
    EXPECT_LE(r.partial_sums[n], 4.0 + 1e-12);
  }
}
