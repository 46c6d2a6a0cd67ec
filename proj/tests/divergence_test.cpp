#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "aamkit/diagnostics.hpp"
#include "aamkit/divergence.hpp"
#include "aamkit/error.hpp"
#include "oracles.hpp"

using namespace aamkit;
using namespace aamkit::div;

namespace {

std::shared_ptr<MixtureProblem> two_by_two(double c0) {
  auto p = std::make_shared<MixtureProblem>();
  p->outcomes = {"a", "b"};
  p->components = {{0.9, 0.1}, {0.1, 0.9}};
  p->weight_floor = c0;
  p->component_floor = 0.1;
  return p;
}

// Grid maximizer of the sample log-likelihood over {c1 in [c0, 1-c0]}.
double grid_ml_weight(const std::vector<double>& pbar, const MixtureProblem& problem,
                      double h = 1e-4) {
  double best = -std::numeric_limits<double>::infinity(), arg = 0.0;
  const double c0 = problem.weight_floor;
  for (double c1 = c0; c1 <= 1.0 - c0 + 1e-12; c1 += h) {
    const std::vector<double> w = {c1, 1.0 - c1};
    const double ll = mixture_log_likelihood(w, pbar, problem);
    if (ll > best) {
      best = ll;
      arg = c1;
    }
  }
  return arg;
}

Point joint_with_marginals(const std::vector<double>& m, std::size_t ny, Rng& rng) {
  Point p;
  for (double mi : m) {
    const auto split = rng.dirichlet(ny);
    for (double s : split) p.push_back(mi * s);
  }
  return p;
}

}  // namespace

TEST(Kl, Examples) {
  EXPECT_EQ(kl_divergence(Point{0.2, 0.8}, Point{0.2, 0.8}), 0.0);
  const double v = kl_divergence(Point{0.5, 0.5}, Point{0.25, 0.75});
  EXPECT_NEAR(v, 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(v, 0.14384103622589045, 1e-15);
}

TEST(Kl, ConvexInFirstArgument) {
  Rng rng(4);
  for (int k = 0; k < 200; ++k) {
    const auto p1 = rng.dirichlet(4), p2 = rng.dirichlet(4), q = rng.dirichlet(4);
    const double lam = rng.uniform();
    Point mix(4);
    for (int j = 0; j < 4; ++j) mix[j] = lam * p1[j] + (1 - lam) * p2[j];
    EXPECT_LE(kl_divergence(mix, q),
              lam * kl_divergence(p1, q) + (1 - lam) * kl_divergence(p2, q) + 1e-12);
  }
}

TEST(Delta, Examples) {
  EXPECT_EQ(delta_div(Point{0.3, 0.7}, Point{0.3, 0.7}), 0.0);
  EXPECT_NEAR(delta_div(Point{0.3, 0.3}, Point{0.5, 0.5}), 0.6 * std::log(0.6) + 0.4, 1e-15);
  EXPECT_NEAR(delta_div(Point{0.3, 0.3}, Point{0.5, 0.5}), 0.09350462574040558, 1e-15);
  Rng rng(8);
  for (int k = 0; k < 50; ++k) {
    const auto p = rng.dirichlet(3), q = rng.dirichlet(3);
    EXPECT_NEAR(delta_div(p, q), kl_divergence(p, q), 1e-14);
  }
}

TEST(BoundedMeasure, CheckedVariantsValidate) {
  const BoundedMeasure p{{"a", "b"}, {0.5, 0.5}, 0.1, 1.0};
  const BoundedMeasure q{{"a", "b"}, {0.25, 0.75}, 0.1, 1.0};
  EXPECT_NEAR(kl_divergence(p, q), 0.14384103622589045, 1e-15);
  const BoundedMeasure other{{"a", "c"}, {0.25, 0.75}, 0.1, 1.0};
  EXPECT_THROW(kl_divergence(p, other), DomainError);
  const BoundedMeasure low{{"a", "b"}, {0.05, 0.95}, 0.1, 1.0};
  EXPECT_THROW(delta_div(p, low), DomainError);
}

TEST(MixtureProblem, ValidateRejectsBadTables) {
  auto p = *two_by_two(0.6);
  try {
    p.validate();
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("infeasible weight floor"), std::string::npos);
  }
  auto q = *two_by_two(0.1);
  q.components[0] = {0.5, 0.4};
  EXPECT_THROW(q.validate(), DomainError);
  auto r = *two_by_two(0.1);
  r.component_floor = 0.2;
  EXPECT_THROW(r.validate(), DomainError);
}

TEST(WeightProjection, FreeCase) {
  const auto problem = two_by_two(0.1);
  const Point joint = {0.5, 0.3, 0.1, 0.1};
  const auto r = project_onto_weight_set(joint, *problem);
  EXPECT_NEAR(r.weights.weights[0], 0.8, 1e-15);
  EXPECT_NEAR(r.weights.weights[1], 0.2, 1e-15);
  EXPECT_EQ(r.active_count, 2u);
  EXPECT_NEAR(r.eta, 1.0, 1e-15);

  double best = 0.0;
  const auto g = oracle::argmin(
      oracle::simplex_grid(2, 0.1, 1e-4),
      [&](const Point& c) { return kl_divergence(joint, problem->joint_from_weights(c)); },
      &best);
  EXPECT_NEAR(g[0], 0.8, 1e-4);
}

TEST(WeightProjection, FloorActive) {
  const auto problem = two_by_two(0.3);
  const Point joint = {0.6, 0.3, 0.05, 0.05};
  const auto r = project_onto_weight_set(joint, *problem);
  EXPECT_NEAR(r.weights.weights[0], 0.7, 1e-15);
  EXPECT_NEAR(r.weights.weights[1], 0.3, 1e-15);
  EXPECT_EQ(r.active_count, 1u);
  EXPECT_NEAR(r.eta, 9.0 / 7.0, 1e-15);
  const auto g = oracle::argmin(oracle::simplex_grid(2, 0.3, 1e-4), [&](const Point& c) {
    return kl_divergence(joint, problem->joint_from_weights(c));
  });
  EXPECT_NEAR(g[0], 0.7, 1e-4);
}

TEST(WeightProjection, IsAGenuineMinimizer) {
  auto problem = std::make_shared<MixtureProblem>();
  problem->outcomes = {"x", "y", "z"};
  problem->components = {{0.5, 0.3, 0.2}, {0.2, 0.2, 0.6}, {0.1, 0.8, 0.1}};
  problem->weight_floor = 0.15;
  problem->component_floor = 0.1;
  const WeightSet set(problem);
  Rng rng(17);
  for (int k = 0; k < 20; ++k) {
    const auto joint = joint_with_marginals(rng.dirichlet(3), 3, rng);
    const auto r = project_onto_weight_set(joint, *problem);
    ASSERT_TRUE(r.weights.is_valid(0.15));
    const double best = kl_divergence(joint, problem->joint_from_weights(r.weights.weights));
    for (int s = 0; s < 200; ++s) {
      EXPECT_GE(kl_divergence(joint, set.sample(rng)), best - 1e-12);
    }
  }
}

TEST(CouplingProjection, Examples) {
  auto single = std::make_shared<MixtureProblem>();
  single->outcomes = {"a", "b", "c"};
  single->components = {{0.2, 0.3, 0.5}};
  single->weight_floor = 0.5;
  single->component_floor = 0.2;
  const auto p1 = project_onto_coupling_set({{1.0}}, std::vector<double>{0.1, 0.6, 0.3}, *single);
  for (std::size_t y = 0; y < 3; ++y) EXPECT_NEAR(p1[y], (Point{0.1, 0.6, 0.3})[y], 1e-15);

  auto same = std::make_shared<MixtureProblem>(*two_by_two(0.1));
  same->components = {{0.3, 0.7}, {0.3, 0.7}};
  same->component_floor = 0.3;
  const auto p2 = project_onto_coupling_set({{0.5, 0.5}}, std::vector<double>{0.4, 0.6}, *same);
  EXPECT_NEAR(p2[0], 0.2, 1e-15);
  EXPECT_NEAR(p2[2], 0.2, 1e-15);
  EXPECT_NEAR(p2[1], 0.3, 1e-15);

  const auto problem = two_by_two(0.1);
  const auto p3 =
      project_onto_coupling_set({{0.5, 0.5}}, std::vector<double>{0.5, 0.5}, *problem);
  // Row-major (i, y): P(1,a), P(1,b), P(2,a), P(2,b).
  EXPECT_NEAR(p3[0], 0.45, 1e-15);
  EXPECT_NEAR(p3[1], 0.05, 1e-15);
  EXPECT_NEAR(p3[2], 0.05, 1e-15);
  EXPECT_NEAR(p3[3], 0.45, 1e-15);

  // Grid cross-check: per outcome column, P(1,y) on a 1e-4 grid.
  const auto q = problem->joint_from_weights(std::vector<double>{0.5, 0.5});
  for (std::size_t y = 0; y < 2; ++y) {
    double best = std::numeric_limits<double>::infinity(), arg = 0.0;
    for (double a = 0.0; a <= 0.5 + 1e-12; a += 1e-4) {
      const double b = 0.5 - a;
      double v = 0.0;
      if (a > 0) v += a * std::log(a / q[y]);
      if (b > 0) v += b * std::log(b / q[2 + y]);
      if (v < best) {
        best = v;
        arg = a;
      }
    }
    EXPECT_NEAR(arg, p3[y], 1e-4);
  }
}

TEST(CouplingProjection, MarginalExactAndFloorBound) {
  auto problem = std::make_shared<MixtureProblem>();
  problem->outcomes = {"x", "y", "z", "w"};
  problem->components = {{0.4, 0.3, 0.2, 0.1}, {0.1, 0.1, 0.2, 0.6}, {0.25, 0.25, 0.25, 0.25}};
  problem->weight_floor = 0.1;
  problem->component_floor = 0.1;
  Rng rng(21);
  const double p0 = 0.5 * problem->weight_floor * 0.01;
  for (int k = 0; k < 100; ++k) {
    auto c = rng.dirichlet(3);
    const auto proj = floored_rescale(c, 0.1).weights;
    const auto pbar = rng.dirichlet(4);
    const auto p = project_onto_coupling_set(proj, pbar, *problem);
    const auto m = problem->outcome_marginal(p);
    for (std::size_t y = 0; y < 4; ++y) {
      EXPECT_NEAR(m[y], pbar[y], 1e-15);
      if (pbar[y] >= 0.05) {
        for (std::size_t i = 0; i < 3; ++i) EXPECT_GE(p[i * 4 + y], p0);
      }
    }
    // Genuine minimizer against members of the same coupling set.
    const CouplingSet set(problem, pbar);
    const auto qj = problem->joint_from_weights(proj.weights);
    const double best = kl_divergence(p, qj);
    for (int s = 0; s < 200; ++s) {
      EXPECT_GE(kl_divergence(set.sample(rng), qj), best - 1e-12);
    }
  }
}

TEST(Empirical, Examples) {
  const std::vector<std::string> alphabet = {"a", "b", "c"};
  const std::vector<std::string> s1 = {"a", "a", "b", "c"};
  EXPECT_EQ(empirical_distribution(s1, alphabet), (std::vector<double>{0.5, 0.25, 0.25}));
  const std::vector<std::string> s2 = {"b"};
  EXPECT_EQ(empirical_distribution(s2, alphabet), (std::vector<double>{0, 1, 0}));
  const std::vector<std::string> bad = {"d"};
  EXPECT_THROW(empirical_distribution(bad, alphabet), DomainError);

  Rng rng(100);
  std::vector<std::size_t> draws;
  const std::vector<double> probs = {0.3, 0.7};
  for (int k = 0; k < 100000; ++k) draws.push_back(rng.categorical(probs));
  const auto d = empirical_distribution(draws, 2);
  EXPECT_NEAR(d[0], 0.3, 0.01);
  EXPECT_NEAR(d[1], 0.7, 0.01);
}

TEST(Clamp, Examples) {
  const auto a = clamp_empirical(std::vector<double>{0.0, 1.0}, 0.2);
  EXPECT_NEAR(a.dist[0], 0.1, 1e-15);
  EXPECT_NEAR(a.dist[1], 0.9, 1e-15);
  EXPECT_NEAR(a.lambda, 8.0 / 9.0, 1e-15);

  const std::vector<double> uniform = {0.25, 0.25, 0.25, 0.25};
  const auto b = clamp_empirical(uniform, 0.2);
  EXPECT_EQ(b.dist, uniform);
  EXPECT_EQ(b.lambda, 1.0);

  const auto c = clamp_empirical(std::vector<double>{0.05, 0.95}, 0.2);
  EXPECT_NEAR(c.lambda, 16.0 / 17.0, 1e-15);
  EXPECT_NEAR(c.dist[0], 0.1, 1e-15);
  EXPECT_NEAR(c.dist[1], 0.9, 1e-15);
}

TEST(Clamp, OutputIsAFlooredDistribution) {
  Rng rng(3);
  for (int k = 0; k < 200; ++k) {
    auto p = rng.dirichlet(5);
    p[rng.index(5)] = 0.0;
    double s = 0.0;
    for (double x : p) s += x;
    for (auto& x : p) x /= s;
    const auto c = clamp_empirical(p, 0.1);
    double total = 0.0;
    for (double x : c.dist) {
      EXPECT_GE(x, 0.05 - 1e-15);
      total += x;
    }
    EXPECT_NEAR(total, 1.0, 1e-14);
  }
}

TEST(Estimate, SamplesFromOneComponent) {
  const auto problem = two_by_two(0.05);
  Rng rng(6);
  std::vector<std::size_t> samples;
  for (int k = 0; k < 500; ++k) samples.push_back(rng.categorical(problem->components[0]));
  const auto est = estimate_mixture_weights(samples, *problem, {10000, 1e-14, 5});
  const double grid = grid_ml_weight(empirical_distribution(samples, 2), *problem);
  EXPECT_GT(est.weights.weights[0], 0.85);
  EXPECT_NEAR(est.weights.weights[0], grid, 2e-4);
}

TEST(Estimate, IdenticalComponentsGiveAFlatLikelihood) {
  auto problem = two_by_two(0.1);
  problem->components = {{0.3, 0.7}, {0.3, 0.7}};
  problem->component_floor = 0.3;
  const std::vector<double> pbar = {0.6, 0.4};
  const auto est = estimate_mixture_weights(std::span<const double>(pbar), *problem);
  EXPECT_TRUE(est.weights.is_valid(0.1));
  EXPECT_NEAR(est.trace.last().cost, kl_divergence(pbar, problem->components[0]), 1e-12);
}

TEST(Estimate, TenThousandSamplesMatchGridMl) {
  const auto problem = two_by_two(0.05);
  Rng rng(2024);
  std::vector<std::size_t> samples;
  const std::vector<double> c = {0.6, 0.4};
  for (int k = 0; k < 10000; ++k) {
    samples.push_back(rng.categorical(problem->components[rng.categorical(c)]));
  }
  const auto est = estimate_mixture_weights(samples, *problem, {10000, 1e-14, 5});
  const auto pbar = empirical_distribution(samples, 2);
  EXPECT_NEAR(est.weights.weights[0], grid_ml_weight(pbar, *problem), 0.05);
  EXPECT_LT(ml_stationarity_residual(est.weights.weights, pbar, *problem), 1e-6);
  for (std::size_t n = 1; n < est.trace.records.size(); ++n) {
    EXPECT_LE(est.trace.records[n].cost, est.trace.records[n - 1].cost);
  }
}

TEST(Estimate, AdaptiveApproachesTheBatchOptimum) {
  const auto problem = two_by_two(0.05);
  Rng rng(77);
  std::vector<std::size_t> samples;
  const std::vector<double> c = {0.3, 0.7};
  for (int k = 0; k < 3000; ++k) {
    samples.push_back(rng.categorical(problem->components[rng.categorical(c)]));
  }
  EstimationOptions adaptive;
  adaptive.mode = EstimationMode::kAdaptive;
  const auto a = estimate_mixture_weights(samples, *problem, {3200, 1e-14, 5}, adaptive);
  EXPECT_TRUE(a.trace.eps_estimated);
  const auto limit = clamp_empirical(empirical_distribution(samples, 2), 0.1).dist;
  const auto b = estimate_mixture_weights(std::span<const double>(limit), *problem,
                                          {10000, 1e-14, 5});
  EXPECT_NEAR(a.trace.liminf_estimate, b.trace.last().cost, 1e-6);
  EXPECT_NEAR(a.weights.weights[0], b.weights.weights[0], 1e-3);
}

TEST(Portfolio, SymmetricPairSplitsEvenly) {
  const auto r = log_optimal_portfolio({{1, 2}, {2, 1}}, 0.05, {100000, 1e-15, 5});
  EXPECT_NEAR(r.weights.weights[0], 0.5, 1e-6);
  EXPECT_NEAR(r.weights.weights[1], 0.5, 1e-6);
}

TEST(Portfolio, SingleAsset) {
  const auto r = log_optimal_portfolio({{1.1}, {0.9}}, 0.5);
  ASSERT_EQ(r.weights.weights.size(), 1u);
  EXPECT_DOUBLE_EQ(r.weights.weights[0], 1.0);
}

TEST(Portfolio, MatchesGridSearch) {
  const ReturnMatrix w = {{2, 0.5}, {0.5, 2}, {1.5, 1.5}};
  const auto r = log_optimal_portfolio(w, 0.05, {100000, 1e-15, 5});
  const auto g = oracle::argmin(oracle::simplex_grid(2, 0.05, 1e-3),
                                [&](const Point& c) { return -mean_log_wealth(c, w); });
  EXPECT_NEAR(r.weights.weights[0], g[0], 2e-3);
}

TEST(Portfolio, RejectsBadInput) {
  EXPECT_THROW(log_optimal_portfolio({{1, -1}}, 0.1), DomainError);
  EXPECT_THROW(log_optimal_portfolio({{1, 1}}, 0.6), DomainError);
}

TEST(Conditions, MixtureSetsSatisfyBothPointProperties) {
  auto problem = std::make_shared<MixtureProblem>();
  problem->outcomes = {"x", "y", "z"};
  problem->components = {{0.5, 0.3, 0.2}, {0.2, 0.2, 0.6}};
  problem->weight_floor = 0.2;
  problem->component_floor = 0.2;
  const KlCost cost;
  const CouplingSet p(problem, {0.3, 0.3, 0.4});
  const WeightSet q(problem);
  EXPECT_TRUE(check_three_point(cost, p, q, 1000, 1).ok());
  EXPECT_TRUE(check_four_point(cost, p, q, 1000, 2).ok());
}
