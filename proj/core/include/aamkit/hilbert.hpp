#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "aamkit/cost.hpp"
#include "aamkit/schedule.hpp"
#include "aamkit/sets.hpp"
#include "aamkit/trace.hpp"

/// Squared-norm instantiation on the weighted product space H = R^{I k},
/// <A,B> = sum_i c_i <A_i, B_i>. Product points are stored flat, block i in
/// entries [i k, (i+1) k).
namespace aamkit::hilbert {

struct WeightedProductSpace {
  std::size_t block_count = 0;  // I
  std::size_t block_dim = 0;    // k
  std::vector<double> weights;  // c_i > 0, sum 1

  WeightedProductSpace() = default;
  WeightedProductSpace(std::size_t k, std::vector<double> c);

  std::size_t dimension() const { return block_count * block_dim; }
  Metric metric() const;
  /// Throws DomainError unless weights are positive and sum to 1.
  void validate() const;

  std::span<const double> block(PointView x, std::size_t i) const {
    return x.subspan(i * block_dim, block_dim);
  }
  std::span<double> block(std::span<double> x, std::size_t i) const {
    return x.subspan(i * block_dim, block_dim);
  }
  /// (v, ..., v).
  Point repeat(PointView v) const;
};

using ProductPoint = Point;

/// sum_i c_i |A_i - B_i|^2.
double weighted_sq_cost(PointView a, PointView b,
                        const WeightedProductSpace& space);

/// Euclidean nearest point of a block set.
Point project_block(PointView x, const ProjectableSet& set);

/// Blockwise projection of a diagonal point (P~, ..., P~) onto
/// S_1 x ... x S_I. Throws DomainError on a non-diagonal input.
ProductPoint project_onto_product(PointView p, std::span<const SetPtr> sets,
                                  const WeightedProductSpace& space,
                                  double diagonal_tol = 1e-12);

/// (sum c_i Q_i, ..., sum c_i Q_i).
ProductPoint project_onto_diagonal(PointView q,
                                   const WeightedProductSpace& space);

/// True when every block equals the first within tol.
bool is_diagonal(PointView x, const WeightedProductSpace& space,
                 double tol = 1e-12);

struct SetTheoreticObjective {
  double literal = 0.0;  // sum c_i d(x, S_i)
  double squared = 0.0;  // sum c_i d(x, S_i)^2, what the alternation minimizes
};

SetTheoreticObjective set_theoretic_objective(PointView x,
                                              std::span<const SetPtr> sets,
                                              std::span<const double> weights);

/// Q = S_1 x ... x S_I under the weighted metric.
class ProductSet final : public ProjectableSet {
 public:
  ProductSet(std::vector<SetPtr> blocks, WeightedProductSpace space);

  std::string family() const override { return "product"; }
  std::size_t dimension() const override { return space_.dimension(); }
  bool is_convex() const override;
  bool is_bounded() const override;
  const std::vector<SetPtr>& blocks() const { return blocks_; }
  const WeightedProductSpace& space() const { return space_; }

  bool contains(PointView x, double tol) const override;
  Point sample(Rng& rng) const override;
  std::optional<Point> nearest(PointView x) const override;
  std::optional<double> farthest_distance(PointView x) const override;
  std::optional<double> directed_hausdorff_to(
      const ProjectableSet& other) const override;
  std::optional<std::pair<Point, Point>> bounding_box() const override;
  double net_radius(double h) const override;

 protected:
  std::optional<Point> project_closed_form(const CostFunction& cost,
                                           PointView fixed,
                                           Side side) const override;

 private:
  std::vector<SetPtr> blocks_;
  WeightedProductSpace space_;
};

/// P = {(x, ..., x) : x in base box}. The base box is the compact region
/// holding every scheduled block set, so it contains the convex hull of
/// their union and the centroid projection never touches its boundary.
class DiagonalSet final : public ProjectableSet {
 public:
  DiagonalSet(Point base_lo, Point base_hi, WeightedProductSpace space);

  std::string family() const override { return "diagonal"; }
  std::size_t dimension() const override { return space_.dimension(); }
  const Point& base_lo() const { return base_lo_; }
  const Point& base_hi() const { return base_hi_; }
  const WeightedProductSpace& space() const { return space_; }

  bool contains(PointView x, double tol) const override;
  Point sample(Rng& rng) const override;
  std::optional<Point> nearest(PointView x) const override;
  std::optional<double> directed_hausdorff_to(
      const ProjectableSet& other) const override;
  std::optional<std::pair<Point, Point>> bounding_box() const override;
  std::vector<Point> net(double h) const override;
  double net_radius(double h) const override;

 protected:
  std::optional<Point> project_closed_form(const CostFunction& cost,
                                           PointView fixed,
                                           Side side) const override;

 private:
  Point base_lo_;
  Point base_hi_;
  WeightedProductSpace space_;
};

/// Time-varying block sets S_{i,n}, n = 0 .. steps-1, and their limits S_i.
struct BlockSchedule {
  std::vector<std::vector<SetPtr>> steps;  // steps[n][i]
  std::vector<SetPtr> limit;               // limit[i]

  std::size_t size() const { return steps.size(); }
};

/// S_{i,n} = S_i + eps_n u_i with u_i rescaled so that sum_i c_i |u_i|^2 = 1;
/// for translation-invariant families d_H(Q_n, Q) is then exactly eps_n.
/// directions empty: every block moves along the first axis.
BlockSchedule make_translation_schedule(std::vector<SetPtr> limit,
                                        std::vector<Point> directions,
                                        const DriftLaw& law, std::size_t length,
                                        const WeightedProductSpace& space);

/// Smallest box holding every scheduled and limit block set, with each side
/// pushed out by 10% of the extent (at least 0.1).
std::pair<Point, Point> compact_region(const BlockSchedule& schedule);

/// The SetSchedule seen by the engine: P_n = diagonal over the compact
/// region (fixed), Q_n = S_{1,n} x ... x S_{I,n}.
SetSchedule make_set_schedule(const BlockSchedule& schedule,
                              const WeightedProductSpace& space);

/// Default starting point: the compact-region center projected into Q_0.
ProductPoint default_start(const BlockSchedule& schedule,
                           const WeightedProductSpace& space);

struct FilterResult {
  AamTrace trace;
  Point filter_point;  // final diagonal value, one block
};

/// AAM with D = weighted_sq_cost, delta = D, P the diagonal, Q_n from the
/// schedule. oracle, when given, is the limit minimizer used for b_n.
FilterResult run_adaptive_filter(const BlockSchedule& schedule,
                                 const WeightedProductSpace& space,
                                 PointView q0, const StoppingRule& stop = {},
                                 const std::optional<OracleMinimizer>& oracle = {});

}  // namespace aamkit::hilbert
