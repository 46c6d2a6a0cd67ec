#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aamkit/cost.hpp"
#include "aamkit/metric.hpp"
#include "aamkit/rng.hpp"

namespace aamkit {

class ProjectableSet;
using SetPtr = std::shared_ptr<const ProjectableSet>;

/// Which argument of D a set constrains: P-sets minimize D(., Q),
/// Q-sets minimize D(P, .).
enum class Side { kFirst, kSecond };

/// Grid spacing used when a set has no closed-form projection for a cost.
inline constexpr double kDefaultFallbackResolution = 1e-2;

/// A compact set from a parametric family with an exact projection oracle.
///
/// Families provide what they can in closed form (projection, nearest point,
/// farthest distance, directed Hausdorff distance to known families). The
/// generic machinery falls back to a finite net of the set whenever a
/// closed form is missing; ties in a net are broken by lowest index.
class ProjectableSet {
 public:
  explicit ProjectableSet(Metric metric) : metric_(std::move(metric)) {}
  virtual ~ProjectableSet() = default;

  virtual std::string family() const = 0;
  virtual std::size_t dimension() const = 0;
  const Metric& metric() const { return metric_; }
  virtual bool is_convex() const { return true; }
  virtual bool is_bounded() const { return true; }

  /// argmin over the set of D(x, fixed) (Side::kFirst) or D(fixed, x)
  /// (Side::kSecond).
  Point project(const CostFunction& cost, PointView fixed, Side side,
                double fallback_resolution = kDefaultFallbackResolution) const;

  virtual bool contains(PointView x, double tol) const = 0;
  virtual Point sample(Rng& rng) const = 0;

  /// Nearest point of the set under metric().
  virtual std::optional<Point> nearest(PointView) const { return std::nullopt; }
  /// sup over the set of d(x, .).
  virtual std::optional<double> farthest_distance(PointView) const {
    return std::nullopt;
  }
  /// Finite set whose convex hull is this set (or the set itself when finite).
  virtual std::optional<std::vector<Point>> extreme_points() const {
    return std::nullopt;
  }
  /// Exact sup_{a in this} inf_{b in other} d(a, b) when this family knows
  /// how to compute it against other's family.
  virtual std::optional<double> directed_hausdorff_to(
      const ProjectableSet&) const {
    return std::nullopt;
  }
  virtual std::optional<std::pair<Point, Point>> bounding_box() const {
    return std::nullopt;
  }

  /// Finite subset of the set whose covering radius (under metric()) is at
  /// most net_radius(h). Default: nearest() of a lattice over bounding_box().
  virtual std::vector<Point> net(double h) const;
  virtual double net_radius(double h) const;

  /// Copy of the set shifted by offset. Only translation-invariant families
  /// support this.
  virtual SetPtr translated(PointView offset) const;

 protected:
  virtual std::optional<Point> project_closed_form(const CostFunction&,
                                                   PointView, Side) const {
    return std::nullopt;
  }
  /// True when cost is d^2 under this set's own metric, in which case the
  /// projection on either side is the nearest point.
  bool is_own_squared_distance(const CostFunction& cost) const {
    return cost.kind() == CostKind::kSquaredDistance &&
           cost.metric() == metric();
  }

  void check_dimension(PointView x, const char* what) const;

 private:
  Metric metric_;
};

/// Upper bound on lattice size built by the default net().
inline constexpr std::size_t kMaxNetPoints = 4'000'000;

/// Lattice over an axis-aligned box with spacing at most h on every axis.
std::vector<Point> box_lattice(const Point& lo, const Point& hi, double h);

// ---------------------------------------------------------------------------
// Euclidean families on R^m. These are also the block sets of the Hilbert
// instantiation.

class PointSet final : public ProjectableSet {
 public:
  explicit PointSet(Point at, Metric metric = Metric::euclidean());

  std::string family() const override { return "point"; }
  std::size_t dimension() const override { return at_.size(); }
  const Point& at() const { return at_; }

  bool contains(PointView x, double tol) const override;
  Point sample(Rng&) const override { return at_; }
  std::optional<Point> nearest(PointView) const override { return at_; }
  std::optional<double> farthest_distance(PointView x) const override;
  std::optional<std::vector<Point>> extreme_points() const override {
    return std::vector<Point>{at_};
  }
  std::optional<std::pair<Point, Point>> bounding_box() const override {
    return std::pair{at_, at_};
  }
  std::vector<Point> net(double) const override { return {at_}; }
  double net_radius(double) const override { return 0.0; }
  SetPtr translated(PointView offset) const override;

 protected:
  std::optional<Point> project_closed_form(const CostFunction& cost,
                                           PointView fixed,
                                           Side side) const override;

 private:
  Point at_;
};

/// Finite (generally non-convex) set of points. Projection and nearest point
/// break ties by lowest index.
class FiniteSet final : public ProjectableSet {
 public:
  explicit FiniteSet(std::vector<Point> points,
                     Metric metric = Metric::euclidean());

  std::string family() const override { return "finite"; }
  std::size_t dimension() const override { return points_.front().size(); }
  bool is_convex() const override { return points_.size() == 1; }
  const std::vector<Point>& points() const { return points_; }

  bool contains(PointView x, double tol) const override;
  Point sample(Rng& rng) const override;
  std::optional<Point> nearest(PointView x) const override;
  std::optional<double> farthest_distance(PointView x) const override;
  std::optional<std::vector<Point>> extreme_points() const override {
    return points_;
  }
  std::optional<std::pair<Point, Point>> bounding_box() const override;
  std::vector<Point> net(double) const override { return points_; }
  double net_radius(double) const override { return 0.0; }
  SetPtr translated(PointView offset) const override;

 protected:
  std::optional<Point> project_closed_form(const CostFunction& cost,
                                           PointView fixed,
                                           Side side) const override;

 private:
  Point argmin_index_point(PointView x) const;

  std::vector<Point> points_;
};

/// Axis-aligned box [lo, hi] in Euclidean R^m. Degenerate axes (lo == hi)
/// give segments and faces.
class BoxSet final : public ProjectableSet {
 public:
  BoxSet(Point lo, Point hi);

  std::string family() const override { return "box"; }
  std::size_t dimension() const override { return lo_.size(); }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }

  bool contains(PointView x, double tol) const override;
  Point sample(Rng& rng) const override;
  std::optional<Point> nearest(PointView x) const override;
  std::optional<double> farthest_distance(PointView x) const override;
  std::optional<std::vector<Point>> extreme_points() const override;
  std::optional<double> directed_hausdorff_to(
      const ProjectableSet& other) const override;
  std::optional<std::pair<Point, Point>> bounding_box() const override {
    return std::pair{lo_, hi_};
  }
  SetPtr translated(PointView offset) const override;

 protected:
  std::optional<Point> project_closed_form(const CostFunction& cost,
                                           PointView fixed,
                                           Side side) const override;

 private:
  Point lo_;
  Point hi_;
};

/// Closed Euclidean ball.
class BallSet final : public ProjectableSet {
 public:
  BallSet(Point center, double radius);

  std::string family() const override { return "ball"; }
  std::size_t dimension() const override { return center_.size(); }
  const Point& center() const { return center_; }
  double radius() const { return radius_; }

  bool contains(PointView x, double tol) const override;
  Point sample(Rng& rng) const override;
  std::optional<Point> nearest(PointView x) const override;
  std::optional<double> farthest_distance(PointView x) const override;
  std::optional<double> directed_hausdorff_to(
      const ProjectableSet& other) const override;
  std::optional<std::pair<Point, Point>> bounding_box() const override;
  SetPtr translated(PointView offset) const override;

 protected:
  std::optional<Point> project_closed_form(const CostFunction& cost,
                                           PointView fixed,
                                           Side side) const override;

 private:
  Point center_;
  double radius_;
};

/// Halfspace {x : <normal, x> <= offset}. Unbounded, so sampling needs a
/// sampling box: points are drawn in the box and projected onto the set.
class HalfspaceSet final : public ProjectableSet {
 public:
  HalfspaceSet(Point normal, double offset,
               std::optional<std::pair<Point, Point>> sampling_box = {});

  std::string family() const override { return "halfspace"; }
  std::size_t dimension() const override { return normal_.size(); }
  bool is_bounded() const override { return false; }
  /// Unit normal and matching offset.
  const Point& normal() const { return normal_; }
  double offset() const { return offset_; }

  bool contains(PointView x, double tol) const override;
  Point sample(Rng& rng) const override;
  std::optional<Point> nearest(PointView x) const override;
  std::optional<double> directed_hausdorff_to(
      const ProjectableSet& other) const override;
  std::optional<std::pair<Point, Point>> bounding_box() const override {
    return sampling_box_;
  }
  SetPtr translated(PointView offset) const override;

 protected:
  std::optional<Point> project_closed_form(const CostFunction& cost,
                                           PointView fixed,
                                           Side side) const override;

 private:
  Point normal_;
  double offset_;
  std::optional<std::pair<Point, Point>> sampling_box_;
};

/// Affine subspace anchor + span(basis); the basis is orthonormalized on
/// construction (Gram-Schmidt, dependent vectors dropped).
class AffineSubspaceSet final : public ProjectableSet {
 public:
  AffineSubspaceSet(Point anchor, std::vector<Point> basis,
                    std::optional<std::pair<Point, Point>> sampling_box = {});

  std::string family() const override { return "affine"; }
  std::size_t dimension() const override { return anchor_.size(); }
  bool is_bounded() const override { return false; }
  const Point& anchor() const { return anchor_; }
  const std::vector<Point>& basis() const { return basis_; }

  bool contains(PointView x, double tol) const override;
  Point sample(Rng& rng) const override;
  std::optional<Point> nearest(PointView x) const override;
  std::optional<double> directed_hausdorff_to(
      const ProjectableSet& other) const override;
  std::optional<std::pair<Point, Point>> bounding_box() const override {
    return sampling_box_;
  }
  SetPtr translated(PointView offset) const override;

 protected:
  std::optional<Point> project_closed_form(const CostFunction& cost,
                                           PointView fixed,
                                           Side side) const override;

 private:
  Point orthogonal_residual(PointView v) const;

  Point anchor_;
  std::vector<Point> basis_;
  std::optional<std::pair<Point, Point>> sampling_box_;
};

}  // namespace aamkit
