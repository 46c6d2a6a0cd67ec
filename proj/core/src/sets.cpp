#include "aamkit/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "aamkit/error.hpp"

namespace aamkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(PointView a, PointView b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

double norm(PointView a) { return std::sqrt(dot(a, a)); }

Point add(PointView a, PointView b) {
  Point out(a.begin(), a.end());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += b[j];
  return out;
}

void require_same_size(const Point& a, const Point& b, const char* what) {
  if (a.size() != b.size()) {
    throw DomainError(std::string(what) + ": dimension mismatch");
  }
  if (a.empty()) throw DomainError(std::string(what) + ": empty point");
}

std::optional<Point> offset_sample_box(
    const std::optional<std::pair<Point, Point>>& box, Rng& rng) {
  if (!box) return std::nullopt;
  Point x(box->first.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    x[j] = rng.uniform(box->first[j], box->second[j]);
  }
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------

void ProjectableSet::check_dimension(PointView x, const char* what) const {
  if (x.size() != dimension()) {
    throw DomainError(std::string(what) + ": point of dimension " +
                      std::to_string(x.size()) + " for " + family() +
                      " set of dimension " + std::to_string(dimension()));
  }
}

Point ProjectableSet::project(const CostFunction& cost, PointView fixed,
                              Side side, double fallback_resolution) const {
  check_dimension(fixed, "projection");
  if (auto p = project_closed_form(cost, fixed, side)) return std::move(*p);

  const auto candidates = net(fallback_resolution);
  std::size_t best = candidates.size();
  double best_value = kInf;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double v = side == Side::kFirst ? cost(candidates[i], fixed)
                                          : cost(fixed, candidates[i]);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  if (best == candidates.size()) {
    throw DomainError("grid projection onto " + family() +
                      " set found no point with finite cost");
  }
  return candidates[best];
}

std::vector<Point> box_lattice(const Point& lo, const Point& hi, double h) {
  if (!(h > 0.0)) throw DomainError("lattice spacing must be positive");
  std::vector<std::size_t> counts(lo.size());
  std::size_t total = 1;
  for (std::size_t j = 0; j < lo.size(); ++j) {
    const double extent = hi[j] - lo[j];
    counts[j] = extent > 0.0
                    ? static_cast<std::size_t>(std::ceil(extent / h)) + 1
                    : 1;
    if (total > kMaxNetPoints / counts[j]) {
      throw DomainError("lattice would exceed " +
                        std::to_string(kMaxNetPoints) + " points");
    }
    total *= counts[j];
  }
  std::vector<Point> out;
  out.reserve(total);
  std::vector<std::size_t> idx(lo.size(), 0);
  for (std::size_t k = 0; k < total; ++k) {
    Point x(lo.size());
    for (std::size_t j = 0; j < lo.size(); ++j) {
      x[j] = counts[j] == 1
                 ? lo[j]
                 : lo[j] + (hi[j] - lo[j]) * static_cast<double>(idx[j]) /
                               static_cast<double>(counts[j] - 1);
    }
    out.push_back(std::move(x));
    for (std::size_t j = 0; j < lo.size(); ++j) {
      if (++idx[j] < counts[j]) break;
      idx[j] = 0;
    }
  }
  return out;
}

std::vector<Point> ProjectableSet::net(double h) const {
  const auto box = bounding_box();
  if (!box) {
    throw DomainError(family() + " set has no bounding box for a finite net");
  }
  auto lattice = box_lattice(box->first, box->second, h);
  for (auto& x : lattice) {
    auto p = nearest(x);
    if (!p) throw DomainError(family() + " set has no nearest-point oracle");
    x = std::move(*p);
  }
  return lattice;
}

double ProjectableSet::net_radius(double h) const {
  const double half = 0.5 * h;
  switch (metric().kind()) {
    case Metric::Kind::kEuclidean:
      return half * std::sqrt(static_cast<double>(dimension()));
    case Metric::Kind::kWeightedBlocks: {
      const auto& w = metric().weights();
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      return half *
             std::sqrt(static_cast<double>(metric().block_dim()) * total);
    }
    case Metric::Kind::kMaxNorm:
      // The max-norm nearest point is not nonexpansive; allow 2x.
      return h;
  }
  return h;
}

SetPtr ProjectableSet::translated(PointView) const {
  throw DomainError(family() + " sets do not support translation");
}

// ---------------------------------------------------------------------------
// PointSet

PointSet::PointSet(Point at, Metric metric)
    : ProjectableSet(std::move(metric)), at_(std::move(at)) {
  if (at_.empty()) throw DomainError("point set: empty point");
}

bool PointSet::contains(PointView x, double tol) const {
  return x.size() == at_.size() && metric()(x, at_) <= tol;
}

std::optional<double> PointSet::farthest_distance(PointView x) const {
  return metric()(x, at_);
}

SetPtr PointSet::translated(PointView offset) const {
  check_dimension(offset, "translation");
  return std::make_shared<PointSet>(add(at_, offset), metric());
}

std::optional<Point> PointSet::project_closed_form(const CostFunction&,
                                                   PointView, Side) const {
  return at_;
}

// ---------------------------------------------------------------------------
// FiniteSet

FiniteSet::FiniteSet(std::vector<Point> points, Metric metric)
    : ProjectableSet(std::move(metric)), points_(std::move(points)) {
  if (points_.empty()) throw DomainError("finite set: no points");
  for (const auto& p : points_) require_same_size(p, points_.front(), "finite set");
}

bool FiniteSet::contains(PointView x, double tol) const {
  if (x.size() != dimension()) return false;
  return std::any_of(points_.begin(), points_.end(),
                     [&](const Point& p) { return metric()(x, p) <= tol; });
}

Point FiniteSet::sample(Rng& rng) const { return points_[rng.index(points_.size())]; }

Point FiniteSet::argmin_index_point(PointView x) const {
  std::size_t best = 0;
  double best_d = kInf;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double d = metric()(x, points_[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return points_[best];
}

std::optional<Point> FiniteSet::nearest(PointView x) const {
  check_dimension(x, "nearest point");
  return argmin_index_point(x);
}

std::optional<double> FiniteSet::farthest_distance(PointView x) const {
  double m = 0.0;
  for (const auto& p : points_) m = std::max(m, metric()(x, p));
  return m;
}

std::optional<std::pair<Point, Point>> FiniteSet::bounding_box() const {
  Point lo = points_.front();
  Point hi = points_.front();
  for (const auto& p : points_) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      lo[j] = std::min(lo[j], p[j]);
      hi[j] = std::max(hi[j], p[j]);
    }
  }
  return std::pair{lo, hi};
}

SetPtr FiniteSet::translated(PointView offset) const {
  check_dimension(offset, "translation");
  std::vector<Point> moved;
  moved.reserve(points_.size());
  for (const auto& p : points_) moved.push_back(add(p, offset));
  return std::make_shared<FiniteSet>(std::move(moved), metric());
}

std::optional<Point> FiniteSet::project_closed_form(const CostFunction& cost,
                                                    PointView fixed,
                                                    Side side) const {
  std::size_t best = 0;
  double best_value = kInf;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double v = side == Side::kFirst ? cost(points_[i], fixed)
                                          : cost(fixed, points_[i]);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  return points_[best];
}

// ---------------------------------------------------------------------------
// BoxSet

BoxSet::BoxSet(Point lo, Point hi)
    : ProjectableSet(Metric::euclidean()), lo_(std::move(lo)), hi_(std::move(hi)) {
  require_same_size(lo_, hi_, "box");
  for (std::size_t j = 0; j < lo_.size(); ++j) {
    if (!(lo_[j] <= hi_[j])) throw DomainError("box: lo must not exceed hi");
  }
}

bool BoxSet::contains(PointView x, double tol) const {
  if (x.size() != dimension()) return false;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < lo_[j] - tol || x[j] > hi_[j] + tol) return false;
  }
  return true;
}

Point BoxSet::sample(Rng& rng) const {
  Point x(lo_.size());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = rng.uniform(lo_[j], hi_[j]);
  return x;
}

std::optional<Point> BoxSet::nearest(PointView x) const {
  check_dimension(x, "nearest point");
  Point p(x.begin(), x.end());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = std::clamp(p[j], lo_[j], hi_[j]);
  return p;
}

std::optional<double> BoxSet::farthest_distance(PointView x) const {
  check_dimension(x, "farthest distance");
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = std::max(std::abs(x[j] - lo_[j]), std::abs(x[j] - hi_[j]));
    s += d * d;
  }
  return std::sqrt(s);
}

std::optional<std::vector<Point>> BoxSet::extreme_points() const {
  const std::size_t m = lo_.size();
  if (m > 16) return std::nullopt;
  std::vector<Point> corners;
  corners.reserve(std::size_t{1} << m);
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    Point c(m);
    for (std::size_t j = 0; j < m; ++j) c[j] = (mask >> j) & 1U ? hi_[j] : lo_[j];
    corners.push_back(std::move(c));
  }
  return corners;
}

std::optional<double> BoxSet::directed_hausdorff_to(
    const ProjectableSet& other) const {
  const auto* box = dynamic_cast<const BoxSet*>(&other);
  if (box == nullptr || box->dimension() != dimension()) return std::nullopt;
  // Squared distance to a box separates over axes, so its sup over this box
  // is the sum of per-axis sups, each attained at an endpoint.
  double s = 0.0;
  for (std::size_t j = 0; j < lo_.size(); ++j) {
    const double gap =
        std::max({0.0, box->lo_[j] - lo_[j], hi_[j] - box->hi_[j]});
    s += gap * gap;
  }
  return std::sqrt(s);
}

SetPtr BoxSet::translated(PointView offset) const {
  check_dimension(offset, "translation");
  return std::make_shared<BoxSet>(add(lo_, offset), add(hi_, offset));
}

std::optional<Point> BoxSet::project_closed_form(const CostFunction& cost,
                                                 PointView fixed, Side) const {
  if (!is_own_squared_distance(cost)) return std::nullopt;
  return nearest(fixed);
}

// ---------------------------------------------------------------------------
// BallSet

BallSet::BallSet(Point center, double radius)
    : ProjectableSet(Metric::euclidean()), center_(std::move(center)), radius_(radius) {
  if (center_.empty()) throw DomainError("ball: empty center");
  if (!(radius_ >= 0.0) || !std::isfinite(radius_)) {
    throw DomainError("ball: radius must be finite and nonnegative");
  }
}

bool BallSet::contains(PointView x, double tol) const {
  return x.size() == dimension() && euclidean_distance(x, center_) <= radius_ + tol;
}

Point BallSet::sample(Rng& rng) const {
  const std::size_t m = center_.size();
  Point dir(m);
  double len = 0.0;
  while (len == 0.0) {
    for (auto& v : dir) v = rng.normal();
    len = norm(dir);
  }
  const double r = radius_ * std::pow(rng.uniform(), 1.0 / static_cast<double>(m));
  Point x(center_);
  for (std::size_t j = 0; j < m; ++j) x[j] += r * dir[j] / len;
  return x;
}

std::optional<Point> BallSet::nearest(PointView x) const {
  check_dimension(x, "nearest point");
  const double d = euclidean_distance(x, center_);
  if (d <= radius_) return Point(x.begin(), x.end());
  Point p(center_);
  for (std::size_t j = 0; j < p.size(); ++j) {
    p[j] += radius_ * (x[j] - center_[j]) / d;
  }
  return p;
}

std::optional<double> BallSet::farthest_distance(PointView x) const {
  return euclidean_distance(x, center_) + radius_;
}

std::optional<double> BallSet::directed_hausdorff_to(
    const ProjectableSet& other) const {
  if (other.dimension() != dimension()) return std::nullopt;
  if (const auto* ball = dynamic_cast<const BallSet*>(&other)) {
    return std::max(
        0.0, euclidean_distance(center_, ball->center_) + radius_ - ball->radius_);
  }
  if (const auto* pt = dynamic_cast<const PointSet*>(&other)) {
    return euclidean_distance(center_, pt->at()) + radius_;
  }
  return std::nullopt;
}

std::optional<std::pair<Point, Point>> BallSet::bounding_box() const {
  Point lo(center_), hi(center_);
  for (std::size_t j = 0; j < lo.size(); ++j) {
    lo[j] -= radius_;
    hi[j] += radius_;
  }
  return std::pair{lo, hi};
}

SetPtr BallSet::translated(PointView offset) const {
  check_dimension(offset, "translation");
  return std::make_shared<BallSet>(add(center_, offset), radius_);
}

std::optional<Point> BallSet::project_closed_form(const CostFunction& cost,
                                                  PointView fixed, Side) const {
  if (!is_own_squared_distance(cost)) return std::nullopt;
  return nearest(fixed);
}

// ---------------------------------------------------------------------------
// HalfspaceSet

HalfspaceSet::HalfspaceSet(Point normal, double offset,
                           std::optional<std::pair<Point, Point>> sampling_box)
    : ProjectableSet(Metric::euclidean()),
      normal_(std::move(normal)),
      offset_(offset),
      sampling_box_(std::move(sampling_box)) {
  const double len = norm(normal_);
  if (normal_.empty() || !(len > 0.0) || !std::isfinite(len)) {
    throw DomainError("halfspace: normal must be a nonzero finite vector");
  }
  for (auto& v : normal_) v /= len;
  offset_ /= len;
  if (sampling_box_) require_same_size(sampling_box_->first, normal_, "halfspace sampling box");
}

bool HalfspaceSet::contains(PointView x, double tol) const {
  return x.size() == dimension() && dot(normal_, x) <= offset_ + tol;
}

Point HalfspaceSet::sample(Rng& rng) const {
  auto x = offset_sample_box(sampling_box_, rng);
  if (!x) throw DomainError("halfspace: sampling needs a sampling box");
  return *nearest(*x);
}

std::optional<Point> HalfspaceSet::nearest(PointView x) const {
  check_dimension(x, "nearest point");
  const double excess = std::max(0.0, dot(normal_, x) - offset_);
  Point p(x.begin(), x.end());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] -= excess * normal_[j];
  return p;
}

std::optional<double> HalfspaceSet::directed_hausdorff_to(
    const ProjectableSet& other) const {
  const auto* hs = dynamic_cast<const HalfspaceSet*>(&other);
  if (hs == nullptr || hs->dimension() != dimension()) return std::nullopt;
  if (euclidean_distance(normal_, hs->normal_) > 1e-12) return kInf;
  return std::max(0.0, offset_ - hs->offset_);
}

SetPtr HalfspaceSet::translated(PointView offset) const {
  check_dimension(offset, "translation");
  std::optional<std::pair<Point, Point>> box;
  if (sampling_box_) box = std::pair{add(sampling_box_->first, offset), add(sampling_box_->second, offset)};
  return std::make_shared<HalfspaceSet>(normal_, offset_ + dot(normal_, offset), box);
}

std::optional<Point> HalfspaceSet::project_closed_form(const CostFunction& cost,
                                                       PointView fixed, Side) const {
  if (!is_own_squared_distance(cost)) return std::nullopt;
  return nearest(fixed);
}

// ---------------------------------------------------------------------------
// AffineSubspaceSet

AffineSubspaceSet::AffineSubspaceSet(
    Point anchor, std::vector<Point> basis,
    std::optional<std::pair<Point, Point>> sampling_box)
    : ProjectableSet(Metric::euclidean()),
      anchor_(std::move(anchor)),
      sampling_box_(std::move(sampling_box)) {
  if (anchor_.empty()) throw DomainError("affine subspace: empty anchor");
  for (auto& v : basis) {
    require_same_size(v, anchor_, "affine subspace basis");
    Point r = orthogonal_residual(v);
    const double len = norm(r);
    if (len > 1e-12 * std::max(1.0, norm(v))) {
      for (auto& x : r) x /= len;
      basis_.push_back(std::move(r));
    }
  }
  if (sampling_box_) require_same_size(sampling_box_->first, anchor_, "affine sampling box");
}

Point AffineSubspaceSet::orthogonal_residual(PointView v) const {
  Point r(v.begin(), v.end());
  for (const auto& b : basis_) {
    const double c = dot(b, r);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] -= c * b[j];
  }
  return r;
}

bool AffineSubspaceSet::contains(PointView x, double tol) const {
  if (x.size() != dimension()) return false;
  return euclidean_distance(x, *nearest(x)) <= tol;
}

Point AffineSubspaceSet::sample(Rng& rng) const {
  auto x = offset_sample_box(sampling_box_, rng);
  if (!x) throw DomainError("affine subspace: sampling needs a sampling box");
  return *nearest(*x);
}

std::optional<Point> AffineSubspaceSet::nearest(PointView x) const {
  check_dimension(x, "nearest point");
  Point rel(x.begin(), x.end());
  for (std::size_t j = 0; j < rel.size(); ++j) rel[j] -= anchor_[j];
  Point p(anchor_);
  for (const auto& b : basis_) {
    const double c = dot(b, rel);
    for (std::size_t j = 0; j < p.size(); ++j) p[j] += c * b[j];
  }
  return p;
}

std::optional<double> AffineSubspaceSet::directed_hausdorff_to(
    const ProjectableSet& other) const {
  const auto* af = dynamic_cast<const AffineSubspaceSet*>(&other);
  if (af == nullptr || af->dimension() != dimension()) return std::nullopt;
  for (const auto& b : basis_) {
    if (norm(af->orthogonal_residual(b)) > 1e-10) return kInf;
  }
  Point diff(anchor_);
  for (std::size_t j = 0; j < diff.size(); ++j) diff[j] -= af->anchor_[j];
  return norm(af->orthogonal_residual(diff));
}

SetPtr AffineSubspaceSet::translated(PointView offset) const {
  check_dimension(offset, "translation");
  std::optional<std::pair<Point, Point>> box;
  if (sampling_box_) box = std::pair{add(sampling_box_->first, offset), add(sampling_box_->second, offset)};
  return std::make_shared<AffineSubspaceSet>(add(anchor_, offset), basis_, box);
}

std::optional<Point> AffineSubspaceSet::project_closed_form(
    const CostFunction& cost, PointView fixed, Side) const {
  if (!is_own_squared_distance(cost)) return std::nullopt;
  return nearest(fixed);
}

}  // namespace aamkit
