#include "aamkit/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aamkit/engine.hpp"
#include "aamkit/error.hpp"
#include "aamkit/hausdorff.hpp"

namespace aamkit::hilbert {

WeightedProductSpace::WeightedProductSpace(std::size_t k, std::vector<double> c)
    : block_count(c.size()), block_dim(k), weights(std::move(c)) {
  validate();
}

Metric WeightedProductSpace::metric() const {
  return Metric::weighted_blocks(weights, block_dim);
}

void WeightedProductSpace::validate() const {
  if (block_count == 0 || block_dim == 0) {
    throw DomainError("product space needs at least one block of size >= 1");
  }
  if (weights.size() != block_count) {
    throw DomainError("product space has " + std::to_string(weights.size()) +
                      " weights for " + std::to_string(block_count) + " blocks");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw DomainError("block weights must be positive");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("block weights must sum to 1");
}

Point WeightedProductSpace::repeat(PointView v) const {
  if (v.size() != block_dim) throw DomainError("block has the wrong dimension");
  Point x;
  x.reserve(dimension());
  for (std::size_t i = 0; i < block_count; ++i) x.insert(x.end(), v.begin(), v.end());
  return x;
}

namespace {

void check_point(PointView x, const WeightedProductSpace& space) {
  if (x.size() != space.dimension()) {
    throw DomainError("product point of size " + std::to_string(x.size()) +
                      " in a space of dimension " + std::to_string(space.dimension()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError("product point has a non-finite entry");
  }
}

Point centroid(PointView q, const WeightedProductSpace& space) {
  Point c(space.block_dim, 0.0);
  for (std::size_t i = 0; i < space.block_count; ++i) {
    const auto b = space.block(q, i);
    for (std::size_t j = 0; j < c.size(); ++j) c[j] += space.weights[i] * b[j];
  }
  return c;
}

}  // namespace

double weighted_sq_cost(PointView a, PointView b, const WeightedProductSpace& space) {
  if (a.size() != space.dimension() || b.size() != space.dimension()) {
    throw DomainError("product points do not match the space");
  }
  return space.metric().squared(a, b);
}

Point project_block(PointView x, const ProjectableSet& set) {
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError("block point has a non-finite entry");
  }
  if (set.metric().kind() != Metric::Kind::kEuclidean) {
    throw DomainError("block sets must use the Euclidean metric");
  }
  auto p = set.nearest(x);
  if (!p) throw DomainError(set.family() + " set has no nearest-point oracle");
  return std::move(*p);
}

bool is_diagonal(PointView x, const WeightedProductSpace& space, double tol) {
  if (x.size() != space.dimension()) return false;
  const auto first = space.block(x, 0);
  for (std::size_t i = 1; i < space.block_count; ++i) {
    const auto b = space.block(x, i);
    for (std::size_t j = 0; j < first.size(); ++j) {
      if (std::abs(b[j] - first[j]) > tol) return false;
    }
  }
  return true;
}

ProductPoint project_onto_product(PointView p, std::span<const SetPtr> sets,
                                  const WeightedProductSpace& space,
                                  double diagonal_tol) {
  check_point(p, space);
  if (sets.size() != space.block_count) {
    throw DomainError("one block set per block is required");
  }
  if (!is_diagonal(p, space, diagonal_tol)) {
    throw DomainError("product projection needs a diagonal point");
  }
  const auto base = space.block(p, 0);
  ProductPoint out;
  out.reserve(space.dimension());
  for (const auto& s : sets) {
    const auto b = project_block(base, *s);
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

ProductPoint project_onto_diagonal(PointView q, const WeightedProductSpace& space) {
  check_point(q, space);
  return space.repeat(centroid(q, space));
}

SetTheoreticObjective set_theoretic_objective(PointView x,
                                              std::span<const SetPtr> sets,
                                              std::span<const double> weights) {
  if (sets.size() != weights.size() || sets.empty()) {
    throw DomainError("one weight per set is required");
  }
  SetTheoreticObjective out;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (!(weights[i] > 0.0)) throw DomainError("weights must be positive");
    const double d = euclidean_distance(x, project_block(x, *sets[i]));
    out.literal += weights[i] * d;
    out.squared += weights[i] * d * d;
  }
  return out;
}

// ----------------------------------------------------------------------------
// ProductSet

ProductSet::ProductSet(std::vector<SetPtr> blocks, WeightedProductSpace space)
    : ProjectableSet(space.metric()), blocks_(std::move(blocks)), space_(std::move(space)) {
  if (blocks_.size() != space_.block_count) {
    throw DomainError("product set has " + std::to_string(blocks_.size()) +
                      " blocks for a space of " + std::to_string(space_.block_count));
  }
  for (const auto& b : blocks_) {
    if (!b) throw DomainError("product set has a missing block");
    if (b->dimension() != space_.block_dim) {
      throw DomainError("block set of dimension " + std::to_string(b->dimension()) +
                        " in a space with block dimension " +
                        std::to_string(space_.block_dim));
    }
    if (b->metric().kind() != Metric::Kind::kEuclidean) {
      throw DomainError("block sets must use the Euclidean metric");
    }
  }
}

bool ProductSet::is_convex() const {
  return std::all_of(blocks_.begin(), blocks_.end(),
                     [](const SetPtr& b) { return b->is_convex(); });
}

bool ProductSet::is_bounded() const {
  return std::all_of(blocks_.begin(), blocks_.end(),
                     [](const SetPtr& b) { return b->is_bounded(); });
}

bool ProductSet::contains(PointView x, double tol) const {
  if (x.size() != dimension()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (!blocks_[i]->contains(space_.block(x, i), tol)) return false;
  }
  return true;
}

Point ProductSet::sample(Rng& rng) const {
  Point x;
  x.reserve(dimension());
  for (const auto& b : blocks_) {
    const auto s = b->sample(rng);
    x.insert(x.end(), s.begin(), s.end());
  }
  return x;
}

std::optional<Point> ProductSet::nearest(PointView x) const {
  check_dimension(x, "nearest point");
  Point out;
  out.reserve(dimension());
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    auto b = blocks_[i]->nearest(space_.block(x, i));
    if (!b) return std::nullopt;
    out.insert(out.end(), b->begin(), b->end());
  }
  return out;
}

std::optional<double> ProductSet::farthest_distance(PointView x) const {
  check_dimension(x, "farthest distance");
  double s = 0.0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    auto f = blocks_[i]->farthest_distance(space_.block(x, i));
    if (!f) return std::nullopt;
    s += space_.weights[i] * *f * *f;
  }
  return std::sqrt(s);
}

std::optional<double> ProductSet::directed_hausdorff_to(
    const ProjectableSet& other) const {
  const auto* o = dynamic_cast<const ProductSet*>(&other);
  if (o == nullptr || !(o->metric() == metric())) return std::nullopt;
  // The weighted squared distance separates over blocks.
  double s = 0.0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i] == o->blocks_[i]) continue;
    const auto r = aamkit::directed_hausdorff(*blocks_[i], *o->blocks_[i]);
    if (r.error_bound != 0.0) return std::nullopt;
    s += space_.weights[i] * r.value * r.value;
  }
  return std::sqrt(s);
}

std::optional<std::pair<Point, Point>> ProductSet::bounding_box() const {
  Point lo, hi;
  for (const auto& b : blocks_) {
    auto box = b->bounding_box();
    if (!box) return std::nullopt;
    lo.insert(lo.end(), box->first.begin(), box->first.end());
    hi.insert(hi.end(), box->second.begin(), box->second.end());
  }
  return std::pair{lo, hi};
}

double ProductSet::net_radius(double h) const {
  return ProjectableSet::net_radius(h);
}

std::optional<Point> ProductSet::project_closed_form(const CostFunction& cost,
                                                     PointView fixed, Side) const {
  if (!is_own_squared_distance(cost)) return std::nullopt;
  return nearest(fixed);
}

// ----------------------------------------------------------------------------
// DiagonalSet

DiagonalSet::DiagonalSet(Point base_lo, Point base_hi, WeightedProductSpace space)
    : ProjectableSet(space.metric()),
      base_lo_(std::move(base_lo)),
      base_hi_(std::move(base_hi)),
      space_(std::move(space)) {
  if (base_lo_.size() != space_.block_dim || base_hi_.size() != space_.block_dim) {
    throw DomainError("diagonal base box has the wrong dimension");
  }
  for (std::size_t j = 0; j < base_lo_.size(); ++j) {
    if (!(base_lo_[j] <= base_hi_[j])) {
      throw DomainError("diagonal base box: lo must not exceed hi");
    }
  }
}

bool DiagonalSet::contains(PointView x, double tol) const {
  if (!is_diagonal(x, space_, tol)) return false;
  const auto b = space_.block(x, 0);
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (b[j] < base_lo_[j] - tol || b[j] > base_hi_[j] + tol) return false;
  }
  return true;
}

Point DiagonalSet::sample(Rng& rng) const {
  Point v(base_lo_.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = rng.uniform(base_lo_[j], base_hi_[j]);
  return space_.repeat(v);
}

std::optional<Point> DiagonalSet::nearest(PointView x) const {
  check_dimension(x, "nearest point");
  // Over the diagonal the weighted distance is |v - centroid|^2 + const.
  Point c = centroid(x, space_);
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = std::clamp(c[j], base_lo_[j], base_hi_[j]);
  return space_.repeat(c);
}

std::optional<double> DiagonalSet::directed_hausdorff_to(
    const ProjectableSet& other) const {
  const auto* o = dynamic_cast<const DiagonalSet*>(&other);
  if (o == nullptr || !(o->metric() == metric())) return std::nullopt;
  // With weights summing to 1, d((v..v),(w..w)) = |v - w|: the box rule.
  double s = 0.0;
  for (std::size_t j = 0; j < base_lo_.size(); ++j) {
    const double gap = std::max({0.0, o->base_lo_[j] - base_lo_[j], base_hi_[j] - o->base_hi_[j]});
    s += gap * gap;
  }
  return std::sqrt(s);
}

std::optional<std::pair<Point, Point>> DiagonalSet::bounding_box() const {
  return std::pair{space_.repeat(base_lo_), space_.repeat(base_hi_)};
}

std::vector<Point> DiagonalSet::net(double h) const {
  auto lattice = box_lattice(base_lo_, base_hi_, h);
  for (auto& v : lattice) v = space_.repeat(v);
  return lattice;
}

double DiagonalSet::net_radius(double h) const {
  return 0.5 * h * std::sqrt(static_cast<double>(space_.block_dim));
}

std::optional<Point> DiagonalSet::project_closed_form(const CostFunction& cost,
                                                      PointView fixed, Side) const {
  if (!is_own_squared_distance(cost)) return std::nullopt;
  return nearest(fixed);
}

// ----------------------------------------------------------------------------
// Schedules

BlockSchedule make_translation_schedule(std::vector<SetPtr> limit,
                                        std::vector<Point> directions,
                                        const DriftLaw& law, std::size_t length,
                                        const WeightedProductSpace& space) {
  space.validate();
  if (limit.size() != space.block_count) {
    throw DomainError("one limit block set per block is required");
  }
  if (length == 0) throw DomainError("schedule length must be positive");
  if (length > law.max_length()) {
    throw DomainError("drift law provides " + std::to_string(law.max_length()) +
                      " values, schedule needs " + std::to_string(length));
  }
  if (directions.empty()) {
    Point e(space.block_dim, 0.0);
    e[0] = 1.0;
    directions.assign(space.block_count, e);
  }
  if (directions.size() != space.block_count) {
    throw DomainError("one drift direction per block is required");
  }
  double norm2 = 0.0;
  for (std::size_t i = 0; i < directions.size(); ++i) {
    if (directions[i].size() != space.block_dim) {
      throw DomainError("drift direction has the wrong dimension");
    }
    for (double v : directions[i]) norm2 += space.weights[i] * v * v;
  }
  if (!(norm2 > 0.0)) throw DomainError("drift directions are all zero");
  const double scale = 1.0 / std::sqrt(norm2);

  BlockSchedule out;
  out.limit = limit;
  out.steps.reserve(length);
  Point offset(space.block_dim);
  for (std::size_t n = 0; n < length; ++n) {
    const double e = law.at(n);
    std::vector<SetPtr> step;
    step.reserve(limit.size());
    for (std::size_t i = 0; i < limit.size(); ++i) {
      if (e == 0.0) {
        step.push_back(limit[i]);
        continue;
      }
      for (std::size_t j = 0; j < offset.size(); ++j) {
        offset[j] = e * scale * directions[i][j];
      }
      step.push_back(limit[i]->translated(offset));
    }
    out.steps.push_back(std::move(step));
  }
  return out;
}

std::pair<Point, Point> compact_region(const BlockSchedule& schedule) {
  std::optional<std::pair<Point, Point>> region;
  auto absorb = [&](const SetPtr& s) {
    auto box = s->bounding_box();
    if (!box) {
      throw DomainError(s->family() +
                        " block set needs a sampling box to bound the region");
    }
    if (!region) {
      region = std::move(box);
      return;
    }
    for (std::size_t j = 0; j < region->first.size(); ++j) {
      region->first[j] = std::min(region->first[j], box->first[j]);
      region->second[j] = std::max(region->second[j], box->second[j]);
    }
  };
  for (const auto& step : schedule.steps) {
    for (const auto& s : step) absorb(s);
  }
  for (const auto& s : schedule.limit) absorb(s);
  if (!region) throw DomainError("empty block schedule");
  for (std::size_t j = 0; j < region->first.size(); ++j) {
    const double pad = std::max(0.1, 0.1 * (region->second[j] - region->first[j]));
    region->first[j] -= pad;
    region->second[j] += pad;
  }
  return *region;
}

SetSchedule make_set_schedule(const BlockSchedule& schedule,
                              const WeightedProductSpace& space) {
  if (schedule.steps.empty()) throw DomainError("empty block schedule");
  const auto [lo, hi] = compact_region(schedule);
  SetPtr diagonal = std::make_shared<const DiagonalSet>(lo, hi, space);
  SetPtr q_limit = std::make_shared<const ProductSet>(schedule.limit, space);

  std::vector<SetPtr> q_sets;
  q_sets.reserve(schedule.size());
  const std::vector<SetPtr>* prev = nullptr;
  for (const auto& step : schedule.steps) {
    if (step == schedule.limit) {
      q_sets.push_back(q_limit);
    } else if (prev != nullptr && step == *prev) {
      q_sets.push_back(q_sets.back());
    } else {
      q_sets.push_back(std::make_shared<const ProductSet>(step, space));
    }
    prev = &step;
  }
  return SetSchedule(std::vector<SetPtr>(schedule.size(), diagonal), std::move(q_sets),
                     diagonal, q_limit);
}

ProductPoint default_start(const BlockSchedule& schedule,
                           const WeightedProductSpace& space) {
  if (schedule.steps.empty()) throw DomainError("empty block schedule");
  const auto [lo, hi] = compact_region(schedule);
  Point center(lo.size());
  for (std::size_t j = 0; j < center.size(); ++j) center[j] = 0.5 * (lo[j] + hi[j]);
  ProductPoint q;
  q.reserve(space.dimension());
  for (const auto& s : schedule.steps.front()) {
    const auto b = project_block(center, *s);
    q.insert(q.end(), b.begin(), b.end());
  }
  return q;
}

FilterResult run_adaptive_filter(const BlockSchedule& schedule,
                                 const WeightedProductSpace& space, PointView q0,
                                 const StoppingRule& stop,
                                 const std::optional<OracleMinimizer>& oracle) {
  space.validate();
  auto set_schedule = make_set_schedule(schedule, space);
  if (oracle) set_schedule.set_oracle(*oracle);
  FilterResult out;
  out.trace = run_aam(SquaredDistanceCost(space.metric()), set_schedule, q0, stop);
  const auto last = space.block(out.trace.last().p, 0);
  out.filter_point.assign(last.begin(), last.end());
  return out;
}

}  // namespace aamkit::hilbert
