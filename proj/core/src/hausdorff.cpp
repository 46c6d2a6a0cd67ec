#include "aamkit/hausdorff.hpp"

#include <algorithm>
#include <limits>

#include "aamkit/error.hpp"

namespace aamkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool has_nearest(const ProjectableSet& s) {
  if (s.dimension() == 0) return false;
  const Point origin(s.dimension(), 0.0);
  return s.nearest(origin).has_value();
}

// sup over pts of the distance to b, using b's exact nearest point.
double sup_distance_to(const std::vector<Point>& pts, const ProjectableSet& b) {
  double m = 0.0;
  for (const auto& x : pts) m = std::max(m, b.metric()(x, *b.nearest(x)));
  return m;
}

}  // namespace

HausdorffResult directed_hausdorff(const ProjectableSet& a_set,
                                   const ProjectableSet& b_set,
                                   const HausdorffOptions& options) {
  if (a_set.dimension() != b_set.dimension()) {
    throw DomainError("Hausdorff distance between sets of different dimension");
  }
  if (!(a_set.metric() == b_set.metric())) {
    throw DomainError("Hausdorff distance between sets with different metrics");
  }
  if (!options.force_fallback) {
    if (auto v = a_set.directed_hausdorff_to(b_set)) return {*v, 0.0, true};
  }
  if (!a_set.is_bounded() && b_set.is_bounded()) return {kInf, 0.0, true};

  const bool b_nearest = has_nearest(b_set);
  if (!options.force_fallback && b_nearest && b_set.is_convex()) {
    if (auto ext = a_set.extreme_points()) {
      return {sup_distance_to(*ext, b_set), 0.0, true};
    }
  }
  if (!a_set.is_bounded()) {
    throw DomainError("no Hausdorff rule for unbounded " + a_set.family() +
                      " against " + b_set.family());
  }

  const double h = options.resolution;
  const auto a_net = a_set.net(h);
  const double a_radius = a_set.net_radius(h);
  if (b_nearest) return {sup_distance_to(a_net, b_set), a_radius, false};

  const auto b_net = b_set.net(h);
  double m = 0.0;
  for (const auto& x : a_net) {
    double best = kInf;
    for (const auto& y : b_net) best = std::min(best, a_set.metric()(x, y));
    m = std::max(m, best);
  }
  return {m, a_radius + b_set.net_radius(h), false};
}

HausdorffResult hausdorff(const ProjectableSet& a, const ProjectableSet& b,
                          const HausdorffOptions& options) {
  const auto ab = directed_hausdorff(a, b, options);
  const auto ba = directed_hausdorff(b, a, options);
  return {std::max(ab.value, ba.value),
          std::max(ab.error_bound, ba.error_bound),
          ab.analytic && ba.analytic};
}

}  // namespace aamkit
