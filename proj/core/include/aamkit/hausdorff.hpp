#pragma once

#include "aamkit/sets.hpp"

namespace aamkit {

struct HausdorffResult {
  double value = 0.0;
  /// |value - true distance| <= error_bound. Zero on the analytic path.
  double error_bound = 0.0;
  bool analytic = true;
};

struct HausdorffOptions {
  /// Net spacing for the sampled fallback.
  double resolution = 1e-2;
  /// Skip closed forms (used to cross-check them).
  bool force_fallback = false;
};

/// sup_{a in a_set} inf_{b in b_set} d(a, b).
///
/// Resolution order: the family's own closed form, then extreme points of
/// a_set against a convex b_set with an exact nearest point (the distance
/// to a convex set is convex, so its sup over a polytope sits at a vertex),
/// then a net of a_set against b_set's exact nearest point (error is the
/// net radius of a_set), then two nets (error is the sum of both radii).
HausdorffResult directed_hausdorff(const ProjectableSet& a_set,
                                   const ProjectableSet& b_set,
                                   const HausdorffOptions& options = {});

/// max of the two directed distances. Both sets must share a metric and
/// dimension. Symmetric by construction.
HausdorffResult hausdorff(const ProjectableSet& a, const ProjectableSet& b,
                          const HausdorffOptions& options = {});

inline double hausdorff_distance(const ProjectableSet& a,
                                 const ProjectableSet& b) {
  return hausdorff(a, b).value;
}

}  // namespace aamkit
