#include "aamkit/cost.hpp"

namespace aamkit {

SquaredDistanceCost::SquaredDistanceCost(Metric metric)
    : metric_(std::move(metric)) {}

double SquaredDistanceCost::evaluate(PointView a, PointView b) const {
  return metric_.squared(a, b);
}

}  // namespace aamkit
