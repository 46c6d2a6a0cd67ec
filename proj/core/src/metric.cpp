#include "aamkit/metric.hpp"

#include <algorithm>
#include <cmath>

#include "aamkit/error.hpp"

namespace aamkit {

Metric Metric::euclidean() { return Metric(Kind::kEuclidean, {}, 0); }

Metric Metric::max_norm() { return Metric(Kind::kMaxNorm, {}, 0); }

Metric Metric::weighted_blocks(std::vector<double> weights,
                               std::size_t block_dim) {
  if (weights.empty() || block_dim == 0) {
    throw DomainError("weighted metric needs at least one block of size >= 1");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw DomainError("block weights must be positive");
  }
  return Metric(Kind::kWeightedBlocks, std::move(weights), block_dim);
}

double euclidean_distance(PointView a, PointView b) {
  if (a.size() != b.size()) throw DomainError("dimension mismatch in metric");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return std::sqrt(s);
}

double max_norm_distance(PointView a, PointView b) {
  if (a.size() != b.size()) throw DomainError("dimension mismatch in metric");
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    m = std::max(m, std::abs(a[j] - b[j]));
  }
  return m;
}

double Metric::operator()(PointView a, PointView b) const {
  if (kind_ == Kind::kMaxNorm) return max_norm_distance(a, b);
  return std::sqrt(squared(a, b));
}

double Metric::squared(PointView a, PointView b) const {
  switch (kind_) {
    case Kind::kEuclidean: {
      if (a.size() != b.size()) {
        throw DomainError("dimension mismatch in metric");
      }
      double s = 0.0;
      for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
      }
      return s;
    }
    case Kind::kMaxNorm: {
      const double m = max_norm_distance(a, b);
      return m * m;
    }
    case Kind::kWeightedBlocks: {
      if (a.size() != b.size() || a.size() != weights_.size() * block_dim_) {
        throw DomainError("dimension mismatch in weighted block metric");
      }
      double s = 0.0;
      for (std::size_t i = 0; i < weights_.size(); ++i) {
        double block = 0.0;
        for (std::size_t j = 0; j < block_dim_; ++j) {
          const double d = a[i * block_dim_ + j] - b[i * block_dim_ + j];
          block += d * d;
        }
        s += weights_[i] * block;
      }
      return s;
    }
  }
  return 0.0;
}

}  // namespace aamkit
