#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aamkit {

using Point = std::vector<double>;
using PointView = std::span<const double>;

/// Distance function of the ambient compact space M.
///
/// Three kinds cover every built-in space:
///  - Euclidean on R^m,
///  - weighted block Euclidean on R^{I*k}: d(A,B)^2 = sum_i c_i |A_i - B_i|^2,
///  - max-norm over a finite alphabet (measures): d(P,Q) = max |P(s) - Q(s)|.
class Metric {
 public:
  enum class Kind { kEuclidean, kWeightedBlocks, kMaxNorm };

  static Metric euclidean();
  static Metric max_norm();
  /// Weights must be positive; block_dim must divide the point dimension.
  static Metric weighted_blocks(std::vector<double> weights,
                                std::size_t block_dim);

  Kind kind() const { return kind_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t block_dim() const { return block_dim_; }

  double operator()(PointView a, PointView b) const;
  /// d(a, b)^2 without the round trip through sqrt.
  double squared(PointView a, PointView b) const;

  bool operator==(const Metric& other) const = default;

 private:
  Metric(Kind kind, std::vector<double> weights, std::size_t block_dim)
      : kind_(kind), weights_(std::move(weights)), block_dim_(block_dim) {}

  Kind kind_;
  std::vector<double> weights_;
  std::size_t block_dim_ = 0;
};

double euclidean_distance(PointView a, PointView b);
double max_norm_distance(PointView a, PointView b);

}  // namespace aamkit
