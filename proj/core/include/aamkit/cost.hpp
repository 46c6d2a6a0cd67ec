#pragma once

#include <functional>
#include <memory>

#include "aamkit/metric.hpp"

namespace aamkit {

enum class CostKind { kSquaredDistance, kKullbackLeibler, kCustom };

/// The two-argument cost D: M x M -> R together with the auxiliary function
/// delta of the three/four point conditions and the metric of M.
class CostFunction {
 public:
  virtual ~CostFunction() = default;

  virtual CostKind kind() const = 0;
  virtual const Metric& metric() const = 0;
  virtual double evaluate(PointView a, PointView b) const = 0;
  virtual double delta(PointView a, PointView a_tilde) const = 0;

  double operator()(PointView a, PointView b) const { return evaluate(a, b); }
};

/// D(A,B) = d(A,B)^2 and delta = D for a Euclidean-type metric.
class SquaredDistanceCost final : public CostFunction {
 public:
  explicit SquaredDistanceCost(Metric metric = Metric::euclidean());

  CostKind kind() const override { return CostKind::kSquaredDistance; }
  const Metric& metric() const override { return metric_; }
  double evaluate(PointView a, PointView b) const override;
  double delta(PointView a, PointView a_tilde) const override {
    return evaluate(a, a_tilde);
  }

 private:
  Metric metric_;
};

/// Cost assembled from callables. Sets have no closed-form projection for it,
/// so the engine falls back to grid search.
class FunctionCost final : public CostFunction {
 public:
  using Fn = std::function<double(PointView, PointView)>;

  FunctionCost(Fn evaluate, Fn delta, Metric metric = Metric::euclidean())
      : evaluate_(std::move(evaluate)),
        delta_(std::move(delta)),
        metric_(std::move(metric)) {}

  CostKind kind() const override { return CostKind::kCustom; }
  const Metric& metric() const override { return metric_; }
  double evaluate(PointView a, PointView b) const override {
    return evaluate_(a, b);
  }
  double delta(PointView a, PointView a_tilde) const override {
    return delta_(a, a_tilde);
  }

 private:
  Fn evaluate_;
  Fn delta_;
  Metric metric_;
};

}  // namespace aamkit
