#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "aamkit/cost.hpp"
#include "aamkit/schedule.hpp"
#include "aamkit/sets.hpp"
#include "aamkit/trace.hpp"

/// Divergence instantiation: measures on a finite alphabet, the I-divergence
/// D(P||Q) with natural logarithms, and the mixture-decomposition /
/// log-optimal portfolio application.
///
/// Joint measures on {1..I} x Y are stored row-major: index i * |Y| + y.
namespace aamkit::div {

/// A measure in M(Sigma, b, B): mass(s) >= floor for every symbol and
/// sum(mass) <= cap.
struct BoundedMeasure {
  std::vector<std::string> alphabet;
  std::vector<double> mass;
  double floor = 0.0;
  double cap = 1.0;

  /// Throws DomainError on shape, floor or cap violations.
  void validate(double tol = 1e-12) const;
};

/// sum_s p(s) log(p(s)/q(s)); 0 log 0 = 0, +inf when q(s) = 0 < p(s).
double kl_divergence(PointView p, PointView q);
/// D(p||p~) - sum_s (p(s) - p~(s)).
double delta_div(PointView p, PointView p_tilde);

/// Checked variants: alphabets must match and both measures must satisfy
/// their floors and caps.
double kl_divergence(const BoundedMeasure& p, const BoundedMeasure& q);
double delta_div(const BoundedMeasure& p, const BoundedMeasure& p_tilde);

/// Cost for the engine; metric is the max-norm over the alphabet.
class KlCost final : public CostFunction {
 public:
  KlCost() : metric_(Metric::max_norm()) {}

  CostKind kind() const override { return CostKind::kKullbackLeibler; }
  const Metric& metric() const override { return metric_; }
  double evaluate(PointView a, PointView b) const override {
    return kl_divergence(a, b);
  }
  double delta(PointView a, PointView a_tilde) const override {
    return delta_div(a, a_tilde);
  }

 private:
  Metric metric_;
};

/// Known component measures mu_i on Y, weight floor c0 and component floor
/// mu0. When normalized_components is false (log-optimal portfolio) the mu_i
/// are positive measures rather than distributions; the projections only
/// use ratios and marginals, so they apply unchanged.
struct MixtureProblem {
  std::vector<std::string> outcomes;
  std::vector<std::vector<double>> components;  // I rows of |Y| entries
  double weight_floor = 0.0;                    // c0
  double component_floor = 0.0;                 // mu0
  bool normalized_components = true;

  std::size_t component_count() const { return components.size(); }
  std::size_t outcome_count() const { return outcomes.size(); }
  std::size_t joint_size() const {
    return component_count() * outcome_count();
  }

  /// Throws DomainError: empty tables, ragged rows, mu_i(y) < mu0,
  /// mu0 <= 0, c0 <= 0, I * c0 > 1, rows not summing to 1 when normalized.
  void validate() const;

  /// b = min(c0 mu0, c0 mu0^2 / 2): lower bound on the projections when
  /// the outcome distribution is at least mu0/2 pointwise. Used as a
  /// verification bound, never as a clip.
  double measure_floor() const;

  /// Q(c~)(i, y) = c~_i mu_i(y).
  Point joint_from_weights(std::span<const double> weights) const;
  /// c~_i recovered from a point of the weight set.
  std::vector<double> weights_from_joint(PointView q) const;
  /// Y-marginal sum_i P(i, y).
  std::vector<double> outcome_marginal(PointView p) const;
  /// Component marginal sum_y P(i, y).
  std::vector<double> component_marginal(PointView p) const;
  /// sum_i c_i mu_i.
  std::vector<double> mixture(std::span<const double> weights) const;
};

struct WeightVector {
  std::vector<double> weights;

  /// sum = 1 and every weight >= c0, both within tol.
  bool is_valid(double weight_floor, double tol = 1e-9) const;
};

/// Output of the threshold rule: the projection onto the weight set.
struct WeightProjection {
  WeightVector weights;
  std::size_t active_count = 0;  // J*
  double eta = 0.0;              // eta(J*)
};

/// Minimizes sum_i max(floor, s * v_i)-style problems: returns x with
/// x_i = v_i / eta(J*) for the J* largest v_i and x_i = floor otherwise,
/// sum(x) = 1. v must be nonnegative with positive sum; n * floor <= 1.
///
/// Sort is stable by value descending (ties by index); J is scanned from n
/// down to 1 and the first J meeting both threshold conditions is taken.
/// Throws InternalError when none does.
WeightProjection floored_rescale(std::span<const double> values, double floor);

/// argmin over the weight set of D(p || Q(c~)).
WeightProjection project_onto_weight_set(PointView joint,
                                         const MixtureProblem& problem);

/// P(i,y) = c~_i mu_i(y) pbar(y) / sum_j c~_j mu_j(y).
Point project_onto_coupling_set(const WeightVector& weights,
                                std::span<const double> outcome_dist,
                                const MixtureProblem& problem);

/// Frequencies of symbol indices; throws on an empty sequence or an index
/// >= alphabet_size.
std::vector<double> empirical_distribution(std::span<const std::size_t> samples,
                                           std::size_t alphabet_size);
std::vector<double> empirical_distribution(
    std::span<const std::string> samples,
    std::span<const std::string> alphabet);

struct ClampedDistribution {
  std::vector<double> dist;
  double lambda = 1.0;
};

/// mu0/2 + lambda (pbar(y) - mu0/2)^+ with lambda solving sum = 1.
/// Requires 0 < mu0/2 < 1/|Y|; throws when no mass exceeds mu0/2. Returns
/// pbar unchanged (lambda = 1) when pbar >= mu0/2 pointwise.
ClampedDistribution clamp_empirical(std::span<const double> pbar, double mu0);

// ----------------------------------------------------------------------------
// Sets

/// P-set of the decomposition: {P >= 0 : sum_i P(i, y) = pbar(y)}.
class CouplingSet final : public ProjectableSet {
 public:
  CouplingSet(std::shared_ptr<const MixtureProblem> problem,
              std::vector<double> outcome_dist);

  std::string family() const override { return "coupling"; }
  std::size_t dimension() const override { return problem_->joint_size(); }
  const std::vector<double>& outcome_dist() const { return outcome_dist_; }
  const MixtureProblem& problem() const { return *problem_; }

  bool contains(PointView x, double tol) const override;
  Point sample(Rng& rng) const override;
  std::optional<Point> nearest(PointView x) const override;
  std::optional<double> directed_hausdorff_to(
      const ProjectableSet& other) const override;
  std::optional<std::pair<Point, Point>> bounding_box() const override;

 protected:
  std::optional<Point> project_closed_form(const CostFunction& cost,
                                           PointView fixed,
                                           Side side) const override;

 private:
  std::shared_ptr<const MixtureProblem> problem_;
  std::vector<double> outcome_dist_;
};

/// Q-set of the decomposition: {c~_i mu_i(y) : sum c~ = 1, c~_i >= c0}.
class WeightSet final : public ProjectableSet {
 public:
  explicit WeightSet(std::shared_ptr<const MixtureProblem> problem);

  std::string family() const override { return "weights"; }
  std::size_t dimension() const override { return problem_->joint_size(); }
  const MixtureProblem& problem() const { return *problem_; }

  bool contains(PointView x, double tol) const override;
  Point sample(Rng& rng) const override;
  std::optional<double> directed_hausdorff_to(
      const ProjectableSet& other) const override;
  std::vector<Point> net(double h) const override;
  double net_radius(double h) const override;

 protected:
  std::optional<Point> project_closed_form(const CostFunction& cost,
                                           PointView fixed,
                                           Side side) const override;

 private:
  std::shared_ptr<const MixtureProblem> problem_;
};

/// Probability simplex with a pointwise floor, {x >= floor : sum x = 1}.
class FlooredSimplexSet final : public ProjectableSet {
 public:
  FlooredSimplexSet(std::size_t dim, double floor);

  std::string family() const override { return "simplex"; }
  std::size_t dimension() const override { return dim_; }
  double floor() const { return floor_; }

  bool contains(PointView x, double tol) const override;
  Point sample(Rng& rng) const override;
  std::optional<Point> nearest(PointView x) const override;
  std::optional<double> directed_hausdorff_to(
      const ProjectableSet& other) const override;
  std::optional<std::pair<Point, Point>> bounding_box() const override;
  std::vector<Point> net(double h) const override;
  double net_radius(double h) const override { return h; }

 protected:
  std::optional<Point> project_closed_form(const CostFunction& cost,
                                           PointView fixed,
                                           Side side) const override;

 private:
  std::size_t dim_;
  double floor_;
};

/// The ambient space M(Sigma, b, B) itself, for modulus estimates.
class MeasureSpaceSet final : public ProjectableSet {
 public:
  MeasureSpaceSet(std::size_t dim, double floor, double cap);

  std::string family() const override { return "measures"; }
  std::size_t dimension() const override { return dim_; }

  bool contains(PointView x, double tol) const override;
  Point sample(Rng& rng) const override;
  std::optional<Point> nearest(PointView x) const override;
  std::optional<std::pair<Point, Point>> bounding_box() const override;
  double net_radius(double h) const override { return h; }

 private:
  std::size_t dim_;
  double floor_;
  double cap_;
};

// ----------------------------------------------------------------------------
// Estimation

enum class EstimationMode { kBatch, kAdaptive };

struct EstimationOptions {
  EstimationMode mode = EstimationMode::kBatch;
  /// Adaptive mode: P_n is rebuilt after every batch_size new samples.
  std::size_t batch_size = 1;
};

struct MixtureEstimate {
  WeightVector weights;
  AamTrace trace;
};

/// Adaptive-mode schedule of the given length: P_n is the coupling set of
/// clamp_empirical over the first max(1, n * batch_size) samples, Q_n the
/// weight set. Once every sample is in, P_n is the limit set itself. eps_n
/// is flagged as estimated.
SetSchedule adaptive_schedule(std::span<const std::size_t> samples,
                              std::shared_ptr<const MixtureProblem> problem,
                              std::size_t batch_size, std::size_t length);

/// Maximum-likelihood mixture weights by alternating divergence
/// minimization between the coupling set and the weight set.
///
/// Batch mode: one coupling set from the full-sample empirical distribution
/// (classical alternation). Adaptive mode: P_n from clamp_empirical of the
/// first n * batch_size samples; the limit P-set is the full-sample clamped
/// distribution, so eps_n is an estimate.
MixtureEstimate estimate_mixture_weights(std::span<const std::size_t> samples,
                                         const MixtureProblem& problem,
                                         const StoppingRule& stop = {},
                                         const EstimationOptions& options = {});

/// Same alternation on an explicit outcome distribution (batch mode).
MixtureEstimate estimate_mixture_weights(std::span<const double> outcome_dist,
                                         const MixtureProblem& problem,
                                         const StoppingRule& stop = {});

/// Largest violation of the first-order conditions of
///   max sum_y pbar(y) log sum_i c_i mu_i(y)  over the floored simplex:
/// the gradient must be equal on free weights and no larger on floored ones.
double ml_stationarity_residual(std::span<const double> weights,
                                std::span<const double> outcome_dist,
                                const MixtureProblem& problem);

/// sum_y pbar(y) log sum_i c_i mu_i(y).
double mixture_log_likelihood(std::span<const double> weights,
                              std::span<const double> outcome_dist,
                              const MixtureProblem& problem);

/// Returns matrix: one row per observed period, one column per asset.
using ReturnMatrix = std::vector<std::vector<double>>;

/// Builds the decomposition problem for a return matrix: outcomes are the
/// rows (equally weighted), component i is column i scaled by the largest
/// return. Throws on nonpositive returns or I * c0 > 1.
MixtureProblem portfolio_problem(const ReturnMatrix& returns, double c0);

struct PortfolioResult {
  WeightVector weights;
  AamTrace trace;
};

/// Weights maximizing the empirical mean of log sum_i c_i W_i over the
/// floored simplex. The alternation is Cover's multiplicative update.
PortfolioResult log_optimal_portfolio(const ReturnMatrix& returns, double c0,
                                      const StoppingRule& stop = {});

/// (1/L) sum_l log sum_i c_i W_{l,i}.
double mean_log_wealth(std::span<const double> weights,
                       const ReturnMatrix& returns);

}  // namespace aamkit::div
