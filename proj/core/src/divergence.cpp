#include "aamkit/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "aamkit/engine.hpp"
#include "aamkit/error.hpp"
#include "aamkit/schedule.hpp"

namespace aamkit::div {

namespace {

constexpr double kSumTol = 1e-9;

double sum(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

// Max-norm nearest point of {y >= f, sum y = total} to v: the smallest
// radius r admitting such a y in [v - r, v + r], then an interpolation
// between the lower and upper envelopes at that radius.
Point max_norm_nearest_simplex(PointView v, double f, double total) {
  const std::size_t n = v.size();
  const double vsum = sum(v);
  double r = std::max(0.0, (total - vsum) / static_cast<double>(n));
  for (double x : v) r = std::max(r, f - x);

  auto lower_sum = [&](double rad) {
    double s = 0.0;
    for (double x : v) s += std::max(f, x - rad);
    return s;
  };
  if (lower_sum(r) > total) {
    double lo = r;
    double hi = r + *std::max_element(v.begin(), v.end()) - f + 1.0;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (lower_sum(mid) > total ? lo : hi) = mid;
    }
    r = hi;
  }
  Point lo(n), hi(n);
  double slo = 0.0, shi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lo[i] = std::max(f, v[i] - r);
    hi[i] = std::max(lo[i], v[i] + r);
    slo += lo[i];
    shi += hi[i];
  }
  const double alpha =
      shi > slo ? std::clamp((total - slo) / (shi - slo), 0.0, 1.0) : 0.0;
  Point y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = lo[i] + alpha * (hi[i] - lo[i]);
  return y;
}

// Lattice of {x >= floor, sum x = 1} with coordinate spacing at most h.
std::vector<Point> simplex_lattice(std::size_t n, double floor, double h) {
  if (!(h > 0.0)) throw DomainError("lattice spacing must be positive");
  const double room = 1.0 - static_cast<double>(n) * floor;
  if (room <= 1e-15) return {Point(n, floor)};
  const auto units = static_cast<std::size_t>(
      std::max(1.0, std::ceil(room / h - 1e-9)));
  // Number of compositions of `units` into n parts.
  double count = 1.0;
  for (std::size_t j = 1; j < n; ++j) {
    count *= static_cast<double>(units + j) / static_cast<double>(j);
  }
  if (count > static_cast<double>(kMaxNetPoints)) {
    throw DomainError("simplex lattice would exceed " +
                      std::to_string(kMaxNetPoints) + " points");
  }
  const double unit = room / static_cast<double>(units);
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<std::size_t> k(n, 0);
  auto emit = [&]() {
    Point x(n);
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = floor + unit * static_cast<double>(k[j]);
    }
    out.push_back(std::move(x));
  };
  // Recursive enumeration, first coordinate slowest.
  auto rec = [&](auto&& self, std::size_t j, std::size_t left) -> void {
    if (j + 1 == n) {
      k[j] = left;
      emit();
      return;
    }
    for (std::size_t v = 0; v <= left; ++v) {
      k[j] = v;
      self(self, j + 1, left - v);
    }
  };
  rec(rec, 0, units);
  return out;
}

// P(i,y) = fixed(i,y) pbar(y) / sum_j fixed(j,y); uniform split on zero
// columns. Minimizes D(P||fixed) and D(fixed||P) over the coupling set.
Point rescale_columns(PointView fixed, std::span<const double> pbar,
                      std::size_t components) {
  const std::size_t outcomes = pbar.size();
  Point p(components * outcomes);
  for (std::size_t y = 0; y < outcomes; ++y) {
    double col = 0.0;
    for (std::size_t i = 0; i < components; ++i) col += fixed[i * outcomes + y];
    for (std::size_t i = 0; i < components; ++i) {
      p[i * outcomes + y] =
          col > 0.0 ? fixed[i * outcomes + y] * pbar[y] / col
                    : pbar[y] / static_cast<double>(components);
    }
  }
  return p;
}

bool is_kl(const CostFunction& cost) {
  return cost.kind() == CostKind::kKullbackLeibler;
}

void check_distribution(std::span<const double> d, const char* what) {
  for (double x : d) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw DomainError(std::string(what) + " has a negative or non-finite entry");
    }
  }
  if (std::abs(sum(d) - 1.0) > kSumTol) {
    throw DomainError(std::string(what) + " does not sum to 1");
  }
}

}  // namespace

// ----------------------------------------------------------------------------
// Measures and divergences

void BoundedMeasure::validate(double tol) const {
  if (alphabet.empty()) throw DomainError("measure has an empty alphabet");
  if (alphabet.size() != mass.size()) {
    throw DomainError("measure has " + std::to_string(mass.size()) +
                      " masses for " + std::to_string(alphabet.size()) +
                      " symbols");
  }
  if (!(floor > 0.0) || !(cap > floor)) {
    throw DomainError("measure bounds need 0 < floor < cap");
  }
  for (std::size_t s = 0; s < mass.size(); ++s) {
    if (!(mass[s] >= floor - tol)) {
      throw DomainError("mass of '" + alphabet[s] + "' is below the floor");
    }
  }
  if (sum(mass) > cap + tol) throw DomainError("total mass exceeds the cap");
}

double kl_divergence(PointView p, PointView q) {
  if (p.size() != q.size()) throw DomainError("divergence of different sizes");
  double d = 0.0;
  for (std::size_t s = 0; s < p.size(); ++s) {
    if (p[s] < 0.0 || q[s] < 0.0) {
      throw DomainError("divergence of a negative measure");
    }
    if (p[s] == 0.0) continue;
    if (q[s] == 0.0) return std::numeric_limits<double>::infinity();
    d += p[s] * std::log(p[s] / q[s]);
  }
  return d;
}

double delta_div(PointView p, PointView p_tilde) {
  return kl_divergence(p, p_tilde) - (sum(p) - sum(p_tilde));
}

namespace {

void check_pair(const BoundedMeasure& p, const BoundedMeasure& q) {
  if (p.alphabet != q.alphabet) throw DomainError("alphabet mismatch");
  p.validate();
  q.validate();
}

}  // namespace

double kl_divergence(const BoundedMeasure& p, const BoundedMeasure& q) {
  check_pair(p, q);
  return kl_divergence(p.mass, q.mass);
}

double delta_div(const BoundedMeasure& p, const BoundedMeasure& p_tilde) {
  check_pair(p, p_tilde);
  return delta_div(p.mass, p_tilde.mass);
}

// ----------------------------------------------------------------------------
// MixtureProblem

void MixtureProblem::validate() const {
  std::vector<std::string> problems;
  if (outcomes.empty()) problems.emplace_back("no outcomes");
  if (components.empty()) problems.emplace_back("no components");
  if (!(weight_floor > 0.0)) problems.emplace_back("weight floor c0 must be positive");
  if (!(component_floor > 0.0)) {
    problems.emplace_back("component floor mu0 must be positive");
  }
  if (static_cast<double>(components.size()) * weight_floor > 1.0 + 1e-12) {
    problems.emplace_back("infeasible weight floor: " +
                          std::to_string(components.size()) + " * c0 > 1");
  }
  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& row = components[i];
    if (row.size() != outcomes.size()) {
      problems.push_back("component " + std::to_string(i) + " has " +
                         std::to_string(row.size()) + " entries for " +
                         std::to_string(outcomes.size()) + " outcomes");
      continue;
    }
    for (double x : row) {
      if (!(x >= component_floor - 1e-12) || !std::isfinite(x)) {
        problems.push_back("component " + std::to_string(i) +
                           " has an entry below mu0");
        break;
      }
    }
    if (normalized_components && std::abs(sum(row) - 1.0) > kSumTol) {
      problems.push_back("component " + std::to_string(i) + " does not sum to 1");
    }
  }
  if (!problems.empty()) {
    std::string msg;
    for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
    throw DomainError(msg);
  }
}

double MixtureProblem::measure_floor() const {
  const double a = weight_floor * component_floor;
  return std::min(a, 0.5 * a * component_floor);
}

Point MixtureProblem::joint_from_weights(std::span<const double> weights) const {
  if (weights.size() != component_count()) {
    throw DomainError("weight vector has the wrong length");
  }
  const std::size_t ny = outcome_count();
  Point q(joint_size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    for (std::size_t y = 0; y < ny; ++y) q[i * ny + y] = weights[i] * components[i][y];
  }
  return q;
}

std::vector<double> MixtureProblem::weights_from_joint(PointView q) const {
  if (q.size() != joint_size()) throw DomainError("joint point has the wrong size");
  const std::size_t ny = outcome_count();
  std::vector<double> w(component_count());
  for (std::size_t i = 0; i < w.size(); ++i) {
    double num = 0.0;
    for (std::size_t y = 0; y < ny; ++y) num += q[i * ny + y];
    w[i] = num / sum(components[i]);
  }
  return w;
}

std::vector<double> MixtureProblem::outcome_marginal(PointView p) const {
  if (p.size() != joint_size()) throw DomainError("joint point has the wrong size");
  const std::size_t ny = outcome_count();
  std::vector<double> m(ny, 0.0);
  for (std::size_t i = 0; i < component_count(); ++i) {
    for (std::size_t y = 0; y < ny; ++y) m[y] += p[i * ny + y];
  }
  return m;
}

std::vector<double> MixtureProblem::component_marginal(PointView p) const {
  if (p.size() != joint_size()) throw DomainError("joint point has the wrong size");
  const std::size_t ny = outcome_count();
  std::vector<double> m(component_count(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t y = 0; y < ny; ++y) m[i] += p[i * ny + y];
  }
  return m;
}

std::vector<double> MixtureProblem::mixture(std::span<const double> weights) const {
  if (weights.size() != component_count()) {
    throw DomainError("weight vector has the wrong length");
  }
  std::vector<double> m(outcome_count(), 0.0);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    for (std::size_t y = 0; y < m.size(); ++y) m[y] += weights[i] * components[i][y];
  }
  return m;
}

bool WeightVector::is_valid(double weight_floor, double tol) const {
  if (weights.empty() || std::abs(sum(weights) - 1.0) > tol) return false;
  return std::all_of(weights.begin(), weights.end(),
                     [&](double w) { return w >= weight_floor - tol; });
}

// ----------------------------------------------------------------------------
// Projections

WeightProjection floored_rescale(std::span<const double> values, double floor) {
  const std::size_t n = values.size();
  if (n == 0) throw DomainError("floored rescale of an empty vector");
  if (!(floor >= 0.0) || static_cast<double>(n) * floor > 1.0 + 1e-12) {
    throw DomainError("infeasible floor for floored rescale");
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DomainError("floored rescale needs nonnegative finite values");
    }
  }
  if (!(sum(values) > 0.0)) throw DomainError("floored rescale of a zero vector");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] > values[b];
  });
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + values[order[j]];

  constexpr double kSlack = 1e-12;
  for (std::size_t active = n; active >= 1; --active) {
    const double denom = 1.0 - static_cast<double>(n - active) * floor;
    if (denom <= 0.0) continue;
    const double eta = prefix[active] / denom;
    if (!(eta > 0.0)) continue;
    const bool free_ok = values[order[active - 1]] >= floor * eta * (1.0 - kSlack);
    const bool floored_ok =
        active == n || values[order[active]] <= floor * eta * (1.0 + kSlack);
    if (!free_ok || !floored_ok) continue;

    WeightProjection out;
    out.active_count = active;
    out.eta = eta;
    out.weights.weights.assign(n, floor);
    for (std::size_t j = 0; j < active; ++j) {
      out.weights.weights[order[j]] = values[order[j]] / eta;
    }
    return out;
  }
  throw InternalError("threshold rule found no active count");
}

WeightProjection project_onto_weight_set(PointView joint,
                                         const MixtureProblem& problem) {
  return floored_rescale(problem.component_marginal(joint), problem.weight_floor);
}

Point project_onto_coupling_set(const WeightVector& weights,
                                std::span<const double> outcome_dist,
                                const MixtureProblem& problem) {
  if (outcome_dist.size() != problem.outcome_count()) {
    throw DomainError("outcome distribution has the wrong length");
  }
  const Point q = problem.joint_from_weights(weights.weights);
  const std::size_t ny = problem.outcome_count();
  for (std::size_t y = 0; y < ny; ++y) {
    double col = 0.0;
    for (std::size_t i = 0; i < problem.component_count(); ++i) col += q[i * ny + y];
    if (!(col > 0.0)) {
      throw InternalError("zero mixture mass at outcome '" + problem.outcomes[y] + "'");
    }
  }
  return rescale_columns(q, outcome_dist, problem.component_count());
}

// ----------------------------------------------------------------------------
// Empirical distributions

std::vector<double> empirical_distribution(std::span<const std::size_t> samples,
                                           std::size_t alphabet_size) {
  if (samples.empty()) throw DomainError("empirical distribution of no samples");
  std::vector<double> counts(alphabet_size, 0.0);
  for (std::size_t s : samples) {
    if (s >= alphabet_size) {
      throw DomainError("sample index " + std::to_string(s) +
                        " is outside an alphabet of size " +
                        std::to_string(alphabet_size));
    }
    counts[s] += 1.0;
  }
  const auto n = static_cast<double>(samples.size());
  for (auto& c : counts) c /= n;
  return counts;
}

std::vector<double> empirical_distribution(std::span<const std::string> samples,
                                           std::span<const std::string> alphabet) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < alphabet.size(); ++i) index.emplace(alphabet[i], i);
  std::vector<std::size_t> idx;
  idx.reserve(samples.size());
  for (const auto& s : samples) {
    const auto it = index.find(s);
    if (it == index.end()) {
      throw DomainError("symbol '" + s + "' is not in the alphabet");
    }
    idx.push_back(it->second);
  }
  return empirical_distribution(idx, alphabet.size());
}

ClampedDistribution clamp_empirical(std::span<const double> pbar, double mu0) {
  if (pbar.empty()) throw DomainError("clamp of an empty distribution");
  const double half = 0.5 * mu0;
  if (!(half > 0.0) || !(half < 1.0 / static_cast<double>(pbar.size()))) {
    throw DomainError("clamp needs 0 < mu0/2 < 1/|Y|");
  }
  if (*std::min_element(pbar.begin(), pbar.end()) >= half) {
    return {std::vector<double>(pbar.begin(), pbar.end()), 1.0};
  }
  double excess = 0.0;
  for (double p : pbar) excess += std::max(0.0, p - half);
  if (!(excess > 0.0)) {
    throw DomainError("degenerate distribution: no mass above mu0/2");
  }
  const double lambda =
      (1.0 - static_cast<double>(pbar.size()) * half) / excess;
  ClampedDistribution out;
  out.lambda = lambda;
  out.dist.reserve(pbar.size());
  for (double p : pbar) out.dist.push_back(half + lambda * std::max(0.0, p - half));
  return out;
}

// ----------------------------------------------------------------------------
// CouplingSet

CouplingSet::CouplingSet(std::shared_ptr<const MixtureProblem> problem,
                         std::vector<double> outcome_dist)
    : ProjectableSet(Metric::max_norm()),
      problem_(std::move(problem)),
      outcome_dist_(std::move(outcome_dist)) {
  if (!problem_) throw DomainError("coupling set needs a problem");
  if (outcome_dist_.size() != problem_->outcome_count()) {
    throw DomainError("outcome distribution has the wrong length");
  }
  check_distribution(outcome_dist_, "outcome distribution");
}

bool CouplingSet::contains(PointView x, double tol) const {
  if (x.size() != dimension()) return false;
  for (double v : x) {
    if (v < -tol) return false;
  }
  const auto m = problem_->outcome_marginal(x);
  for (std::size_t y = 0; y < m.size(); ++y) {
    if (std::abs(m[y] - outcome_dist_[y]) > tol) return false;
  }
  return true;
}

Point CouplingSet::sample(Rng& rng) const {
  const std::size_t ni = problem_->component_count();
  const std::size_t ny = problem_->outcome_count();
  Point x(dimension());
  for (std::size_t y = 0; y < ny; ++y) {
    const auto split = rng.dirichlet(ni);
    for (std::size_t i = 0; i < ni; ++i) x[i * ny + y] = split[i] * outcome_dist_[y];
  }
  return x;
}

std::optional<Point> CouplingSet::nearest(PointView x) const {
  check_dimension(x, "nearest point");
  const std::size_t ni = problem_->component_count();
  const std::size_t ny = problem_->outcome_count();
  Point out(dimension());
  Point column(ni);
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t i = 0; i < ni; ++i) column[i] = x[i * ny + y];
    const Point fixed = max_norm_nearest_simplex(column, 0.0, outcome_dist_[y]);
    for (std::size_t i = 0; i < ni; ++i) out[i * ny + y] = fixed[i];
  }
  return out;
}

std::optional<double> CouplingSet::directed_hausdorff_to(
    const ProjectableSet& other) const {
  const auto* c = dynamic_cast<const CouplingSet*>(&other);
  if (c == nullptr || c->problem_->component_count() != problem_->component_count() ||
      c->outcome_dist_.size() != outcome_dist_.size()) {
    return std::nullopt;
  }
  // Per outcome column: raising the column mass by g costs g / I (spread
  // evenly); lowering it by g costs g (a column concentrated on one entry).
  const auto ni = static_cast<double>(problem_->component_count());
  double worst = 0.0;
  for (std::size_t y = 0; y < outcome_dist_.size(); ++y) {
    const double gap = c->outcome_dist_[y] - outcome_dist_[y];
    worst = std::max(worst, gap >= 0.0 ? gap / ni : -gap);
  }
  return worst;
}

std::optional<std::pair<Point, Point>> CouplingSet::bounding_box() const {
  const std::size_t ny = problem_->outcome_count();
  Point lo(dimension(), 0.0), hi(dimension());
  for (std::size_t k = 0; k < hi.size(); ++k) hi[k] = outcome_dist_[k % ny];
  return std::pair{lo, hi};
}

std::optional<Point> CouplingSet::project_closed_form(const CostFunction& cost,
                                                      PointView fixed, Side) const {
  if (!is_kl(cost)) return std::nullopt;
  return rescale_columns(fixed, outcome_dist_, problem_->component_count());
}

// ----------------------------------------------------------------------------
// WeightSet

WeightSet::WeightSet(std::shared_ptr<const MixtureProblem> problem)
    : ProjectableSet(Metric::max_norm()), problem_(std::move(problem)) {
  if (!problem_) throw DomainError("weight set needs a problem");
  problem_->validate();
}

bool WeightSet::contains(PointView x, double tol) const {
  if (x.size() != dimension()) return false;
  WeightVector w{problem_->weights_from_joint(x)};
  if (!w.is_valid(problem_->weight_floor, tol)) return false;
  return max_norm_distance(x, problem_->joint_from_weights(w.weights)) <= tol;
}

Point WeightSet::sample(Rng& rng) const {
  const std::size_t ni = problem_->component_count();
  const double room = 1.0 - static_cast<double>(ni) * problem_->weight_floor;
  auto w = rng.dirichlet(ni);
  for (auto& v : w) v = problem_->weight_floor + room * v;
  return problem_->joint_from_weights(w);
}

std::optional<double> WeightSet::directed_hausdorff_to(
    const ProjectableSet& other) const {
  const auto* w = dynamic_cast<const WeightSet*>(&other);
  if (w == nullptr) return std::nullopt;
  const auto& a = *problem_;
  const auto& b = *w->problem_;
  if (a.components == b.components && a.weight_floor == b.weight_floor) return 0.0;
  return std::nullopt;
}

std::vector<Point> WeightSet::net(double h) const {
  auto lattice = simplex_lattice(problem_->component_count(),
                                 problem_->weight_floor, h);
  for (auto& w : lattice) w = problem_->joint_from_weights(w);
  return lattice;
}

double WeightSet::net_radius(double h) const {
  double top = 0.0;
  for (const auto& row : problem_->components) {
    top = std::max(top, *std::max_element(row.begin(), row.end()));
  }
  return h * top;
}

std::optional<Point> WeightSet::project_closed_form(const CostFunction& cost,
                                                    PointView fixed,
                                                    Side side) const {
  if (!is_kl(cost)) return std::nullopt;
  if (side == Side::kSecond) {
    return problem_->joint_from_weights(
        project_onto_weight_set(fixed, *problem_).weights.weights);
  }
  // min_c D(Q(c)||fixed) = sum_i c_i log c_i + c_i g_i for normalized mu_i,
  // g_i = sum_y mu_i log(mu_i / fixed_i), so c_i = max(c0, s e^{-g_i}).
  if (!problem_->normalized_components) return std::nullopt;
  const std::size_t ni = problem_->component_count();
  const std::size_t ny = problem_->outcome_count();
  std::vector<double> g(ni, 0.0);
  for (std::size_t i = 0; i < ni; ++i) {
    for (std::size_t y = 0; y < ny; ++y) {
      const double mu = problem_->components[i][y];
      const double f = fixed[i * ny + y];
      if (!(f > 0.0)) return std::nullopt;
      g[i] += mu * std::log(mu / f);
    }
  }
  const double gmin = *std::min_element(g.begin(), g.end());
  for (auto& v : g) v = std::exp(gmin - v);
  return problem_->joint_from_weights(
      floored_rescale(g, problem_->weight_floor).weights.weights);
}

// ----------------------------------------------------------------------------
// FlooredSimplexSet

FlooredSimplexSet::FlooredSimplexSet(std::size_t dim, double floor)
    : ProjectableSet(Metric::max_norm()), dim_(dim), floor_(floor) {
  if (dim_ == 0) throw DomainError("simplex of dimension 0");
  if (!(floor_ >= 0.0) || static_cast<double>(dim_) * floor_ > 1.0 + 1e-12) {
    throw DomainError("infeasible simplex floor");
  }
}

bool FlooredSimplexSet::contains(PointView x, double tol) const {
  if (x.size() != dim_) return false;
  for (double v : x) {
    if (v < floor_ - tol) return false;
  }
  return std::abs(sum(x) - 1.0) <= tol;
}

Point FlooredSimplexSet::sample(Rng& rng) const {
  const double room = 1.0 - static_cast<double>(dim_) * floor_;
  auto x = rng.dirichlet(dim_);
  for (auto& v : x) v = floor_ + room * v;
  return x;
}

std::optional<Point> FlooredSimplexSet::nearest(PointView x) const {
  check_dimension(x, "nearest point");
  return max_norm_nearest_simplex(x, floor_, 1.0);
}

std::optional<double> FlooredSimplexSet::directed_hausdorff_to(
    const ProjectableSet& other) const {
  const auto* s = dynamic_cast<const FlooredSimplexSet*>(&other);
  if (s == nullptr || s->dim_ != dim_) return std::nullopt;
  // The worst point is a vertex: dim-1 coordinates at this floor must each
  // rise to the other floor, paid for by the single large coordinate.
  if (floor_ >= s->floor_ || dim_ == 1) return 0.0;
  return static_cast<double>(dim_ - 1) * (s->floor_ - floor_);
}

std::optional<std::pair<Point, Point>> FlooredSimplexSet::bounding_box() const {
  const double top = 1.0 - static_cast<double>(dim_ - 1) * floor_;
  return std::pair{Point(dim_, floor_), Point(dim_, top)};
}

std::vector<Point> FlooredSimplexSet::net(double h) const {
  return simplex_lattice(dim_, floor_, h);
}

std::optional<Point> FlooredSimplexSet::project_closed_form(
    const CostFunction& cost, PointView fixed, Side) const {
  if (!is_kl(cost)) return std::nullopt;
  // Both sides reduce to x_i = max(floor, s * fixed_i) with sum 1.
  return floored_rescale(fixed, floor_).weights.weights;
}

// ----------------------------------------------------------------------------
// MeasureSpaceSet

MeasureSpaceSet::MeasureSpaceSet(std::size_t dim, double floor, double cap)
    : ProjectableSet(Metric::max_norm()), dim_(dim), floor_(floor), cap_(cap) {
  if (dim_ == 0) throw DomainError("measure space of dimension 0");
  if (!(floor_ > 0.0) || !(cap_ >= static_cast<double>(dim_) * floor_)) {
    throw DomainError("measure space needs 0 < floor and dim * floor <= cap");
  }
}

bool MeasureSpaceSet::contains(PointView x, double tol) const {
  if (x.size() != dim_) return false;
  for (double v : x) {
    if (v < floor_ - tol) return false;
  }
  return sum(x) <= cap_ + tol;
}

Point MeasureSpaceSet::sample(Rng& rng) const {
  // Uniform on the corner simplex {x >= floor, sum x <= cap}.
  const double room = cap_ - static_cast<double>(dim_) * floor_;
  auto w = rng.dirichlet(dim_ + 1);
  Point x(dim_);
  for (std::size_t j = 0; j < dim_; ++j) x[j] = floor_ + room * w[j];
  return x;
}

std::optional<Point> MeasureSpaceSet::nearest(PointView x) const {
  check_dimension(x, "nearest point");
  auto lower_sum = [&](double r) {
    double s = 0.0;
    for (double v : x) s += std::max(floor_, v - r);
    return s;
  };
  double r = 0.0;
  if (lower_sum(0.0) > cap_) {
    double lo = 0.0;
    double hi = *std::max_element(x.begin(), x.end()) - floor_ + 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (lower_sum(mid) > cap_ ? lo : hi) = mid;
    }
    r = hi;
  }
  Point y(dim_);
  for (std::size_t j = 0; j < dim_; ++j) y[j] = std::max(floor_, x[j] - r);
  return y;
}

std::optional<std::pair<Point, Point>> MeasureSpaceSet::bounding_box() const {
  const double top = cap_ - static_cast<double>(dim_ - 1) * floor_;
  return std::pair{Point(dim_, floor_), Point(dim_, top)};
}

// ----------------------------------------------------------------------------
// Estimation

SetSchedule adaptive_schedule(std::span<const std::size_t> samples,
                              std::shared_ptr<const MixtureProblem> problem,
                              std::size_t batch_size, std::size_t length) {
  if (!problem) throw DomainError("adaptive schedule needs a problem");
  if (batch_size == 0) throw DomainError("batch size must be positive");
  if (length == 0) throw DomainError("schedule length must be positive");
  const std::size_t ny = problem->outcome_count();
  const auto full = empirical_distribution(samples, ny);
  const double mu0 = problem->component_floor;
  SetPtr p_limit =
      std::make_shared<const CouplingSet>(problem, clamp_empirical(full, mu0).dist);
  SetPtr q_set = std::make_shared<const WeightSet>(problem);

  std::vector<SetPtr> p_sets;
  p_sets.reserve(length);
  std::vector<double> counts(ny, 0.0);
  std::size_t seen = 0;
  for (std::size_t n = 0; n < length; ++n) {
    const std::size_t want =
        std::min(samples.size(), std::max<std::size_t>(1, n * batch_size));
    if (want == samples.size()) {
      p_sets.push_back(p_limit);
      continue;
    }
    while (seen < want) counts[samples[seen++]] += 1.0;
    std::vector<double> pbar(counts);
    for (auto& c : pbar) c /= static_cast<double>(seen);
    p_sets.push_back(
        std::make_shared<const CouplingSet>(problem, clamp_empirical(pbar, mu0).dist));
  }
  SetSchedule schedule(std::move(p_sets), std::vector<SetPtr>(length, q_set), p_limit,
                       q_set);
  schedule.set_eps_estimated(true);
  return schedule;
}

MixtureEstimate estimate_mixture_weights(std::span<const double> outcome_dist,
                                         const MixtureProblem& problem,
                                         const StoppingRule& stop) {
  problem.validate();
  auto shared = std::make_shared<const MixtureProblem>(problem);
  auto p_set = std::make_shared<const CouplingSet>(
      shared, std::vector<double>(outcome_dist.begin(), outcome_dist.end()));
  auto q_set = std::make_shared<const WeightSet>(shared);
  const std::vector<double> start(problem.component_count(),
                                  1.0 / static_cast<double>(problem.component_count()));
  const Point q0 = problem.joint_from_weights(start);

  MixtureEstimate out;
  out.trace = run_classical(KlCost(), p_set, q_set, q0, stop);
  out.weights.weights = problem.weights_from_joint(out.trace.last().q);
  return out;
}

MixtureEstimate estimate_mixture_weights(std::span<const std::size_t> samples,
                                         const MixtureProblem& problem,
                                         const StoppingRule& stop,
                                         const EstimationOptions& options) {
  problem.validate();
  const std::size_t ny = problem.outcome_count();
  const auto full = empirical_distribution(samples, ny);
  if (options.mode == EstimationMode::kBatch) {
    return estimate_mixture_weights(full, problem, stop);
  }
  if (stop.max_iter > 10'000'000) {
    throw DomainError("adaptive estimation supports at most 1e7 iterations");
  }

  auto schedule = adaptive_schedule(
      samples, std::make_shared<const MixtureProblem>(problem),
      options.batch_size, stop.max_iter + 1);

  const std::vector<double> start(problem.component_count(),
                                  1.0 / static_cast<double>(problem.component_count()));
  MixtureEstimate out;
  out.trace = run_aam(KlCost(), schedule, problem.joint_from_weights(start), stop);
  out.weights.weights = problem.weights_from_joint(out.trace.last().q);
  return out;
}

double mixture_log_likelihood(std::span<const double> weights,
                              std::span<const double> outcome_dist,
                              const MixtureProblem& problem) {
  const auto m = problem.mixture(weights);
  if (outcome_dist.size() != m.size()) {
    throw DomainError("outcome distribution has the wrong length");
  }
  double ll = 0.0;
  for (std::size_t y = 0; y < m.size(); ++y) {
    if (outcome_dist[y] > 0.0) ll += outcome_dist[y] * std::log(m[y]);
  }
  return ll;
}

double ml_stationarity_residual(std::span<const double> weights,
                                std::span<const double> outcome_dist,
                                const MixtureProblem& problem) {
  const auto m = problem.mixture(weights);
  if (outcome_dist.size() != m.size()) {
    throw DomainError("outcome distribution has the wrong length");
  }
  const std::size_t ni = problem.component_count();
  std::vector<double> grad(ni, 0.0);
  for (std::size_t i = 0; i < ni; ++i) {
    for (std::size_t y = 0; y < m.size(); ++y) {
      if (outcome_dist[y] > 0.0) {
        grad[i] += outcome_dist[y] * problem.components[i][y] / m[y];
      }
    }
  }
  constexpr double kFloorBand = 1e-9;
  double level = 0.0;
  std::size_t free_count = 0;
  for (std::size_t i = 0; i < ni; ++i) {
    if (weights[i] > problem.weight_floor + kFloorBand) {
      level += grad[i];
      ++free_count;
    }
  }
  if (free_count == 0) return 0.0;
  level /= static_cast<double>(free_count);
  double residual = 0.0;
  for (std::size_t i = 0; i < ni; ++i) {
    const bool free = weights[i] > problem.weight_floor + kFloorBand;
    residual = std::max(residual, free ? std::abs(grad[i] - level)
                                       : std::max(0.0, grad[i] - level));
  }
  return residual;
}

// ----------------------------------------------------------------------------
// Portfolio

MixtureProblem portfolio_problem(const ReturnMatrix& returns, double c0) {
  if (returns.empty() || returns.front().empty()) {
    throw DomainError("empty return matrix");
  }
  const std::size_t assets = returns.front().size();
  double top = 0.0;
  double bottom = std::numeric_limits<double>::infinity();
  for (const auto& row : returns) {
    if (row.size() != assets) throw DomainError("ragged return matrix");
    for (double w : row) {
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw DomainError("returns must be strictly positive and finite");
      }
      top = std::max(top, w);
      bottom = std::min(bottom, w);
    }
  }
  if (!(c0 > 0.0) || static_cast<double>(assets) * c0 > 1.0 + 1e-12) {
    throw DomainError("infeasible weight floor for " + std::to_string(assets) +
                      " assets");
  }
  MixtureProblem problem;
  problem.outcomes.reserve(returns.size());
  for (std::size_t l = 0; l < returns.size(); ++l) {
    problem.outcomes.push_back("r" + std::to_string(l));
  }
  problem.components.assign(assets, std::vector<double>(returns.size()));
  for (std::size_t l = 0; l < returns.size(); ++l) {
    for (std::size_t i = 0; i < assets; ++i) {
      problem.components[i][l] = returns[l][i] / top;
    }
  }
  problem.weight_floor = c0;
  problem.component_floor = bottom / top;
  problem.normalized_components = false;
  return problem;
}

PortfolioResult log_optimal_portfolio(const ReturnMatrix& returns, double c0,
                                      const StoppingRule& stop) {
  const auto problem = portfolio_problem(returns, c0);
  const std::vector<double> uniform(returns.size(),
                                    1.0 / static_cast<double>(returns.size()));
  auto est = estimate_mixture_weights(uniform, problem, stop);
  return {std::move(est.weights), std::move(est.trace)};
}

double mean_log_wealth(std::span<const double> weights, const ReturnMatrix& returns) {
  if (returns.empty()) throw DomainError("empty return matrix");
  double total = 0.0;
  for (const auto& row : returns) {
    if (row.size() != weights.size()) throw DomainError("ragged return matrix");
    double wealth = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) wealth += weights[i] * row[i];
    total += std::log(wealth);
  }
  return total / static_cast<double>(returns.size());
}

}  // namespace aamkit::div
