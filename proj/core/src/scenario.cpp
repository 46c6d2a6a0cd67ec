#include "aamkit/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "aamkit/diagnostics.hpp"
#include "aamkit/engine.hpp"
#include "aamkit/error.hpp"
#include "aamkit/hilbert.hpp"

namespace aamkit::io {

using json = nlohmann::json;
using Problems = std::vector<std::string>;

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kClassical:
      return "classical";
    case ScenarioKind::kAamDivergence:
      return "aam-divergence";
    case ScenarioKind::kAamHilbert:
      return "aam-hilbert";
    case ScenarioKind::kPortfolio:
      return "portfolio";
  }
  return "unknown";
}

// ----------------------------------------------------------------------------
// Sets

std::size_t SetSpec::dimension() const {
  if (family == "point") return at.size();
  if (family == "finite") return points.empty() ? 0 : points.front().size();
  if (family == "box") return lo.size();
  if (family == "ball") return center.size();
  if (family == "halfspace") return normal.size();
  if (family == "affine") return anchor.size();
  if (family == "simplex") return dim;
  return 0;
}

SetPtr build_set(const SetSpec& spec) {
  std::optional<std::pair<Point, Point>> box;
  if (!spec.lo.empty() || !spec.hi.empty()) box = std::pair{spec.lo, spec.hi};
  if (box && (box->first.size() != box->second.size() ||
              box->first.size() != spec.dimension())) {
    throw DomainError(spec.family + ": sampling box has the wrong dimension");
  }
  if (spec.family == "point") return std::make_shared<PointSet>(spec.at);
  if (spec.family == "finite") return std::make_shared<FiniteSet>(spec.points);
  if (spec.family == "box") return std::make_shared<BoxSet>(spec.lo, spec.hi);
  if (spec.family == "ball") return std::make_shared<BallSet>(spec.center, spec.radius);
  if (spec.family == "halfspace") {
    return std::make_shared<HalfspaceSet>(spec.normal, spec.offset, box);
  }
  if (spec.family == "affine") {
    return std::make_shared<AffineSubspaceSet>(spec.anchor, spec.basis, box);
  }
  if (spec.family == "simplex") {
    return std::make_shared<div::FlooredSimplexSet>(spec.dim, spec.floor);
  }
  throw DomainError("unknown set family '" + spec.family + "'");
}

// ----------------------------------------------------------------------------
// JSON reading

namespace {

template <class T>
std::optional<T> convert(const json& j, const std::string& path, Problems& problems);

template <>
std::optional<double> convert(const json& j, const std::string& path, Problems& problems) {
  if (!j.is_number()) {
    problems.push_back(path + ": expected a number");
    return std::nullopt;
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    problems.push_back(path + ": expected a finite number");
    return std::nullopt;
  }
  return v;
}

static_assert(std::is_same_v<std::size_t, std::uint64_t>);

template <>
std::optional<std::uint64_t> convert(const json& j, const std::string& path,
                                     Problems& problems) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  problems.push_back(path + ": expected a nonnegative integer");
  return std::nullopt;
}

template <>
std::optional<bool> convert(const json& j, const std::string& path, Problems& problems) {
  if (!j.is_boolean()) {
    problems.push_back(path + ": expected true or false");
    return std::nullopt;
  }
  return j.get<bool>();
}

template <>
std::optional<std::string> convert(const json& j, const std::string& path,
                                   Problems& problems) {
  if (!j.is_string()) {
    problems.push_back(path + ": expected a string");
    return std::nullopt;
  }
  return j.get<std::string>();
}

template <class T>
std::optional<std::vector<T>> convert_list(const json& j, const std::string& path,
                                           Problems& problems) {
  if (!j.is_array()) {
    problems.push_back(path + ": expected a list");
    return std::nullopt;
  }
  std::vector<T> out;
  bool ok = true;
  for (std::size_t k = 0; k < j.size(); ++k) {
    auto v = convert<T>(j[k], path + "[" + std::to_string(k) + "]", problems);
    if (v) {
      out.push_back(std::move(*v));
    } else {
      ok = false;
    }
  }
  if (!ok) return std::nullopt;
  return out;
}

template <>
std::optional<std::vector<double>> convert(const json& j, const std::string& path,
                                           Problems& problems) {
  return convert_list<double>(j, path, problems);
}

template <>
std::optional<std::vector<std::string>> convert(const json& j, const std::string& path,
                                                Problems& problems) {
  return convert_list<std::string>(j, path, problems);
}

template <>
std::optional<std::vector<std::vector<double>>> convert(const json& j,
                                                        const std::string& path,
                                                        Problems& problems) {
  return convert_list<std::vector<double>>(j, path, problems);
}

// Field access on one JSON object; remembers which keys were read so the
// leftovers can be reported as unknown.
class Obj {
 public:
  Obj(const json& j, std::string path, Problems& problems)
      : j_(j), path_(std::move(path)), problems_(problems) {
    if (!j_.is_object()) problems_.push_back(path_ + ": expected an object");
  }

  std::string at(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* raw(const std::string& key) {
    known_.insert(key);
    if (!j_.is_object()) return nullptr;
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  bool has(const std::string& key) { return raw(key) != nullptr; }

  template <class T>
  std::optional<T> opt(const std::string& key) {
    const json* v = raw(key);
    if (v == nullptr) return std::nullopt;
    return convert<T>(*v, at(key), problems_);
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    auto v = opt<T>(key);
    return v ? std::move(*v) : std::move(fallback);
  }

  template <class T>
  std::optional<T> req(const std::string& key) {
    if (j_.is_object() && !j_.contains(key)) {
      known_.insert(key);
      problems_.push_back(at(key) + ": required field is missing");
      return std::nullopt;
    }
    return opt<T>(key);
  }

  void finish() {
    if (!j_.is_object()) return;
    for (const auto& [key, value] : j_.items()) {
      if (!known_.count(key)) problems_.push_back(at(key) + ": unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  Problems& problems_;
  std::set<std::string> known_;
};

SetSpec read_set(const json& j, const std::string& path, Problems& problems) {
  Obj o(j, path, problems);
  SetSpec s;
  s.family = o.req<std::string>("family").value_or("");
  if (s.family == "point") {
    s.at = o.req<std::vector<double>>("at").value_or(Point{});
  } else if (s.family == "finite") {
    s.points = o.req<std::vector<Point>>("points").value_or(std::vector<Point>{});
  } else if (s.family == "box") {
    s.lo = o.req<std::vector<double>>("lo").value_or(Point{});
    s.hi = o.req<std::vector<double>>("hi").value_or(Point{});
  } else if (s.family == "ball") {
    s.center = o.req<std::vector<double>>("center").value_or(Point{});
    s.radius = o.req<double>("radius").value_or(0.0);
  } else if (s.family == "halfspace") {
    s.normal = o.req<std::vector<double>>("normal").value_or(Point{});
    s.offset = o.req<double>("offset").value_or(0.0);
    s.lo = o.get<std::vector<double>>("lo", {});
    s.hi = o.get<std::vector<double>>("hi", {});
  } else if (s.family == "affine") {
    s.anchor = o.req<std::vector<double>>("anchor").value_or(Point{});
    s.basis = o.get<std::vector<Point>>("basis", {});
    s.lo = o.get<std::vector<double>>("lo", {});
    s.hi = o.get<std::vector<double>>("hi", {});
  } else if (s.family == "simplex") {
    s.dim = o.req<std::size_t>("dim").value_or(0);
    s.floor = o.get<double>("floor", 0.0);
  } else if (!s.family.empty()) {
    problems.push_back(o.at("family") + ": unknown set family '" + s.family + "'");
  }
  o.finish();
  return s;
}

DriftLaw read_drift(const json& j, const std::string& path, Problems& problems) {
  Obj o(j, path, problems);
  const auto law = o.req<std::string>("law").value_or("constant");
  DriftLaw d;
  if (law == "constant") {
    d = DriftLaw::constant();
  } else if (law == "harmonic") {
    d = DriftLaw::harmonic(o.get<double>("scale", 1.0));
  } else if (law == "geometric") {
    d = DriftLaw::geometric(o.req<double>("ratio").value_or(0.5));
  } else if (law == "custom") {
    d = DriftLaw::custom(o.req<std::vector<double>>("values").value_or(std::vector<double>{}));
  } else {
    problems.push_back(o.at("law") + ": unknown drift law '" + law +
                       "' (constant, harmonic, geometric, custom)");
  }
  o.finish();
  return d;
}

ClassicalSpec read_classical(const json& j, Problems& problems) {
  Obj o(j, "classical", problems);
  ClassicalSpec c;
  c.cost = o.get<std::string>("cost", "squared-euclidean");
  if (const json* v = o.raw("p_set")) {
    c.p_set = read_set(*v, o.at("p_set"), problems);
  } else {
    problems.push_back(o.at("p_set") + ": required field is missing");
  }
  if (const json* v = o.raw("q_set")) {
    c.q_set = read_set(*v, o.at("q_set"), problems);
  } else {
    problems.push_back(o.at("q_set") + ": required field is missing");
  }
  c.q0 = o.req<std::vector<double>>("q0").value_or(Point{});
  o.finish();
  return c;
}

HilbertSpec read_hilbert(const json& j, Problems& problems) {
  Obj o(j, "hilbert", problems);
  HilbertSpec h;
  h.weights = o.req<std::vector<double>>("weights").value_or(std::vector<double>{});
  h.block_dim = o.req<std::size_t>("block_dim").value_or(0);
  if (const json* v = o.raw("blocks")) {
    if (v->is_array()) {
      for (std::size_t k = 0; k < v->size(); ++k) {
        h.blocks.push_back(
            read_set((*v)[k], o.at("blocks") + "[" + std::to_string(k) + "]", problems));
      }
    } else {
      problems.push_back(o.at("blocks") + ": expected a list");
    }
  } else {
    problems.push_back(o.at("blocks") + ": required field is missing");
  }
  h.directions = o.get<std::vector<Point>>("directions", {});
  if (const json* v = o.raw("drift")) h.drift = read_drift(*v, o.at("drift"), problems);
  h.q0 = o.opt<std::vector<double>>("q0");
  o.finish();
  return h;
}

DivergenceSpec read_divergence(const json& j, Problems& problems) {
  Obj o(j, "divergence", problems);
  DivergenceSpec d;
  d.outcomes = o.req<std::vector<std::string>>("outcomes").value_or(std::vector<std::string>{});
  d.components =
      o.req<std::vector<std::vector<double>>>("components").value_or(std::vector<std::vector<double>>{});
  d.c0 = o.req<double>("c0").value_or(0.0);
  d.mu0 = o.opt<double>("mu0");
  d.true_weights = o.opt<std::vector<double>>("true_weights");
  d.sample_count = o.get<std::size_t>("sample_count", 0);
  d.samples = o.opt<std::vector<std::string>>("samples");
  d.marginal = o.opt<std::vector<double>>("marginal");
  d.marginal_direction = o.get<std::vector<double>>("marginal_direction", {});
  if (const json* v = o.raw("drift")) d.drift = read_drift(*v, o.at("drift"), problems);
  const auto mode = o.get<std::string>("mode", "batch");
  if (mode == "batch") {
    d.mode = div::EstimationMode::kBatch;
  } else if (mode == "adaptive") {
    d.mode = div::EstimationMode::kAdaptive;
  } else {
    problems.push_back(o.at("mode") + ": expected 'batch' or 'adaptive'");
  }
  d.batch_size = o.get<std::size_t>("batch_size", 1);
  o.finish();
  return d;
}

PortfolioSpec read_portfolio(const json& j, Problems& problems) {
  Obj o(j, "portfolio", problems);
  PortfolioSpec p;
  p.returns = o.req<std::vector<std::vector<double>>>("returns").value_or(div::ReturnMatrix{});
  p.c0 = o.req<double>("c0").value_or(0.0);
  o.finish();
  return p;
}

std::string default_name(const std::string& source) {
  auto name = source;
  const auto slash = name.find_last_of("/\\");
  if (slash != std::string::npos) name = name.substr(slash + 1);
  const auto dot = name.find('.');
  if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  if (name.empty() || name.front() == '<') name = "scenario";
  return name;
}

}  // namespace

div::MixtureProblem DivergenceSpec::problem() const {
  div::MixtureProblem p;
  p.outcomes = outcomes;
  p.components = components;
  p.weight_floor = c0;
  if (mu0) {
    p.component_floor = *mu0;
  } else {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& row : components) {
      for (double x : row) m = std::min(m, x);
    }
    p.component_floor = std::isfinite(m) ? m : 0.0;
  }
  return p;
}

std::uint64_t ScenarioConfig::hash() const {
  std::string text = canonical;
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, stop.tol);
  text += "|seed=" + std::to_string(seed) + "|max_iter=" + std::to_string(stop.max_iter) +
          "|tol=" + std::string(buf, res.ptr) + "|window=" + std::to_string(stop.window) +
          "|trace=" + output.trace_path + "|summary=" + output.summary_path;
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError({source + ": " + e.what()});
  }

  Problems problems;
  ScenarioConfig config;
  Obj root(doc, "", problems);
  const auto schema = root.req<std::string>("schema");
  if (schema && *schema != kScenarioSchema) {
    problems.push_back("schema: expected '" + std::string(kScenarioSchema) + "', found '" +
                       *schema + "'");
  }
  config.name = root.get<std::string>("name", default_name(source));
  const auto kind = root.req<std::string>("kind").value_or("");
  const std::vector<std::pair<std::string, ScenarioKind>> kinds = {
      {"classical", ScenarioKind::kClassical},
      {"aam-divergence", ScenarioKind::kAamDivergence},
      {"aam-hilbert", ScenarioKind::kAamHilbert},
      {"portfolio", ScenarioKind::kPortfolio}};
  bool kind_ok = false;
  for (const auto& [label, k] : kinds) {
    if (kind == label) {
      config.kind = k;
      kind_ok = true;
    }
  }
  if (!kind_ok && !kind.empty()) {
    problems.push_back("kind: unknown kind '" + kind +
                       "' (classical, aam-divergence, aam-hilbert, portfolio)");
  }
  if (auto seed = root.req<std::uint64_t>("seed")) config.seed = *seed;

  if (const json* s = root.raw("stop")) {
    Obj o(*s, "stop", problems);
    config.stop.max_iter = o.get<std::size_t>("max_iter", config.stop.max_iter);
    config.stop.tol = o.get<double>("tol", config.stop.tol);
    config.stop.window = o.get<std::size_t>("window", config.stop.window);
    o.finish();
  }
  config.oracle = root.get<bool>("oracle", false);
  config.modulus_samples = root.get<std::size_t>("modulus_samples", config.modulus_samples);

  config.output.trace_path = config.name + ".trace.tsv";
  config.output.summary_path = config.name + ".summary.txt";
  if (const json* s = root.raw("output")) {
    Obj o(*s, "output", problems);
    config.output.trace_path = o.get<std::string>("trace", config.output.trace_path);
    config.output.summary_path = o.get<std::string>("summary", config.output.summary_path);
    o.finish();
  }

  const std::vector<std::pair<std::string, ScenarioKind>> sections = {
      {"classical", ScenarioKind::kClassical},
      {"divergence", ScenarioKind::kAamDivergence},
      {"hilbert", ScenarioKind::kAamHilbert},
      {"portfolio", ScenarioKind::kPortfolio}};
  for (const auto& [section, k] : sections) {
    const json* v = root.raw(section);
    if (v == nullptr) {
      if (kind_ok && k == config.kind) {
        problems.push_back(section + ": required for kind '" + kind + "'");
      }
      continue;
    }
    if (kind_ok && k != config.kind) {
      problems.push_back(section + ": section does not match kind '" + kind + "'");
      continue;
    }
    switch (k) {
      case ScenarioKind::kClassical:
        config.classical = read_classical(*v, problems);
        break;
      case ScenarioKind::kAamDivergence:
        config.divergence = read_divergence(*v, problems);
        break;
      case ScenarioKind::kAamHilbert:
        config.hilbert = read_hilbert(*v, problems);
        break;
      case ScenarioKind::kPortfolio:
        config.portfolio = read_portfolio(*v, problems);
        break;
    }
  }
  root.finish();
  config.canonical = doc.dump();

  if (problems.empty()) {
    auto semantic = validate(config);
    problems.insert(problems.end(), semantic.begin(), semantic.end());
  }
  if (!problems.empty()) {
    for (auto& p : problems) p = source + ": " + p;
    throw ConfigError(std::move(problems));
  }
  return config;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read scenario file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), path);
}

// ----------------------------------------------------------------------------
// Validation

namespace {

void check_drift(const DriftLaw& d, const std::string& path, std::size_t max_iter,
                 Problems& problems) {
  switch (d.kind) {
    case DriftLaw::Kind::kConstant:
      break;
    case DriftLaw::Kind::kHarmonic:
      if (!(d.rate > 0.0)) problems.push_back(path + ".scale: must be positive");
      break;
    case DriftLaw::Kind::kGeometric:
      if (!(d.rate > 0.0 && d.rate < 1.0)) {
        problems.push_back(path + ".ratio: must lie in (0, 1)");
      }
      break;
    case DriftLaw::Kind::kCustom:
      if (d.values.size() < max_iter + 1) {
        problems.push_back(path + ".values: custom drift list has " +
                           std::to_string(d.values.size()) + " values but max_iter " +
                           std::to_string(max_iter) + " needs " +
                           std::to_string(max_iter + 1));
      }
      for (double v : d.values) {
        if (!(v >= 0.0)) {
          problems.push_back(path + ".values: drift values must be nonnegative");
          break;
        }
      }
      break;
  }
}

std::optional<SetPtr> try_build(const SetSpec& spec, const std::string& path,
                                Problems& problems) {
  try {
    return build_set(spec);
  } catch (const Error& e) {
    problems.push_back(path + ": " + e.what());
    return std::nullopt;
  }
}

bool is_distribution(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) {
    if (!(x >= 0.0)) return false;
    s += x;
  }
  return std::abs(s - 1.0) <= 1e-9;
}

void validate_classical(const ClassicalSpec& c, Problems& problems) {
  if (c.cost != "squared-euclidean" && c.cost != "kl") {
    problems.push_back("classical.cost: expected 'squared-euclidean' or 'kl'");
    return;
  }
  auto p = try_build(c.p_set, "classical.p_set", problems);
  auto q = try_build(c.q_set, "classical.q_set", problems);
  if (!p || !q) return;
  const bool kl = c.cost == "kl";
  for (const auto& [spec, label] : {std::pair{&c.p_set, "p_set"}, std::pair{&c.q_set, "q_set"}}) {
    const std::string path = std::string("classical.") + label;
    if (!kl) {
      if (spec->family == "simplex") {
        problems.push_back(path + ": simplex sets need the kl cost");
      }
      continue;
    }
    if (spec->family == "point" || spec->family == "finite") {
      const auto pts = spec->family == "point" ? std::vector<Point>{spec->at} : spec->points;
      for (const auto& pt : pts) {
        if (!is_distribution(pt) || *std::min_element(pt.begin(), pt.end()) <= 0.0) {
          problems.push_back(path + ": kl points must be distributions with positive entries");
          break;
        }
      }
    } else if (spec->family != "simplex") {
      problems.push_back(path + ": the kl cost needs simplex, point or finite sets");
    }
  }
  if ((*p)->dimension() != (*q)->dimension()) {
    problems.push_back("classical: p_set has dimension " + std::to_string((*p)->dimension()) +
                       ", q_set has dimension " + std::to_string((*q)->dimension()));
    return;
  }
  if (c.q0.size() != (*q)->dimension()) {
    problems.push_back("classical.q0: has dimension " + std::to_string(c.q0.size()) +
                       ", q_set has dimension " + std::to_string((*q)->dimension()));
  } else if (!(*q)->contains(c.q0, 1e-9)) {
    problems.push_back("classical.q0: not in q_set");
  }
}

void validate_hilbert(const HilbertSpec& h, std::size_t max_iter, Problems& problems) {
  if (h.block_dim == 0) problems.push_back("hilbert.block_dim: must be at least 1");
  if (h.weights.empty()) problems.push_back("hilbert.weights: at least one block is required");
  double total = 0.0;
  for (double w : h.weights) {
    if (!(w > 0.0)) {
      problems.push_back("hilbert.weights: weights must be positive");
      break;
    }
    total += w;
  }
  if (!h.weights.empty() && std::abs(total - 1.0) > 1e-9) {
    problems.push_back("hilbert.weights: weights must sum to 1");
  }
  if (h.blocks.size() != h.weights.size()) {
    problems.push_back("hilbert.blocks: " + std::to_string(h.blocks.size()) +
                       " block sets for " + std::to_string(h.weights.size()) + " weights");
  }
  std::vector<SetPtr> built;
  for (std::size_t i = 0; i < h.blocks.size(); ++i) {
    const auto path = "hilbert.blocks[" + std::to_string(i) + "]";
    auto s = try_build(h.blocks[i], path, problems);
    if (!s) continue;
    if ((*s)->dimension() != h.block_dim) {
      problems.push_back(path + ": dimension " + std::to_string((*s)->dimension()) +
                         " differs from block_dim " + std::to_string(h.block_dim));
    } else if ((*s)->metric().kind() != Metric::Kind::kEuclidean) {
      problems.push_back(path + ": block sets must be Euclidean families");
    } else if (!(*s)->bounding_box()) {
      problems.push_back(path + ": unbounded block sets need a sampling box (lo, hi)");
    } else {
      built.push_back(*s);
    }
  }
  if (!h.directions.empty()) {
    if (h.directions.size() != h.weights.size()) {
      problems.push_back("hilbert.directions: one direction per block is required");
    }
    bool nonzero = false;
    for (const auto& d : h.directions) {
      if (d.size() != h.block_dim) {
        problems.push_back("hilbert.directions: each direction needs block_dim entries");
        break;
      }
      for (double v : d) nonzero = nonzero || v != 0.0;
    }
    if (!nonzero) problems.push_back("hilbert.directions: all directions are zero");
  }
  check_drift(h.drift, "hilbert.drift", max_iter, problems);
  if (h.q0 && problems.empty() && built.size() == h.blocks.size()) {
    if (h.q0->size() != h.block_dim * h.weights.size()) {
      problems.push_back("hilbert.q0: expected " +
                         std::to_string(h.block_dim * h.weights.size()) + " entries");
    } else {
      // Q_0 of the schedule; with a drift law it is the limit moved by eps_0.
      try {
        const hilbert::WeightedProductSpace space(h.block_dim, h.weights);
        const auto sched = hilbert::make_translation_schedule(built, h.directions, h.drift,
                                                              1, space);
        const hilbert::ProductSet q_first(sched.steps.front(), space);
        if (!q_first.contains(*h.q0, 1e-9)) {
          problems.push_back("hilbert.q0: not in the first product set");
        }
      } catch (const Error& e) {
        problems.push_back(std::string("hilbert: ") + e.what());
      }
    }
  }
}

void validate_divergence(const DivergenceSpec& d, std::size_t max_iter, Problems& problems) {
  const auto problem = d.problem();
  try {
    problem.validate();
  } catch (const DomainError& e) {
    problems.push_back(std::string("divergence: ") + e.what());
    return;
  }
  const std::size_t ni = problem.component_count();
  const std::size_t ny = problem.outcome_count();
  const int sources = static_cast<int>(d.true_weights.has_value()) +
                      static_cast<int>(d.samples.has_value()) +
                      static_cast<int>(d.marginal.has_value());
  if (sources != 1) {
    problems.push_back(
        "divergence: give exactly one of true_weights (with sample_count), samples, "
        "or marginal");
  }
  if (d.true_weights) {
    const div::WeightVector w{*d.true_weights};
    if (w.weights.size() != ni || !w.is_valid(problem.weight_floor)) {
      problems.push_back("divergence.true_weights: need " + std::to_string(ni) +
                         " weights, each >= c0, summing to 1");
    }
    if (d.sample_count == 0) {
      problems.push_back("divergence.sample_count: must be at least 1");
    }
  } else if (d.sample_count != 0) {
    problems.push_back("divergence.sample_count: only used with true_weights");
  }
  if (d.samples) {
    if (d.samples->empty()) problems.push_back("divergence.samples: must not be empty");
    for (const auto& s : *d.samples) {
      if (std::find(d.outcomes.begin(), d.outcomes.end(), s) == d.outcomes.end()) {
        problems.push_back("divergence.samples: symbol '" + s + "' is not an outcome");
        break;
      }
    }
  }
  if (d.marginal) {
    if (d.marginal->size() != ny || !is_distribution(*d.marginal)) {
      problems.push_back("divergence.marginal: need a distribution over the " +
                         std::to_string(ny) + " outcomes");
    }
    if (d.mode != div::EstimationMode::kBatch) {
      problems.push_back("divergence.mode: adaptive mode needs a sample source");
    }
    if (d.drift.kind != DriftLaw::Kind::kConstant) {
      double s = 0.0, top = 0.0;
      for (double v : d.marginal_direction) {
        s += v;
        top = std::max(top, std::abs(v));
      }
      if (d.marginal_direction.size() != ny) {
        problems.push_back("divergence.marginal_direction: need " + std::to_string(ny) +
                           " entries");
      } else if (!(top > 0.0) || std::abs(s) > 1e-9 * std::max(1.0, top)) {
        problems.push_back("divergence.marginal_direction: must be nonzero and sum to 0");
      }
    }
  } else {
    if (d.drift.kind != DriftLaw::Kind::kConstant) {
      problems.push_back("divergence.drift: only used with an explicit marginal");
    }
    if (!d.marginal_direction.empty()) {
      problems.push_back("divergence.marginal_direction: only used with a marginal");
    }
  }
  if (d.batch_size == 0) problems.push_back("divergence.batch_size: must be at least 1");
  check_drift(d.drift, "divergence.drift", max_iter, problems);
}

void validate_portfolio(const PortfolioSpec& p, Problems& problems) {
  try {
    div::portfolio_problem(p.returns, p.c0);
  } catch (const DomainError& e) {
    problems.push_back(std::string("portfolio: ") + e.what());
  }
}

}  // namespace

std::vector<std::string> validate(const ScenarioConfig& config) {
  Problems problems;
  if (config.stop.max_iter == 0) problems.emplace_back("stop.max_iter: must be at least 1");
  if (config.stop.max_iter > 10'000'000) {
    problems.emplace_back("stop.max_iter: at most 10000000 iterations are supported");
  }
  if (!(config.stop.tol > 0.0)) problems.emplace_back("stop.tol: must be positive");
  if (config.stop.window == 0) problems.emplace_back("stop.window: must be at least 1");
  if (config.modulus_samples == 0) problems.emplace_back("modulus_samples: must be at least 1");
  if (config.output.trace_path.empty()) problems.emplace_back("output.trace: must not be empty");
  switch (config.kind) {
    case ScenarioKind::kClassical:
      if (config.classical) validate_classical(*config.classical, problems);
      break;
    case ScenarioKind::kAamHilbert:
      if (config.hilbert) validate_hilbert(*config.hilbert, config.stop.max_iter, problems);
      break;
    case ScenarioKind::kAamDivergence:
      if (config.divergence) {
        validate_divergence(*config.divergence, config.stop.max_iter, problems);
      }
      break;
    case ScenarioKind::kPortfolio:
      if (config.portfolio) validate_portfolio(*config.portfolio, problems);
      break;
  }
  return problems;
}

// ----------------------------------------------------------------------------
// Overrides

Overrides environment_overrides() {
  Overrides env;
  if (const char* seed = std::getenv("AAMKIT_SEED"); seed != nullptr && *seed != '\0') {
    std::uint64_t v = 0;
    const std::string s(seed);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw ConfigError({"AAMKIT_SEED: expected a nonnegative integer, found '" + s + "'"});
    }
    env.seed = v;
  }
  if (const char* out = std::getenv("AAMKIT_OUT"); out != nullptr && *out != '\0') {
    env.out = out;
  }
  return env;
}

void apply_overrides(ScenarioConfig& config, const Overrides& env, const Overrides& flags) {
  for (const Overrides* o : {&env, &flags}) {
    if (o->seed) config.seed = *o->seed;
    if (o->max_iter) config.stop.max_iter = *o->max_iter;
    if (o->tol) config.stop.tol = *o->tol;
    if (o->out) {
      std::string dir = *o->out;
      if (!dir.empty() && dir.back() != '/') dir += '/';
      config.output.trace_path = dir + config.name + ".trace.tsv";
      config.output.summary_path = dir + config.name + ".summary.txt";
    }
  }
  auto problems = validate(config);
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

// ----------------------------------------------------------------------------
// Data generation

std::vector<std::size_t> generate_mixture_samples(const div::MixtureProblem& problem,
                                                  std::span<const double> true_weights,
                                                  std::size_t n, std::uint64_t seed) {
  const div::WeightVector w{{true_weights.begin(), true_weights.end()}};
  if (w.weights.size() != problem.component_count() ||
      !w.is_valid(problem.weight_floor)) {
    throw DomainError("true weights must be >= c0 and sum to 1");
  }
  Rng rng(seed);
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = rng.categorical(w.weights);
    out.push_back(rng.categorical(problem.components[i]));
  }
  return out;
}

// ----------------------------------------------------------------------------
// Building and running

namespace {

struct Built {
  std::shared_ptr<const CostFunction> cost;
  std::shared_ptr<SetSchedule> schedule;
  Point q0;
  bool fixed_sets = false;
  std::shared_ptr<const div::MixtureProblem> problem;
  std::optional<hilbert::WeightedProductSpace> space;
  SetPtr modulus_domain;
};

std::shared_ptr<SetSchedule> constant_schedule(SetPtr p, SetPtr q, std::size_t max_iter) {
  return std::make_shared<SetSchedule>(SetSchedule::constant(std::move(p), std::move(q),
                                                             max_iter + 1));
}

SetPtr euclidean_domain(const std::vector<SetPtr>& sets) {
  Point lo, hi;
  for (const auto& s : sets) {
    auto box = s->bounding_box();
    if (!box) {
      throw DomainError(s->family() + " set has no bounding box for the modulus domain");
    }
    if (lo.empty()) {
      lo = box->first;
      hi = box->second;
      continue;
    }
    for (std::size_t j = 0; j < lo.size(); ++j) {
      lo[j] = std::min(lo[j], box->first[j]);
      hi[j] = std::max(hi[j], box->second[j]);
    }
  }
  return std::make_shared<BoxSet>(lo, hi);
}

Built build(const ScenarioConfig& config) {
  Built b;
  const std::size_t max_iter = config.stop.max_iter;
  switch (config.kind) {
    case ScenarioKind::kClassical: {
      const auto& c = *config.classical;
      auto p = build_set(c.p_set);
      auto q = build_set(c.q_set);
      b.fixed_sets = true;
      b.q0 = c.q0;
      b.schedule = constant_schedule(p, q, max_iter);
      if (c.cost == "kl") {
        b.cost = std::make_shared<div::KlCost>();
        const std::size_t dim = p->dimension();
        double floor = 1.0;
        for (const auto* spec : {&c.p_set, &c.q_set}) {
          if (spec->family == "simplex") floor = std::min(floor, spec->floor);
          for (const auto& pt : spec->family == "point" ? std::vector<Point>{spec->at}
                                                        : spec->points) {
            floor = std::min(floor, *std::min_element(pt.begin(), pt.end()));
          }
        }
        b.modulus_domain = std::make_shared<div::MeasureSpaceSet>(
            dim, floor > 0.0 ? floor : 1e-3 / static_cast<double>(dim), 1.0);
      } else {
        b.cost = std::make_shared<SquaredDistanceCost>();
        b.modulus_domain = euclidean_domain({p, q});
      }
      break;
    }
    case ScenarioKind::kAamHilbert: {
      const auto& h = *config.hilbert;
      hilbert::WeightedProductSpace space(h.block_dim, h.weights);
      std::vector<SetPtr> limit;
      for (const auto& s : h.blocks) limit.push_back(build_set(s));
      const auto blocks =
          hilbert::make_translation_schedule(limit, h.directions, h.drift, max_iter + 1, space);
      b.schedule = std::make_shared<SetSchedule>(hilbert::make_set_schedule(blocks, space));
      b.q0 = h.q0 ? *h.q0 : hilbert::default_start(blocks, space);
      b.cost = std::make_shared<SquaredDistanceCost>(space.metric());
      const auto [lo, hi] = hilbert::compact_region(blocks);
      std::vector<SetPtr> region(space.block_count, std::make_shared<BoxSet>(lo, hi));
      b.modulus_domain = std::make_shared<hilbert::ProductSet>(region, space);
      b.fixed_sets = h.drift.kind == DriftLaw::Kind::kConstant;
      b.space = std::move(space);
      break;
    }
    case ScenarioKind::kAamDivergence: {
      const auto& d = *config.divergence;
      auto problem = std::make_shared<const div::MixtureProblem>(d.problem());
      b.problem = problem;
      b.cost = std::make_shared<div::KlCost>();
      const std::vector<double> uniform(problem->component_count(),
                                        1.0 / static_cast<double>(problem->component_count()));
      b.q0 = problem->joint_from_weights(uniform);
      b.modulus_domain = std::make_shared<div::MeasureSpaceSet>(
          problem->joint_size(), problem->measure_floor(), 1.0);
      SetPtr q_set = std::make_shared<const div::WeightSet>(problem);

      if (d.marginal) {
        SetPtr p_limit = std::make_shared<const div::CouplingSet>(problem, *d.marginal);
        Point v = d.marginal_direction;
        double cap = 0.0;
        if (d.drift.kind != DriftLaw::Kind::kConstant) {
          double top = 0.0;
          for (double x : v) top = std::max(top, std::abs(x));
          for (auto& x : v) x /= top;
          cap = std::numeric_limits<double>::infinity();
          for (std::size_t y = 0; y < v.size(); ++y) {
            if (v[y] < 0.0) cap = std::min(cap, (*d.marginal)[y] / -v[y]);
          }
        }
        std::vector<SetPtr> p_sets;
        p_sets.reserve(max_iter + 1);
        for (std::size_t n = 0; n <= max_iter; ++n) {
          const double e = std::min(d.drift.at(n), cap);
          if (!(e > 0.0)) {
            p_sets.push_back(p_limit);
            continue;
          }
          std::vector<double> pbar(*d.marginal);
          for (std::size_t y = 0; y < pbar.size(); ++y) pbar[y] = std::max(0.0, pbar[y] + e * v[y]);
          p_sets.push_back(std::make_shared<const div::CouplingSet>(problem, std::move(pbar)));
        }
        b.schedule = std::make_shared<SetSchedule>(
            std::move(p_sets), std::vector<SetPtr>(max_iter + 1, q_set), p_limit, q_set);
        b.fixed_sets = d.drift.kind == DriftLaw::Kind::kConstant;
        break;
      }

      std::vector<std::size_t> samples;
      if (d.true_weights) {
        samples = generate_mixture_samples(*problem, *d.true_weights, d.sample_count,
                                           config.seed);
      } else {
        for (const auto& s : *d.samples) {
          samples.push_back(static_cast<std::size_t>(
              std::find(d.outcomes.begin(), d.outcomes.end(), s) - d.outcomes.begin()));
        }
      }
      if (d.mode == div::EstimationMode::kAdaptive) {
        b.schedule = std::make_shared<SetSchedule>(
            div::adaptive_schedule(samples, problem, d.batch_size, max_iter + 1));
      } else {
        SetPtr p_set = std::make_shared<const div::CouplingSet>(
            problem, div::empirical_distribution(samples, problem->outcome_count()));
        b.schedule = constant_schedule(p_set, q_set, max_iter);
        b.fixed_sets = true;
      }
      break;
    }
    case ScenarioKind::kPortfolio: {
      const auto& p = *config.portfolio;
      auto problem =
          std::make_shared<const div::MixtureProblem>(div::portfolio_problem(p.returns, p.c0));
      b.problem = problem;
      b.cost = std::make_shared<div::KlCost>();
      const std::vector<double> uniform_rows(p.returns.size(),
                                             1.0 / static_cast<double>(p.returns.size()));
      SetPtr p_set = std::make_shared<const div::CouplingSet>(problem, uniform_rows);
      SetPtr q_set = std::make_shared<const div::WeightSet>(problem);
      b.schedule = constant_schedule(p_set, q_set, max_iter);
      b.fixed_sets = true;
      const std::vector<double> uniform(problem->component_count(),
                                        1.0 / static_cast<double>(problem->component_count()));
      b.q0 = problem->joint_from_weights(uniform);
      b.modulus_domain = std::make_shared<div::MeasureSpaceSet>(
          problem->joint_size(), problem->measure_floor(), 1.0);
      break;
    }
  }
  return b;
}

OracleMinimizer solve_limit(const Built& b, std::uint64_t seed) {
  const auto& q_limit = b.schedule->q_limit();
  Point start = b.q0;
  if (!q_limit.contains(start, 1e-9)) {
    if (auto near = q_limit.nearest(start)) {
      start = std::move(*near);
    } else {
      Rng rng(seed);
      start = q_limit.sample(rng);
    }
  }
  const StoppingRule tight{100'000, 1e-14, 5};
  const auto trace = run_classical(*b.cost, b.schedule->p_limit_ptr(),
                                   b.schedule->q_limit_ptr(), start, tight);
  return {trace.last().p, trace.last().q};
}

}  // namespace

OracleMinimizer limit_oracle(const ScenarioConfig& config) {
  return solve_limit(build(config), config.seed);
}

ConditionSetup condition_setup(const ScenarioConfig& config) {
  const auto b = build(config);
  const auto& s = *b.schedule;
  const std::size_t one = std::min<std::size_t>(1, s.size() - 1);
  return {b.cost, s.p_ptr(one), s.q_ptr(0), s.q_ptr(one)};
}

ModulusSetup modulus_setup(const ScenarioConfig& config) {
  const auto b = build(config);
  return {b.cost, b.modulus_domain};
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  auto b = build(config);
  ScenarioResult result;
  std::optional<OracleMinimizer> oracle;
  if (config.oracle) {
    oracle = solve_limit(b, config.seed);
    b.schedule->set_oracle(*oracle);
    result.oracle_value = (*b.cost)(oracle->p, oracle->q);
  }

  result.trace = run_aam(*b.cost, *b.schedule, b.q0, config.stop);
  if (b.fixed_sets) result.trace.eps_available = false;

  if (result.trace.records.size() >= 2) {
    const ModulusEstimator omega(*b.cost, *b.modulus_domain, config.modulus_samples,
                                 config.seed);
    const Modulus w = [&omega](double t) { return omega(t); };
    annotate_drift(result.trace, drift_inequality_check(result.trace, w));
    if (oracle) attach_proof_sequences(result.trace, w);
  }

  result.metric_note =
      "drift and lemma checks use a sampled modulus of continuity (a lower bound), so "
      "they are necessary-condition checks";
  if (result.trace.eps_estimated) {
    result.metric_note += "; eps is estimated against the full-sample limit";
  }
  if (b.problem) result.weights = b.problem->weights_from_joint(result.trace.last().q);
  if (b.space) {
    const auto blk = b.space->block(result.trace.last().p, 0);
    result.filter_point.assign(blk.begin(), blk.end());
  }
  return result;
}

std::string format_summary(const ScenarioConfig& config, const ScenarioResult& result) {
  std::ostringstream out;
  out.precision(17);
  const auto& t = result.trace;
  out << "scenario: " << config.name << '\n'
      << "kind: " << to_string(config.kind) << '\n'
      << "seed: " << config.seed << '\n'
      << "status: " << to_string(t.status) << '\n'
      << "iterations: " << t.iterations() << '\n'
      << "final_cost: " << result.final_cost() << '\n'
      << "liminf_estimate: " << t.liminf_estimate << '\n'
      << "limit_candidates: " << t.limit_candidates.size() << '\n';
  if (result.oracle_value) {
    out << "oracle_value: " << *result.oracle_value << '\n'
        << "oracle_gap: " << std::abs(result.final_cost() - *result.oracle_value) << '\n';
  }
  auto list = [&out](const char* label, const std::vector<double>& v) {
    out << label << ':';
    for (double x : v) out << ' ' << x;
    out << '\n';
  };
  if (!result.weights.empty()) list("weights", result.weights);
  if (!result.filter_point.empty()) list("filter_point", result.filter_point);
  std::size_t checked = 0, failed = 0;
  for (const auto& r : t.records) {
    if (!r.drift_ok) continue;
    ++checked;
    if (!*r.drift_ok) ++failed;
  }
  out << "drift_check: " << failed << " failures in " << checked << " steps\n"
      << "eps: " << (t.eps_available ? (t.eps_estimated ? "estimated" : "exact") : "not applicable")
      << '\n'
      << "note: " << result.metric_note << '\n';
  return out.str();
}

}  // namespace aamkit::io
