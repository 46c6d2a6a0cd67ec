#include "aamkit/schedule.hpp"

#include <cmath>
#include <limits>

#include "aamkit/error.hpp"
#include "aamkit/hausdorff.hpp"

namespace aamkit {

double DriftLaw::at(std::size_t n) const {
  switch (kind) {
    case Kind::kConstant:
      return 0.0;
    case Kind::kHarmonic:
      return rate / static_cast<double>(std::max<std::size_t>(n, 1));
    case Kind::kGeometric:
      return std::pow(rate, static_cast<double>(n));
    case Kind::kCustom:
      if (n >= values.size()) {
        throw DomainError("custom drift list has " +
                          std::to_string(values.size()) +
                          " entries, step " + std::to_string(n) +
                          " requested");
      }
      return values[n];
  }
  return 0.0;
}

std::size_t DriftLaw::max_length() const {
  if (kind == Kind::kCustom) return values.size();
  return std::numeric_limits<std::size_t>::max();
}

std::string DriftLaw::name() const {
  switch (kind) {
    case Kind::kConstant:
      return "constant";
    case Kind::kHarmonic:
      return "harmonic";
    case Kind::kGeometric:
      return "geometric";
    case Kind::kCustom:
      return "custom";
  }
  return "unknown";
}

SetSchedule::SetSchedule(std::vector<SetPtr> p_sets,
                         std::vector<SetPtr> q_sets, SetPtr p_limit,
                         SetPtr q_limit)
    : p_sets_(std::move(p_sets)),
      q_sets_(std::move(q_sets)),
      p_limit_(std::move(p_limit)),
      q_limit_(std::move(q_limit)) {
  if (p_sets_.size() != q_sets_.size()) {
    throw DomainError("schedule has " + std::to_string(p_sets_.size()) +
                      " P-sets but " + std::to_string(q_sets_.size()) +
                      " Q-sets");
  }
  if (p_sets_.empty()) throw DomainError("schedule is empty");
  if (!p_limit_ || !q_limit_) throw DomainError("schedule limits are missing");
  for (std::size_t n = 0; n < p_sets_.size(); ++n) {
    if (!p_sets_[n] || !q_sets_[n]) {
      throw DomainError("schedule step " + std::to_string(n) + " is missing a set");
    }
  }
  eps_cache_.resize(p_sets_.size());
}

SetSchedule SetSchedule::constant(SetPtr p, SetPtr q, std::size_t length) {
  std::vector<SetPtr> ps(length, p);
  std::vector<SetPtr> qs(length, q);
  return SetSchedule(std::move(ps), std::move(qs), p, q);
}

double SetSchedule::set_distance(const SetPtr& a, const SetPtr& b) const {
  if (a == b) return 0.0;
  HausdorffOptions opts;
  opts.resolution = hausdorff_resolution_;
  return hausdorff(*a, *b, opts).value;
}

double SetSchedule::eps(std::size_t n) const {
  auto& slot = eps_cache_.at(n);
  if (!slot) {
    slot = set_distance(p_sets_[n], p_limit_) + set_distance(q_sets_[n], q_limit_);
  }
  return *slot;
}

}  // namespace aamkit
