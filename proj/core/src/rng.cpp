#include "aamkit/rng.hpp"

#include <cmath>
#include <numbers>

#include "aamkit/error.hpp"

namespace aamkit {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw DomainError("Rng::index needs n > 0");
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return static_cast<std::size_t>(x % bound);
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<double> Rng::dirichlet(std::size_t n) {
  std::vector<double> x(n);
  double total = 0.0;
  for (auto& v : x) {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    v = -std::log(u);
    total += v;
  }
  for (auto& v : x) v /= total;
  return x;
}

std::size_t Rng::categorical(std::span<const double> probs) {
  if (probs.empty()) throw DomainError("categorical draw from empty support");
  double total = 0.0;
  for (double p : probs) total += p;
  const double u = uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  // Rounding can leave u == total; return the last index with mass.
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return i;
  }
  return probs.size() - 1;
}

}  // namespace aamkit
