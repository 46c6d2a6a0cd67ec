#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace aamkit {

/// Seeded random source used everywhere in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard <random> distributions are implementation-defined,
/// so all derived variates (uniform doubles, normals, Dirichlet draws,
/// categorical draws) are computed here from raw 64-bit outputs. Given the
/// same seed, every platform produces the same stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);
  /// Standard normal (Box-Muller, no cached spare).
  double normal();
  /// Flat Dirichlet(1, ..., 1) draw of length n.
  std::vector<double> dirichlet(std::size_t n);
  /// Draw an index according to probs (need not be normalized).
  std::size_t categorical(std::span<const double> probs);

 private:
  std::mt19937_64 engine_;
};

}  // namespace aamkit
