#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>

namespace exem {

/// One step of the SplitMix64 generator; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// FNV-1a hash, used to fold string run coordinates into seeds.
std::uint64_t hash_string(std::string_view s) noexcept;

/// Derives an independent child seed from a root seed and a list of
/// coordinates (partition index, algorithm hash, ...). Stable across
/// platforms.
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> coords) noexcept;

/// Deterministic random source. All draws are computed from raw 64-bit
/// engine output, so sequences do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1).
  double uniform() noexcept;

  /// Uniform integer in [0, n). Requires n > 0.
  std::size_t below(std::size_t n) noexcept;

  /// True with probability p (p clamped to [0, 1]).
  bool bernoulli(double p) noexcept;

  /// Index drawn from the (possibly unnormalized) non-negative weights.
  std::size_t sample(std::span<const double> weights) noexcept;

 private:
  std::mt19937_64 engine_;
};

}  // namespace exem
