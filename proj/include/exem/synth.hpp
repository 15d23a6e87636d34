#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "exem/data.hpp"

namespace exem {

enum class Generator { Multinomial, Hypersphere };

std::string_view to_string(Generator g) noexcept;
/// Accepts "multinomial", "hypersphere". Throws ConfigError.
Generator parse_generator(std::string_view s);

/// Class c owns the vocabulary block [c * B, (c + 1) * B) with
/// B = vocab_size / num_classes. Its profile mixes the uniform distribution
/// over the whole vocabulary with the uniform distribution over its block,
/// with block weight min(1, separation): separation 0 makes every class
/// identical, separation >= 1 gives disjoint supports.
struct SyntheticSpec {
  int num_classes = 3;
  int instances_per_class = 100;
  int vocab_size = 60;
  double separation = 1.0;
  Generator generator = Generator::Multinomial;
  std::uint64_t rng_seed = 0;
  int doc_length = 50;          // tokens per multinomial document
  double noise = 0.5;           // hypersphere perturbation scale, per unit norm
};

struct SyntheticCorpus {
  Dataset data;
  /// Multinomial: P(w | class). Hypersphere: unit mean direction per class.
  std::vector<std::vector<double>> class_profiles;
};

/// Instances are shuffled so classes interleave in index order. Labels are
/// named "c0", "c1", ...
SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

}  // namespace exem
