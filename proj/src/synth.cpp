#include "exem/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "exem/error.hpp"
#include "exem/rng.hpp"

namespace exem {

std::string_view to_string(Generator g) noexcept {
  return g == Generator::Multinomial ? "multinomial" : "hypersphere";
}

Generator parse_generator(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "multinomial") return Generator::Multinomial;
  if (lower == "hypersphere") return Generator::Hypersphere;
  throw ConfigError("unknown generator '" + std::string(s) + "'");
}

namespace {

double gaussian(Rng& rng) {
  // Box-Muller; 1 - u keeps the logarithm finite.
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::vector<double>> class_mixtures(const SyntheticSpec& spec) {
  const auto vocab = static_cast<std::size_t>(spec.vocab_size);
  const auto block = vocab / static_cast<std::size_t>(spec.num_classes);
  const double w = std::min(1.0, spec.separation);
  std::vector<std::vector<double>> out;
  for (int c = 0; c < spec.num_classes; ++c) {
    std::vector<double> profile(vocab, (1.0 - w) / static_cast<double>(vocab));
    const std::size_t lo = static_cast<std::size_t>(c) * block;
    for (std::size_t t = lo; t < lo + block; ++t) profile[t] += w / static_cast<double>(block);
    out.push_back(std::move(profile));
  }
  return out;
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  if (spec.num_classes < 1 || spec.instances_per_class < 1 || spec.vocab_size < 1 || spec.doc_length < 1) {
    throw ConfigError("synthetic spec sizes must be positive");
  }
  if (spec.vocab_size < spec.num_classes) throw ConfigError("vocab_size must be at least num_classes");
  if (!(spec.separation >= 0.0)) throw ConfigError("separation must be non-negative");

  Rng rng(spec.rng_seed);
  const auto vocab = static_cast<std::size_t>(spec.vocab_size);
  SyntheticCorpus corpus;
  auto profiles = class_mixtures(spec);

  if (spec.generator == Generator::Hypersphere) {
    for (auto& p : profiles) {
      double norm = 0.0;
      for (double v : p) norm += v * v;
      norm = std::sqrt(norm);
      for (double& v : p) v /= norm;
    }
  }

  std::vector<std::pair<SparseVector, ClassId>> items;
  for (int c = 0; c < spec.num_classes; ++c) {
    const auto& profile = profiles[static_cast<std::size_t>(c)];
    for (int n = 0; n < spec.instances_per_class; ++n) {
      std::vector<double> x(vocab, 0.0);
      if (spec.generator == Generator::Multinomial) {
        for (int t = 0; t < spec.doc_length; ++t) x[rng.sample(profile)] += 1.0;
      } else {
        const double scale = spec.noise / std::sqrt(static_cast<double>(vocab));
        double norm = 0.0;
        for (std::size_t t = 0; t < vocab; ++t) {
          x[t] = std::max(0.0, profile[t] + scale * gaussian(rng));
          norm += x[t] * x[t];
        }
        if (norm == 0.0) {
          x = profile;
        } else {
          for (double& v : x) v /= std::sqrt(norm);
        }
      }
      items.emplace_back(SparseVector::from_dense(x), c);
    }
  }

  for (std::size_t j = items.size(); j > 1; --j) std::swap(items[j - 1], items[rng.below(j)]);

  Dataset& d = corpus.data;
  d.vocab_size = vocab;
  for (int c = 0; c < spec.num_classes; ++c) d.class_names.push_back("c" + std::to_string(c));
  for (std::size_t i = 0; i < items.size(); ++i) {
    d.instances.push_back(std::move(items[i].first));
    d.labels.push_back(items[i].second);
    d.instance_ids.push_back("s" + std::to_string(i));
  }
  corpus.class_profiles = std::move(profiles);
  return corpus;
}

}  // namespace exem
