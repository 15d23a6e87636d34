#include <cmath>
#include <set>

#include "doctest.h"
#include "exem/error.hpp"
#include "exem/rng.hpp"
#include "exem/synth.hpp"

using namespace exem;

TEST_CASE("fnv-1a reference hashes") {
  CHECK(hash_string("") == 0xcbf29ce484222325ULL);
  CHECK(hash_string("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("derived seeds are stable and distinct") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  std::set<std::uint64_t> seen;
  for (std::uint64_t root = 0; root < 20; ++root)
    for (std::uint64_t a = 0; a < 20; ++a) seen.insert(derive_seed(root, {a}));
  CHECK(seen.size() == 400);
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
}

TEST_CASE("rng draws stay in range") {
  Rng rng(42);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(rng.below(7) < 7);
  }
  const std::vector<double> w{0.0, 3.0, 0.0, 1.0};
  int ones = 0;
  for (int i = 0; i < 20000; ++i) {
    const std::size_t k = rng.sample(w);
    CHECK((k == 1 || k == 3));
    ones += k == 1;
  }
  CHECK(std::abs(ones / 20000.0 - 0.75) < 0.02);
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
}

namespace {

// Accuracy of the Bayes classifier that knows the true class profiles.
double bayes_accuracy(const SyntheticCorpus& c) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < c.data.size(); ++i) {
    std::size_t best = 0;
    double best_score = -INFINITY;
    for (std::size_t k = 0; k < c.class_profiles.size(); ++k) {
      double s = 0.0;
      for (const SparseEntry& e : c.data.instances[i].entries()) {
        const double p = c.class_profiles[k][e.id];
        s += p > 0.0 ? e.weight * std::log(p) : -INFINITY;
      }
      if (s > best_score) {
        best_score = s;
        best = k;
      }
    }
    correct += static_cast<ClassId>(best) == c.data.labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(c.data.size());
}

}  // namespace

TEST_CASE("synthetic corpus shape") {
  SyntheticSpec s;
  s.num_classes = 4;
  s.instances_per_class = 30;
  s.vocab_size = 40;
  const auto c = generate_synthetic(s);
  CHECK(c.data.size() == 120);
  CHECK(c.data.vocab_size == 40);
  CHECK(c.data.class_names == std::vector<std::string>{"c0", "c1", "c2", "c3"});
  CHECK(c.class_profiles.size() == 4);
  std::vector<int> per(4, 0);
  for (ClassId y : c.data.labels) ++per[static_cast<std::size_t>(y)];
  for (int n : per) CHECK(n == 30);
  for (const auto& x : c.data.instances) {
    CHECK(x.sum() == 50.0);
  }
  CHECK(generate_synthetic(s).data.labels == c.data.labels);
}

TEST_CASE("separation controls class overlap") {
  SyntheticSpec s;
  s.num_classes = 2;
  s.instances_per_class = 500;
  s.vocab_size = 40;
  s.separation = 0.0;
  CHECK(std::abs(bayes_accuracy(generate_synthetic(s)) - 0.5) <= 0.05);
  s.separation = 1.0;
  s.num_classes = 5;
  s.instances_per_class = 100;
  CHECK(bayes_accuracy(generate_synthetic(s)) == 1.0);
}

TEST_CASE("hypersphere generator gives unit-length directions") {
  SyntheticSpec s;
  s.generator = Generator::Hypersphere;
  s.num_classes = 3;
  s.instances_per_class = 20;
  const auto c = generate_synthetic(s);
  CHECK(c.data.size() == 60);
  for (const auto& mu : c.class_profiles) {
    double sq = 0.0;
    for (double v : mu) sq += v * v;
    CHECK(sq == doctest::Approx(1.0));
  }
}

TEST_CASE("synthetic spec validation") {
  SyntheticSpec s;
  s.num_classes = 0;
  CHECK_THROWS_AS(generate_synthetic(s), ConfigError);
  s.num_classes = 10;
  s.vocab_size = 5;
  CHECK_THROWS_AS(generate_synthetic(s), ConfigError);
  CHECK(parse_generator("hypersphere") == Generator::Hypersphere);
  CHECK_THROWS_AS(parse_generator("gaussian"), ConfigError);
}
