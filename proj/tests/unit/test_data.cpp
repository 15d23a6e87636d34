#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "exem/data.hpp"
#include "exem/error.hpp"
#include "exem/rng.hpp"
#include "support.hpp"

using namespace exem;

TEST_CASE("sparse vectors are sorted, merged and zero-free") {
  auto v = SparseVector::from_entries({{5, 1.0}, {2, 3.0}, {5, 2.0}, {7, 0.0}});
  REQUIRE(v.nnz() == 2);
  CHECK(v.entries()[0] == SparseEntry{2, 3.0});
  CHECK(v.entries()[1] == SparseEntry{5, 3.0});
  CHECK(v.extent() == 6);
  CHECK(v.sum() == 6.0);
  CHECK(v.l2_norm() == doctest::Approx(std::sqrt(18.0)));

  auto cancelled = SparseVector::from_entries({{1, 2.0}, {1, -2.0}});
  CHECK(cancelled.empty());

  CHECK_THROWS_AS(SparseVector::from_entries({{0, std::nan("")}}), NumericalError);
}

TEST_CASE("sparse dot products agree with dense arithmetic") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(12), b(12);
    for (std::size_t i = 0; i < 12; ++i) {
      a[i] = rng.uniform() < 0.5 ? 0.0 : rng.uniform();
      b[i] = rng.uniform() < 0.5 ? 0.0 : rng.uniform();
    }
    double expected = 0.0;
    for (std::size_t i = 0; i < 12; ++i) expected += a[i] * b[i];
    const auto sa = SparseVector::from_dense(a);
    const auto sb = SparseVector::from_dense(b);
    CHECK(sa.dot(sb) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(sa.dot(b) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(sa.to_dense(12) == a);
  }
}

TEST_CASE("triplet reader parses labels, counts and missing labels") {
  std::istringstream in("# header comment\nrec.autos 3:2 17:1\n\nsci.space 0:1\n? 4:1\nrec.autos 1:1\n");
  const Dataset d = read_sparse_triplet(in);
  REQUIRE(d.size() == 4);
  CHECK(d.instances[0].nnz() == 2);
  CHECK(d.vocab_size == 18);
  CHECK(d.class_names == std::vector<std::string>{"rec.autos", "sci.space"});
  CHECK(d.labels == std::vector<ClassId>{0, 1, kNoLabel, 0});
  CHECK(d.instance_ids.front() == "2");

  std::ostringstream map;
  write_label_map(map, d);
  CHECK(map.str() == "class_id,label\n0,rec.autos\n1,sci.space\n");
}

TEST_CASE("triplet reader reports errors") {
  std::istringstream empty("");
  CHECK_THROWS_WITH_AS(read_sparse_triplet(empty), doctest::Contains("no instances"), ParseError);

  std::istringstream bad("a 1:1\nb 2-3\n");
  try {
    read_sparse_triplet(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }

  std::istringstream out_of_range("a 9:1\n");
  CHECK_THROWS_AS(read_sparse_triplet(out_of_range, 5), BoundsError);
}

TEST_CASE("triplet round trip preserves the dataset") {
  const Dataset d = testing::dense_dataset({{1, 0, 2.5}, {0, 3, 0}}, {0, 1});
  std::ostringstream out;
  write_sparse_triplet(out, d);
  std::istringstream in(out.str());
  const Dataset back = read_sparse_triplet(in, 3);
  CHECK(back.instances == d.instances);
  CHECK(back.labels == d.labels);
}

TEST_CASE("dense csv reader") {
  std::istringstream in("label,f0,f1\nx,1,0\ny,0,2\n");
  const Dataset d = read_dense_csv(in);
  REQUIRE(d.size() == 2);
  CHECK(d.vocab_size == 2);
  CHECK(d.instances[1].entries()[0] == SparseEntry{1, 2.0});
}

TEST_CASE("tf-idf weighting") {
  SUBCASE("term in one of two docs with tf 2 gets 2 ln 2") {
    const Dataset d = testing::dense_dataset({{2, 1}, {0, 1}}, {0, 0});
    const Dataset w = tfidf_weight(d);
    // Oracle: tf * ln(N / df) with N = 2, df = 1.
    CHECK(w.instances[0].to_dense(2)[0] == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
    // Term 1 appears everywhere and vanishes.
    CHECK(w.instances[0].nnz() == 1);
    CHECK(w.instances[1].empty());
  }
  SUBCASE("single document") {
    const Dataset d = testing::dense_dataset({{3}}, {0});
    CHECK(tfidf_weight(d).instances[0].empty());
  }
}

TEST_CASE("normalization") {
  const auto l1 = normalize(SparseVector::from_dense(std::vector<double>{2, 2}), Norm::L1);
  CHECK(l1.to_dense(2) == std::vector<double>{0.5, 0.5});
  const auto l2 = normalize(SparseVector::from_dense(std::vector<double>{3, 4}), Norm::L2);
  CHECK(l2.to_dense(2)[0] == doctest::Approx(0.6));
  CHECK(l2.to_dense(2)[1] == doctest::Approx(0.8));
  CHECK_THROWS_WITH_AS(normalize(SparseVector{}, Norm::L1), doctest::Contains("degenerate instance"), NumericalError);

  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(6);
    for (double& v : x) v = rng.uniform() + 0.01;
    for (Norm n : {Norm::L1, Norm::L2}) {
      const auto once = normalize(SparseVector::from_dense(x), n);
      const auto twice = normalize(once, n);
      for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(once.to_dense(6)[i] - twice.to_dense(6)[i]) <= 1e-12);
    }
  }
}

TEST_CASE("degenerate tf-idf instances are dropped") {
  // The last instance only holds a term present in every document.
  const Dataset d = testing::dense_dataset({{1, 1, 0}, {0, 1, 1}, {0, 1, 0}}, {0, 1, 1});
  const Dataset kept = drop_tfidf_degenerate(d);
  CHECK(kept.size() == 2);
  CHECK(featurize(kept, Representation::TfidfL1).size() == 2);
}

TEST_CASE("partitions follow the seeding protocol") {
  SyntheticSpec s;
  s.num_classes = 4;
  s.instances_per_class = 200;
  const Dataset d = generate_synthetic(s).data;

  PartitionConfig pc;
  pc.num_seed_classes = 2;
  pc.seeds_fraction = 0.05;
  pc.num_partitions = 10;
  pc.rng_seed = 42;
  const auto parts = make_partitions(d, pc);
  REQUIRE(parts.size() == 10);

  std::set<std::vector<std::size_t>> distinct;
  for (const auto& p : parts) {
    p.validate(d);
    CHECK(p.seeded_class_ids == parts.front().seeded_class_ids);
    CHECK(p.labeled_idx.size() == 2 * 10);  // ceil(0.05 * 200) per seeded class
    CHECK(p.labeled_idx.size() + p.unlabeled_idx.size() == d.size());
    distinct.insert(p.labeled_idx);
  }
  CHECK(distinct.size() == 10);
  CHECK(make_partitions(d, pc) == parts);

  pc.seeds_fraction = 0.001;
  for (const auto& p : make_partitions(d, pc)) CHECK(p.labeled_idx.size() == 2);
}

TEST_CASE("seeded class choice") {
  const Dataset d = testing::dense_dataset({{1}, {1}, {1}, {1}, {1}, {1}}, {0, 1, 1, 2, 2, 2});
  PartitionConfig pc;
  pc.num_seed_classes = 2;
  CHECK(choose_seed_classes(d, pc) == std::vector<ClassId>{1, 2});
  pc.seeded_classes = {0};
  CHECK(choose_seed_classes(d, pc) == std::vector<ClassId>{0});
  pc.seeded_classes = {};
  pc.num_seed_classes = 4;
  CHECK_THROWS_AS(choose_seed_classes(d, pc), ConfigError);

  Dataset with_empty = d;
  with_empty.class_names.push_back("c3");
  pc.seeded_classes = {3};
  CHECK_THROWS_AS(choose_seed_classes(with_empty, pc), ConfigError);
}
