#pragma once

#include <string>
#include <vector>

#include "exem/data.hpp"
#include "exem/synth.hpp"

namespace exem::testing {

// Dataset from dense rows; labels are class ids, class names "c0", "c1", ...
inline Dataset dense_dataset(const std::vector<std::vector<double>>& rows, const std::vector<ClassId>& labels) {
  Dataset d;
  d.vocab_size = rows.empty() ? 0 : rows.front().size();
  ClassId max_label = -1;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    d.instances.push_back(SparseVector::from_dense(rows[i]));
    d.labels.push_back(labels[i]);
    d.instance_ids.push_back(std::to_string(i));
    max_label = std::max(max_label, labels[i]);
  }
  for (ClassId c = 0; c <= max_label; ++c) d.class_names.push_back("c" + std::to_string(c));
  return d;
}

// The five-class, disjoint-block corpus used by the discovery checks.
inline Dataset discovery_corpus(std::uint64_t seed = 7, double separation = 1.0) {
  SyntheticSpec s;
  s.num_classes = 5;
  s.instances_per_class = 200;
  s.vocab_size = 50;
  s.separation = separation;
  s.rng_seed = seed;
  return drop_tfidf_degenerate(generate_synthetic(s).data);
}

}  // namespace exem::testing
