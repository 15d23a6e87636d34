#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "exem/sparse.hpp"

namespace exem {

using ClassId = int;
inline constexpr ClassId kNoLabel = -1;

/// Label token that marks an instance without a gold label in sparse-triplet
/// and dense-csv files.
inline constexpr const char* kMissingLabelToken = "?";

/// Instances, optional gold labels and the label-string dictionary.
/// Treated as immutable once built.
struct Dataset {
  std::vector<SparseVector> instances;
  std::vector<ClassId> labels;            // kNoLabel when absent
  std::vector<std::string> class_names;   // class id -> label string
  std::vector<std::string> instance_ids;
  std::size_t vocab_size = 0;

  std::size_t size() const noexcept { return instances.size(); }
  std::size_t num_classes() const noexcept { return class_names.size(); }

  /// Number of gold-labeled instances per class id.
  std::vector<std::size_t> class_sizes() const;

  /// Throws ContractViolation if the invariants do not hold.
  void validate() const;
};

enum class InputFormat { SparseTriplet, DenseCsv };
enum class Norm { L1, L2 };

/// Feature representation consumed by a model family.
enum class Representation {
  RawCounts,  // term counts as read
  TfidfL1,    // tf-idf, L1-normalized
  TfidfL2,    // tf-idf, L2-normalized
};

/// Reads `<label> <fid>:<count> ...` lines. Blank lines and lines starting
/// with '#' are skipped. When `vocab_size` is given every id must be below it,
/// otherwise the vocabulary is one past the largest id seen.
Dataset read_sparse_triplet(std::istream& in, std::optional<std::size_t> vocab_size = {});

/// Reads `label,c0,c1,...` rows. A first row whose second field is not
/// numeric is treated as a header.
Dataset read_dense_csv(std::istream& in);

Dataset load_dataset(const std::filesystem::path& path, InputFormat format,
                     std::optional<std::size_t> vocab_size = {});

void write_sparse_triplet(std::ostream& out, const Dataset& d);

/// Two-column CSV `class_id,label` with a header row.
void write_label_map(std::ostream& out, const Dataset& d);

/// weight(t, doc) = tf(t, doc) * ln(N / df(t)). Terms present in every
/// instance get weight 0 and disappear from the sparse pattern.
Dataset tfidf_weight(const Dataset& d);

/// Throws NumericalError("degenerate instance") on an all-zero vector.
SparseVector normalize(const SparseVector& x, Norm norm);

/// Drops instances whose tf-idf vector is all zero (logged as a warning),
/// so that every representation of the returned corpus has the same
/// instance indices.
Dataset drop_tfidf_degenerate(const Dataset& d);

/// Projects a raw-count corpus into `rep`. The corpus must already be free of
/// tf-idf-degenerate instances for the tf-idf representations.
Dataset featurize(const Dataset& counts, Representation rep);

/// Labeled/unlabeled split for one experiment run.
struct SeedPartition {
  std::vector<ClassId> seeded_class_ids;   // sorted
  std::vector<std::size_t> labeled_idx;    // sorted
  std::vector<std::size_t> unlabeled_idx;  // sorted
  std::uint64_t rng_seed = 0;

  /// Throws ContractViolation if the partition does not cover `d` exactly
  /// or a labeled instance lies outside the seeded classes.
  void validate(const Dataset& d) const;

  friend bool operator==(const SeedPartition&, const SeedPartition&) = default;
};

struct PartitionConfig {
  int num_seed_classes = 0;
  double seeds_fraction = 0.05;
  int num_partitions = 10;
  std::uint64_t rng_seed = 0;
  /// Explicit seeded classes; empty selects the `num_seed_classes` largest
  /// classes (ties broken by lower class id).
  std::vector<ClassId> seeded_classes;
};

/// The seeded classes a PartitionConfig resolves to on `d`.
std::vector<ClassId> choose_seed_classes(const Dataset& d, const PartitionConfig& cfg);

/// For each seeded class, ceil(seeds_fraction * class size) (at least 1)
/// randomly chosen members are labeled; everything else is unlabeled.
std::vector<SeedPartition> make_partitions(const Dataset& d, const PartitionConfig& cfg);

/// Partition with every seeded-class instance labeled (no unlabeled data
/// from those classes), useful for supervised reductions.
SeedPartition supervised_partition(const Dataset& d, std::vector<ClassId> seeded_classes);

}  // namespace exem
