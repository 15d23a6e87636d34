#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "exem/data.hpp"

namespace exem {

struct ModelState;

/// Counts of produced clusters (rows) against gold classes (columns).
struct ConfusionMatrix {
  std::vector<std::vector<std::int64_t>> counts;
  std::vector<ClassId> row_ids;
  std::vector<ClassId> col_ids;

  std::size_t rows() const noexcept { return row_ids.size(); }
  std::size_t cols() const noexcept { return col_ids.size(); }
  std::int64_t total() const noexcept;
  std::int64_t diagonal_sum() const noexcept;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct ClassPrf {
  ClassId gold_class = kNoLabel;
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t actual = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvaluationReport {
  double macro_f1_seed = 0.0;
  std::vector<ClassPrf> per_class_prf;  // one row per seeded class
  std::size_t num_clusters = 0;
  ConfusionMatrix aligned_confusion;
  double runtime_s = 0.0;
};

/// Each cluster maps to its most frequent gold class; ties go to the lowest
/// gold id. Instances with a kNoLabel gold label are ignored.
std::map<ClassId, ClassId> majority_label_clusters(std::span<const ClassId> clusters, std::span<const ClassId> gold);

/// Per-seeded-class precision/recall/F1 after majority labeling. A class with
/// no predictions or no gold members scores F1 = 0.
std::vector<ClassPrf> seed_class_prf(std::span<const ClassId> clusters, std::span<const ClassId> gold,
                                     std::span<const ClassId> seeded_class_ids);

/// Macro-average F1 over exactly the seeded classes.
double seed_macro_f1(std::span<const ClassId> clusters, std::span<const ClassId> gold,
                     std::span<const ClassId> seeded_class_ids);

/// Rows are the distinct cluster ids, columns the distinct gold ids, both
/// ascending. Instances without a gold label are skipped.
ConfusionMatrix build_confusion(std::span<const ClassId> clusters, std::span<const ClassId> gold);

/// Row -> column assignment of a maximum-weight matching on the zero-padded
/// square matrix (size max(rows, cols)). Among optimal matchings the
/// lexicographically smallest is returned.
std::vector<std::size_t> max_weight_matching(const std::vector<std::vector<std::int64_t>>& weights);

/// Permutes rows (when rows >= cols) or columns (otherwise) so that matched
/// cluster/class pairs sit on the diagonal.
ConfusionMatrix align_confusion(const ConfusionMatrix& cm);

enum class SignificanceDirection { A, B, None };

struct SignificanceResult {
  SignificanceDirection direction = SignificanceDirection::None;
  double p_value = 1.0;
  double t_statistic = 0.0;
  double mean_difference = 0.0;
  /// "▲" at p < 0.05, "△" at p < 0.1 (for the better side), else empty.
  std::string marker;
};

/// Two-sided paired t-test on a[i] - b[i]. With zero variance the p-value is
/// 0 for a nonzero mean difference and 1 otherwise. Throws ContractViolation
/// for mismatched lengths or fewer than two pairs.
SignificanceResult paired_significance(std::span<const double> a, std::span<const double> b, double level = 0.05);

/// Which instances are scored: unlabeled ones by default.
struct EvalOptions {
  bool include_seeds = false;
};

/// Scores a finished run: majority labeling, seed-class F1, aligned confusion.
/// Model class ids are the cluster ids.
EvaluationReport evaluate_run(const Dataset& d, const SeedPartition& p, const ModelState& state,
                              const EvalOptions& options = {});

}  // namespace exem
