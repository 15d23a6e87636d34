#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "exem/criteria.hpp"
#include "exem/data.hpp"
#include "exem/models.hpp"
#include "exem/selection.hpp"

namespace exem {

struct EngineConfig {
  Family family = Family::KMeans;
  CriterionConfig criterion;
  SelectionCriterion selection = SelectionCriterion::AICc;
  int max_iterations = 15;
  double ll_rel_tolerance = 1e-4;
  int extra_classes = 0;  // semisup_em only
  std::uint64_t rng_seed = 0;
  ModelOptions model;
};

struct RunResult {
  ModelState final_state;
  int iterations_run = 0;
  /// Complete-data log-likelihood after each iteration's M-step.
  std::vector<double> ll_trace;
  /// Penalized score (selection criterion, AIC where AICc is undefined) after
  /// each iteration.
  std::vector<double> score_trace;
  std::vector<int> class_count_trace;
  /// Classes introduced during each iteration's E-step, before model selection.
  std::vector<int> created_trace;
  /// 1-based iteration at which model selection rejected growth.
  std::optional<int> can_add_latched_at;
  double wall_time_s = 0.0;
  std::size_t criterion_evaluations = 0;
  std::size_t criterion_firings = 0;
  std::size_t aic_fallbacks = 0;

  /// Fraction of criterion evaluations that fired (0 when never evaluated).
  double firing_rate() const noexcept;
};

/// Exploratory classification EM. `d` must already be in the family's
/// representation (see featurize / representation_for).
RunResult exploratory_em(const Dataset& d, const SeedPartition& p, const EngineConfig& cfg);

/// Classification EM with k + extra_classes classes; the extra classes are
/// grown from distinct unlabeled instances drawn at random.
RunResult semisup_em(const Dataset& d, const SeedPartition& p, const EngineConfig& cfg);

struct SweepRow {
  int extra_classes = 0;
  double seed_f1 = 0.0;
  std::size_t num_clusters = 0;
  int iterations = 0;
};

struct SweepResult {
  int best_extra_classes = 0;
  double best_f1 = 0.0;
  std::vector<SweepRow> per_m;
};

/// Runs semisup_em for each value and keeps the one with the best seed-class
/// F1 on the unlabeled instances (smaller m on ties). This peeks at test
/// labels and is only an upper bound for the baseline.
SweepResult best_extra_classes_sweep(const Dataset& d, const SeedPartition& p, const EngineConfig& cfg,
                                     const std::vector<int>& m_values);

}  // namespace exem
