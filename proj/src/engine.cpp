#include "exem/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "exem/error.hpp"
#include "exem/eval.hpp"
#include "exem/log.hpp"
#include "exem/rng.hpp"

namespace exem {

double RunResult::firing_rate() const noexcept {
  return criterion_evaluations == 0
             ? 0.0
             : static_cast<double>(criterion_firings) / static_cast<double>(criterion_evaluations);
}

namespace {

// Penalized score used for convergence tracking. Falls back to AIC where AICc
// has no value.
double penalized_score(double ll, std::int64_t v, std::int64_t n, SelectionCriterion criterion) {
  if (criterion == SelectionCriterion::AICc && !aicc_defined(v, n)) criterion = SelectionCriterion::AIC;
  return score_model(ll, v, n, criterion).score;
}

void assign_argmax(ModelState& state, const Dataset& d, std::size_t i) {
  const auto post = posterior(state, d.instances[i]);
  state.assignments[i] = static_cast<ClassId>(argmax(post));
}

void validate_config(const EngineConfig& cfg) {
  if (cfg.max_iterations < 1) throw ConfigError("max_iterations must be positive");
  if (!(cfg.ll_rel_tolerance > 0.0)) throw ConfigError("ll_rel_tolerance must be positive");
  if (cfg.extra_classes < 0) throw ConfigError("extra_classes must be non-negative");
}

// Shared classification-EM loop. With `explore` set, the E-step may introduce
// classes through the criterion, gated by penalized-likelihood model
// selection; otherwise it is plain semi-supervised classification EM.
RunResult run_em(const Dataset& d, const SeedPartition& p, const EngineConfig& cfg, ModelState state, bool explore) {
  const auto start = std::chrono::steady_clock::now();
  const auto n = static_cast<std::int64_t>(d.size());
  RunResult result;
  NewClassCriterion criterion(cfg.criterion);

  for (std::size_t i : p.unlabeled_idx) {
    if (state.num_classes() > 0) assign_argmax(state, d, i);
  }
  double prev_score = penalized_score(data_log_likelihood(state, d), free_parameter_count(state), n, cfg.selection);
  std::size_t prev_m = state.num_classes();
  bool can_add = explore;

  for (int t = 1; t <= cfg.max_iterations; ++t) {
    try {
      const std::size_t m_old = state.num_classes();
      const double baseline_ll = data_log_likelihood(state, d);

      int created = 0;
      for (std::size_t i : p.unlabeled_idx) {
        const SparseVector& x = d.instances[i];
        if (state.num_classes() == 0) {
          // Nothing to compare against yet: the first point opens a class.
          state.add_class(init_new_class(x, state.family, state.vocab_size, state.options));
          state.assignments[i] = static_cast<ClassId>(state.num_classes() - 1);
          ++created;
          continue;
        }
        const auto post = posterior(state, x);
        if (can_add) {
          ++result.criterion_evaluations;
          if (criterion.fires(post)) {
            ++result.criterion_firings;
            state.add_class(init_new_class(x, state.family, state.vocab_size, state.options));
            state.assignments[i] = static_cast<ClassId>(state.num_classes() - 1);
            ++created;
            continue;
          }
        }
        state.assignments[i] = static_cast<ClassId>(argmax(post));
      }
      result.created_trace.push_back(created);

      if (created > 0 && m_old > 0) {
        // The grown model is scored with mixing weights matching its own
        // assignments; the baseline's weights already match its assignments.
        const auto saved_counts = state.prior_counts;
        std::fill(state.prior_counts.begin(), state.prior_counts.end(), 0.0);
        for (ClassId y : state.assignments) {
          if (y != kNoLabel) state.prior_counts[static_cast<std::size_t>(y)] += 1.0;
        }
        const double explore_ll = data_log_likelihood(state, d);
        state.prior_counts = saved_counts;
        const auto cmp = compare_models(baseline_ll, free_parameter_count(state.family, m_old, state.vocab_size),
                                        explore_ll, free_parameter_count(state), n, cfg.selection);
        result.aic_fallbacks += cmp.fell_back_to_aic;
        if (!cmp.accept) {
          state.params.resize(m_old);
          state.seeded.resize(m_old);
          state.prior_counts.resize(m_old);
          for (std::size_t i : p.unlabeled_idx) {
            if (static_cast<std::size_t>(state.assignments[i]) >= m_old) assign_argmax(state, d, i);
          }
          can_add = false;
          result.can_add_latched_at = t;
        }
      }

      state = m_step(state, d);
      const double ll = data_log_likelihood(state, d);
      const double score = penalized_score(ll, free_parameter_count(state), n, cfg.selection);
      result.ll_trace.push_back(ll);
      result.score_trace.push_back(score);
      result.class_count_trace.push_back(static_cast<int>(state.num_classes()));
      result.iterations_run = t;

      const double rel = std::abs(score - prev_score) / std::max(std::abs(prev_score), std::numeric_limits<double>::min());
      const bool converged = rel < cfg.ll_rel_tolerance && state.num_classes() == prev_m;
      prev_score = score;
      prev_m = state.num_classes();
      if (converged) break;
    } catch (const NumericalError& e) {
      throw NumericalError("iteration " + std::to_string(t) + ": " + e.what());
    }
  }

  result.final_state = std::move(state);
  result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

RunResult exploratory_em(const Dataset& d, const SeedPartition& p, const EngineConfig& cfg) {
  validate_config(cfg);
  if (cfg.extra_classes != 0) throw ConfigError("exploratory_em requires extra_classes = 0");
  p.validate(d);
  return run_em(d, p, cfg, init_from_seeds(d, p, cfg.family, cfg.model), /*explore=*/true);
}

RunResult semisup_em(const Dataset& d, const SeedPartition& p, const EngineConfig& cfg) {
  validate_config(cfg);
  p.validate(d);
  const auto extra = static_cast<std::size_t>(cfg.extra_classes);
  if (extra > p.unlabeled_idx.size()) throw ConfigError("extra_classes exceeds the number of unlabeled instances");
  ModelState state = init_from_seeds(d, p, cfg.family, cfg.model);
  if (extra > 0) {
    Rng rng(derive_seed(cfg.rng_seed, {hash_string("semisup-extra")}));
    std::vector<std::size_t> pool = p.unlabeled_idx;
    for (std::size_t j = 0; j < extra; ++j) {
      std::swap(pool[j], pool[j + rng.below(pool.size() - j)]);
      state.add_class(init_new_class(d.instances[pool[j]], cfg.family, state.vocab_size, cfg.model));
    }
  }
  if (state.num_classes() == 0) throw ConfigError("semisup_em needs at least one seeded or extra class");
  return run_em(d, p, cfg, std::move(state), /*explore=*/false);
}

SweepResult best_extra_classes_sweep(const Dataset& d, const SeedPartition& p, const EngineConfig& cfg,
                                     const std::vector<int>& m_values) {
  if (m_values.empty()) throw ConfigError("m_values must not be empty");
  SweepResult out;
  bool have_best = false;
  for (int m : m_values) {
    EngineConfig run_cfg = cfg;
    run_cfg.extra_classes = m;
    const RunResult run = semisup_em(d, p, run_cfg);
    const EvaluationReport report = evaluate_run(d, p, run.final_state);
    out.per_m.push_back({m, report.macro_f1_seed, report.num_clusters, run.iterations_run});
    const bool better = !have_best || report.macro_f1_seed > out.best_f1 ||
                        (report.macro_f1_seed == out.best_f1 && m < out.best_extra_classes);
    if (better) {
      out.best_extra_classes = m;
      out.best_f1 = report.macro_f1_seed;
      have_best = true;
    }
  }
  return out;
}

}  // namespace exem
