#include "exem/crp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "exem/criteria.hpp"
#include "exem/error.hpp"

namespace exem {

std::string_view to_string(CrpPick p) noexcept {
  return p == CrpPick::Standard ? "crp-standard" : "crp-modified";
}

CrpChoice crp_pick(double q, std::span<const double> posterior, double coin_draw, double class_draw) {
  if (coin_draw < q) return {posterior.size(), true};
  double u = class_draw;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < posterior.size(); ++j) {
    if (posterior[j] <= 0.0) continue;
    last_positive = j;
    if (u < posterior[j]) return {j, false};
    u -= posterior[j];
  }
  return {last_positive, false};
}

CrpChoice crp_pick_standard(double p_new, std::span<const double> posterior, Rng& rng) {
  const double coin = rng.uniform();
  const double draw = rng.uniform();
  return crp_pick(p_new, posterior, coin, draw);
}

double mod_crp_new_class_probability(double p_new, std::size_t num_classes, double js_to_uniform) {
  if (!(js_to_uniform > 0.0)) return 1.0;
  return std::clamp(p_new / (static_cast<double>(num_classes) * js_to_uniform), 0.0, 1.0);
}

CrpChoice mod_crp_pick(double p_new, std::span<const double> posterior, Rng& rng) {
  const std::size_t m = posterior.size();
  const std::vector<double> uniform(m, 1.0 / static_cast<double>(m));
  const double q = mod_crp_new_class_probability(p_new, m, js_divergence(uniform, posterior));
  const double coin = rng.uniform();
  const double draw = rng.uniform();
  return crp_pick(q, posterior, coin, draw);
}

RunResult crp_gibbs(const Dataset& d, const SeedPartition& p, const CrpConfig& cfg) {
  if (!(cfg.p_new > 0.0 && cfg.p_new < 1.0)) throw ConfigError("p_new must lie in (0, 1)");
  if (cfg.num_epochs < 1) throw ConfigError("num_epochs must be positive");
  if (cfg.burn_in < 0 || cfg.burn_in >= cfg.num_epochs) throw ConfigError("burn_in must lie in [0, num_epochs)");
  p.validate(d);
  const auto start = std::chrono::steady_clock::now();

  ModelState state = init_from_seeds(d, p, cfg.family, cfg.model);
  const std::size_t k = state.num_classes();
  if (k == 0) throw ConfigError("crp_gibbs needs at least one seeded class");

  Rng rng(cfg.rng_seed);
  for (std::size_t i : p.unlabeled_idx) state.assignments[i] = static_cast<ClassId>(rng.below(k));
  state = m_step(state, d);

  RunResult result;
  for (int epoch = 1; epoch <= cfg.num_epochs; ++epoch) {
    int created = 0;
    for (std::size_t i : p.unlabeled_idx) {
      const SparseVector& x = d.instances[i];
      std::vector<double> post;
      try {
        post = posterior(state, x);
      } catch (const NumericalError& e) {
        throw NumericalError("epoch " + std::to_string(epoch) + ": " + e.what());
      }
      const CrpChoice choice =
          cfg.pick == CrpPick::Standard ? crp_pick_standard(cfg.p_new, post, rng) : mod_crp_pick(cfg.p_new, post, rng);
      if (choice.new_class) {
        state.add_class(init_new_class(x, state.family, state.vocab_size, state.options));
        ++created;
      }
      state.assignments[i] = static_cast<ClassId>(choice.class_id);
      if (cfg.refresh_per_instance) state = m_step(state, d);
    }
    state = m_step(state, d);  // prunes empty introduced classes, refreshes parameters
    result.created_trace.push_back(created);
    result.ll_trace.push_back(data_log_likelihood(state, d));
    result.class_count_trace.push_back(static_cast<int>(state.num_classes()));
    result.iterations_run = epoch;
  }

  result.final_state = std::move(state);
  result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace exem
