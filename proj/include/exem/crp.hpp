#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "exem/engine.hpp"

namespace exem {

enum class CrpPick { Standard, Modified };

std::string_view to_string(CrpPick p) noexcept;

struct CrpConfig {
  double p_new = 1e-4;
  int num_epochs = 50;
  CrpPick pick = CrpPick::Standard;
  Family family = Family::KMeans;
  std::uint64_t rng_seed = 0;
  int burn_in = 0;  // diagnostics only; the last epoch's labels are the output
  /// Re-estimate parameters after every instance instead of once per epoch.
  bool refresh_per_instance = false;
  ModelOptions model;
};

struct CrpChoice {
  std::size_t class_id = 0;
  bool new_class = false;

  friend bool operator==(const CrpChoice&, const CrpChoice&) = default;
};

/// Coin with bias `q`, then (on tails) a draw from the posterior. Both
/// uniforms are always consumed so that pick rules sharing a stream stay in
/// step. A new class gets id posterior.size().
CrpChoice crp_pick(double q, std::span<const double> posterior, double coin_draw, double class_draw);

/// New class with probability p_new, otherwise a posterior draw.
CrpChoice crp_pick_standard(double p_new, std::span<const double> posterior, Rng& rng);

/// q = p_new / (m * d) with d = JS(uniform, posterior), clamped to [0, 1];
/// d = 0 gives q = 1.
double mod_crp_new_class_probability(double p_new, std::size_t num_classes, double js_to_uniform);

/// Like crp_pick_standard with the coin bias scaled by the posterior's
/// divergence from uniform.
CrpChoice mod_crp_pick(double p_new, std::span<const double> posterior, Rng& rng);

/// Seeded Gibbs sampler with CRP class creation. Unlabeled instances start in
/// uniformly drawn seeded classes; parameters are refreshed once per epoch
/// and empty introduced classes are pruned at epoch end. `d` must be in the
/// family's representation.
RunResult crp_gibbs(const Dataset& d, const SeedPartition& p, const CrpConfig& cfg);

}  // namespace exem
