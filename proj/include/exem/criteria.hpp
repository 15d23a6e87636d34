#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "exem/rng.hpp"

namespace exem {

enum class CriterionKind { MinMax, JS, Random };

std::string_view to_string(CriterionKind k) noexcept;
/// Accepts "minmax", "js", "random". Throws ConfigError.
CriterionKind parse_criterion(std::string_view s);

enum class LogBase { Natural, Two };

struct CriterionConfig {
  CriterionKind kind = CriterionKind::MinMax;
  double random_rate = 0.0;  // RANDOM only
  std::uint64_t rng_seed = 0;
  LogBase js_log_base = LogBase::Natural;
};

/// Jensen-Shannon divergence 0.5 * (KL(p||a) + KL(q||a)), a = (p + q) / 2.
/// Terms with a zero numerator contribute 0. Throws ContractViolation on a
/// length mismatch or an argument that is not a distribution (1e-9).
double js_divergence(std::span<const double> p, std::span<const double> q, LogBase base = LogBase::Natural);

/// True iff JS(uniform, p) < 1/k' where k' = p.size() is the live class count.
bool js_criterion(std::span<const double> p, LogBase base = LogBase::Natural);

/// True iff max(p) / min(p) < 2. A zero minimum never fires.
bool minmax_criterion(std::span<const double> p);

/// True with probability `rate`, consuming one uniform draw.
bool random_criterion(double rate, Rng& rng);

/// The "nearly uniform" predicate of one engine run. Owns the random state
/// used by the RANDOM kind.
class NewClassCriterion {
 public:
  explicit NewClassCriterion(const CriterionConfig& config);

  bool fires(std::span<const double> posterior);

  const CriterionConfig& config() const noexcept { return config_; }

 private:
  CriterionConfig config_;
  Rng rng_;
};

}  // namespace exem
