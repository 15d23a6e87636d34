#include "exem/criteria.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "exem/error.hpp"

namespace exem {

std::string_view to_string(CriterionKind k) noexcept {
  switch (k) {
    case CriterionKind::MinMax: return "minmax";
    case CriterionKind::JS: return "js";
    case CriterionKind::Random: return "random";
  }
  return "?";
}

CriterionKind parse_criterion(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "minmax") return CriterionKind::MinMax;
  if (lower == "js") return CriterionKind::JS;
  if (lower == "random") return CriterionKind::Random;
  throw ConfigError("unknown criterion '" + std::string(s) + "'");
}

namespace {

void require_distribution(std::span<const double> p, const char* name) {
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ContractViolation(std::string(name) + " has a negative or non-finite entry");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ContractViolation(std::string(name) + " does not sum to 1");
}

}  // namespace

double js_divergence(std::span<const double> p, std::span<const double> q, LogBase base) {
  if (p.size() != q.size()) throw ContractViolation("js_divergence: length mismatch");
  require_distribution(p, "p");
  require_distribution(q, "q");
  double kl_p = 0.0;
  double kl_q = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) kl_p += p[i] * std::log(p[i] / a);
    if (q[i] > 0.0) kl_q += q[i] * std::log(q[i] / a);
  }
  const double js = std::max(0.0, 0.5 * (kl_p + kl_q));
  return base == LogBase::Natural ? js : js / std::numbers::ln2;
}

bool js_criterion(std::span<const double> p, LogBase base) {
  const std::size_t k = p.size();
  if (k == 0) throw ContractViolation("js_criterion on an empty distribution");
  const std::vector<double> uniform(k, 1.0 / static_cast<double>(k));
  return js_divergence(uniform, p, base) < 1.0 / static_cast<double>(k);
}

bool minmax_criterion(std::span<const double> p) {
  if (p.empty()) throw ContractViolation("minmax_criterion on an empty distribution");
  const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
  if (!(*lo > 0.0)) return false;
  return *hi / *lo < 2.0;
}

bool random_criterion(double rate, Rng& rng) { return rng.bernoulli(rate); }

NewClassCriterion::NewClassCriterion(const CriterionConfig& config) : config_(config), rng_(config.rng_seed) {
  if (config.kind == CriterionKind::Random && !(config.random_rate >= 0.0 && config.random_rate <= 1.0)) {
    throw ConfigError("random_rate must lie in [0, 1]");
  }
}

bool NewClassCriterion::fires(std::span<const double> posterior) {
  switch (config_.kind) {
    case CriterionKind::MinMax: return minmax_criterion(posterior);
    case CriterionKind::JS: return js_criterion(posterior, config_.js_log_base);
    case CriterionKind::Random: return random_criterion(config_.random_rate, rng_);
  }
  return false;
}

}  // namespace exem
