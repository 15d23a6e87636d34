#include "exem/selection.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "exem/error.hpp"
#include "exem/log.hpp"

namespace exem {

std::string_view to_string(SelectionCriterion c) noexcept {
  switch (c) {
    case SelectionCriterion::BIC: return "bic";
    case SelectionCriterion::AIC: return "aic";
    case SelectionCriterion::AICc: return "aicc";
  }
  return "?";
}

SelectionCriterion parse_selection(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "bic") return SelectionCriterion::BIC;
  if (lower == "aic") return SelectionCriterion::AIC;
  if (lower == "aicc") return SelectionCriterion::AICc;
  throw ConfigError("unknown model selection criterion '" + std::string(s) + "'");
}

bool aicc_defined(std::int64_t v, std::int64_t n) noexcept { return n > v + 1; }

SelectionScore score_model(double log_likelihood, std::int64_t v, std::int64_t n, SelectionCriterion criterion) {
  if (n < 1) throw ContractViolation("score_model: n must be at least 1");
  if (v < 0) throw ContractViolation("score_model: v must be non-negative");
  SelectionScore s{log_likelihood, v, n, criterion, 0.0};
  const double vd = static_cast<double>(v);
  const double nd = static_cast<double>(n);
  switch (criterion) {
    case SelectionCriterion::BIC:
      s.score = -2.0 * log_likelihood + vd * std::log(nd);
      break;
    case SelectionCriterion::AIC:
      s.score = -2.0 * log_likelihood + 2.0 * vd;
      break;
    case SelectionCriterion::AICc:
      if (!aicc_defined(v, n)) throw DomainError("AICc undefined");
      s.score = -2.0 * log_likelihood + 2.0 * vd + 2.0 * vd * (vd + 1.0) / (nd - vd - 1.0);
      break;
  }
  return s;
}

bool accept_exploratory(const SelectionScore& explore, const SelectionScore& baseline) {
  if (explore.criterion != baseline.criterion) throw ContractViolation("accept_exploratory: criterion mismatch");
  if (explore.n != baseline.n) throw ContractViolation("accept_exploratory: instance count mismatch");
  return explore.score < baseline.score;
}

ModelComparison compare_models(double baseline_ll, std::int64_t baseline_v, double explore_ll,
                               std::int64_t explore_v, std::int64_t n, SelectionCriterion criterion) {
  ModelComparison c;
  if (criterion == SelectionCriterion::AICc && !(aicc_defined(baseline_v, n) && aicc_defined(explore_v, n))) {
    logger()->warn("AICc undefined (n={}, v={}); comparing with AIC", n, std::max(baseline_v, explore_v));
    criterion = SelectionCriterion::AIC;
    c.fell_back_to_aic = true;
  }
  c.baseline = score_model(baseline_ll, baseline_v, n, criterion);
  c.explore = score_model(explore_ll, explore_v, n, criterion);
  c.accept = accept_exploratory(c.explore, c.baseline);
  return c;
}

}  // namespace exem
