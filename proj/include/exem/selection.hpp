#pragma once

#include <cstdint>
#include <string_view>

namespace exem {

enum class SelectionCriterion { BIC, AIC, AICc };

std::string_view to_string(SelectionCriterion c) noexcept;
/// Accepts "bic", "aic", "aicc". Throws ConfigError.
SelectionCriterion parse_selection(std::string_view s);

/// Penalized log-likelihood of one model; lower `score` is better.
struct SelectionScore {
  double log_likelihood = 0.0;
  std::int64_t v = 0;  // free parameters
  std::int64_t n = 0;  // data points
  SelectionCriterion criterion = SelectionCriterion::AICc;
  double score = 0.0;
};

/// BIC = -2L + v ln n, AIC = -2L + 2v, AICc = AIC + 2v(v+1)/(n-v-1).
/// Throws DomainError("AICc undefined") when n <= v + 1 and
/// ContractViolation when n < 1 or v < 0.
SelectionScore score_model(double log_likelihood, std::int64_t v, std::int64_t n, SelectionCriterion criterion);

bool aicc_defined(std::int64_t v, std::int64_t n) noexcept;

/// True iff explore scores strictly lower than baseline. Ties keep the
/// baseline. Throws ContractViolation if the criteria or n differ.
bool accept_exploratory(const SelectionScore& explore, const SelectionScore& baseline);

/// Scores both models under `criterion`, switching both to AIC (with a logged
/// warning) when AICc is undefined for either of them.
struct ModelComparison {
  SelectionScore baseline;
  SelectionScore explore;
  bool fell_back_to_aic = false;
  bool accept = false;
};

ModelComparison compare_models(double baseline_ll, std::int64_t baseline_v, double explore_ll,
                               std::int64_t explore_v, std::int64_t n, SelectionCriterion criterion);

}  // namespace exem
