#include "exem/eval.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include <boost/math/distributions/students_t.hpp>

#include "exem/error.hpp"
#include "exem/models.hpp"

namespace exem {

std::int64_t ConfusionMatrix::total() const noexcept {
  std::int64_t s = 0;
  for (const auto& row : counts) {
    for (auto c : row) s += c;
  }
  return s;
}

std::int64_t ConfusionMatrix::diagonal_sum() const noexcept {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < std::min(rows(), cols()); ++i) s += counts[i][i];
  return s;
}

std::map<ClassId, ClassId> majority_label_clusters(std::span<const ClassId> clusters, std::span<const ClassId> gold) {
  if (clusters.size() != gold.size()) throw ContractViolation("majority_label_clusters: length mismatch");
  std::map<ClassId, std::map<ClassId, std::size_t>> tallies;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (gold[i] == kNoLabel || clusters[i] == kNoLabel) continue;
    ++tallies[clusters[i]][gold[i]];
  }
  std::map<ClassId, ClassId> out;
  for (const auto& [cluster, counts] : tallies) {
    ClassId best = kNoLabel;
    std::size_t best_count = 0;
    for (const auto& [g, c] : counts) {  // ascending gold id, so strict > keeps the lowest on ties
      if (c > best_count) {
        best = g;
        best_count = c;
      }
    }
    out.emplace(cluster, best);
  }
  return out;
}

std::vector<ClassPrf> seed_class_prf(std::span<const ClassId> clusters, std::span<const ClassId> gold,
                                     std::span<const ClassId> seeded_class_ids) {
  const auto mapping = majority_label_clusters(clusters, gold);
  std::vector<ClassPrf> rows;
  rows.reserve(seeded_class_ids.size());
  for (ClassId c : seeded_class_ids) {
    ClassPrf r;
    r.gold_class = c;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      if (gold[i] == kNoLabel || clusters[i] == kNoLabel) continue;
      const bool predicted = mapping.at(clusters[i]) == c;
      const bool actual = gold[i] == c;
      r.predicted += predicted;
      r.actual += actual;
      r.true_positives += predicted && actual;
    }
    if (r.predicted > 0) r.precision = static_cast<double>(r.true_positives) / static_cast<double>(r.predicted);
    if (r.actual > 0) r.recall = static_cast<double>(r.true_positives) / static_cast<double>(r.actual);
    if (r.precision + r.recall > 0.0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    rows.push_back(r);
  }
  return rows;
}

double seed_macro_f1(std::span<const ClassId> clusters, std::span<const ClassId> gold,
                     std::span<const ClassId> seeded_class_ids) {
  if (seeded_class_ids.empty()) return 0.0;
  double total = 0.0;
  for (const auto& r : seed_class_prf(clusters, gold, seeded_class_ids)) total += r.f1;
  return total / static_cast<double>(seeded_class_ids.size());
}

ConfusionMatrix build_confusion(std::span<const ClassId> clusters, std::span<const ClassId> gold) {
  if (clusters.size() != gold.size()) throw ContractViolation("build_confusion: length mismatch");
  std::set<ClassId> row_set, col_set;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (gold[i] == kNoLabel || clusters[i] == kNoLabel) continue;
    row_set.insert(clusters[i]);
    col_set.insert(gold[i]);
  }
  ConfusionMatrix cm;
  cm.row_ids.assign(row_set.begin(), row_set.end());
  cm.col_ids.assign(col_set.begin(), col_set.end());
  cm.counts.assign(cm.rows(), std::vector<std::int64_t>(cm.cols(), 0));
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (gold[i] == kNoLabel || clusters[i] == kNoLabel) continue;
    const auto r = std::lower_bound(cm.row_ids.begin(), cm.row_ids.end(), clusters[i]) - cm.row_ids.begin();
    const auto c = std::lower_bound(cm.col_ids.begin(), cm.col_ids.end(), gold[i]) - cm.col_ids.begin();
    ++cm.counts[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return cm;
}

std::vector<std::size_t> max_weight_matching(const std::vector<std::vector<std::int64_t>>& weights) {
  const std::size_t rows = weights.size();
  std::size_t cols = 0;
  for (const auto& r : weights) cols = std::max(cols, r.size());
  const std::size_t n = std::max(rows, cols);
  if (n == 0) return {};
  auto cost = [&](std::size_t i, std::size_t j) -> std::int64_t {
    if (i < rows && j < weights[i].size()) return -weights[i][j];
    return 0;
  };

  // Shortest augmenting path Hungarian method (1-based, 0 is a sentinel).
  // u, v are dual potentials; u[i] + v[j] <= cost(i, j) with equality on
  // every optimal assignment.
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> match_col(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    match_col[0] = i;
    std::size_t j0 = 0;
    std::vector<std::int64_t> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match_col[j0];
      std::int64_t delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match_col[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match_col[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match_col[j0] = match_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  // Every optimal matching is a perfect matching of the tight-edge graph.
  // Fix rows in order, each to the smallest column that still admits a
  // perfect matching of the remaining rows.
  std::vector<std::vector<char>> tight(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) tight[i][j] = cost(i, j) == u[i + 1] + v[j + 1];
  }
  std::vector<std::size_t> row_to_col(n), col_to_row(n);
  for (std::size_t j = 1; j <= n; ++j) {
    row_to_col[match_col[j] - 1] = j - 1;
    col_to_row[j - 1] = match_col[j] - 1;
  }

  std::vector<char> col_fixed(n, 0);
  std::vector<char> visited(n, 0);
  // Finds an alternating path from free row r to the free column `target`
  // through unfixed rows (> pivot) and unfixed columns other than `banned`.
  std::function<bool(std::size_t, std::size_t, std::size_t, std::size_t)> augment =
      [&](std::size_t r, std::size_t target, std::size_t banned, std::size_t pivot) -> bool {
    for (std::size_t j = 0; j < n; ++j) {
      if (!tight[r][j] || col_fixed[j] || j == banned || visited[j]) continue;
      visited[j] = 1;
      if (j == target || (col_to_row[j] > pivot && augment(col_to_row[j], target, banned, pivot))) {
        row_to_col[r] = j;
        col_to_row[j] = r;
        return true;
      }
    }
    return false;
  };

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!tight[i][j] || col_fixed[j]) continue;
      if (row_to_col[i] == j) break;
      const std::size_t freed = row_to_col[i];
      const std::size_t displaced = col_to_row[j];
      std::fill(visited.begin(), visited.end(), 0);
      visited[j] = 1;
      const auto saved_r2c = row_to_col;
      const auto saved_c2r = col_to_row;
      if (augment(displaced, freed, j, i)) {
        row_to_col[i] = j;
        col_to_row[j] = i;
        break;
      }
      row_to_col = saved_r2c;
      col_to_row = saved_c2r;
    }
    col_fixed[row_to_col[i]] = 1;
  }
  return row_to_col;
}

ConfusionMatrix align_confusion(const ConfusionMatrix& cm) {
  if (cm.rows() == 0 || cm.cols() == 0) throw ContractViolation("align_confusion on an empty matrix");
  const auto matching = max_weight_matching(cm.counts);
  const std::size_t n = matching.size();
  ConfusionMatrix out;
  if (cm.rows() >= cm.cols()) {
    // Output row p holds the cluster matched to column p.
    std::vector<std::size_t> order(n);
    for (std::size_t r = 0; r < n; ++r) order[matching[r]] = r;
    for (std::size_t p = 0; p < n; ++p) {
      out.row_ids.push_back(cm.row_ids[order[p]]);
      out.counts.push_back(cm.counts[order[p]]);
    }
    out.col_ids = cm.col_ids;
  } else {
    // Output column p holds the class matched to row p.
    out.row_ids = cm.row_ids;
    out.col_ids.resize(n);
    for (std::size_t p = 0; p < n; ++p) out.col_ids[p] = cm.col_ids[matching[p]];
    out.counts.assign(cm.rows(), std::vector<std::int64_t>(n));
    for (std::size_t r = 0; r < cm.rows(); ++r) {
      for (std::size_t p = 0; p < n; ++p) out.counts[r][p] = cm.counts[r][matching[p]];
    }
  }
  return out;
}

SignificanceResult paired_significance(std::span<const double> a, std::span<const double> b, double level) {
  if (a.size() != b.size()) throw ContractViolation("paired_significance: length mismatch");
  if (a.size() < 2) throw ContractViolation("paired_significance needs at least two pairs");
  const double n = static_cast<double>(a.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
  mean /= n;
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double dev = a[i] - b[i] - mean;
    ss += dev * dev;
  }
  const double sd = std::sqrt(ss / (n - 1.0));

  SignificanceResult r;
  r.mean_difference = mean;
  if (sd == 0.0) {
    r.p_value = mean == 0.0 ? 1.0 : 0.0;
    r.t_statistic = mean == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), mean);
  } else {
    r.t_statistic = mean / (sd / std::sqrt(n));
    const boost::math::students_t dist(n - 1.0);
    r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t_statistic)));
    r.p_value = std::min(1.0, r.p_value);
  }
  if (r.p_value < level && mean != 0.0) {
    r.direction = mean > 0.0 ? SignificanceDirection::A : SignificanceDirection::B;
  }
  if (mean != 0.0) {
    if (r.p_value < 0.05) {
      r.marker = "▲";
    } else if (r.p_value < 0.1) {
      r.marker = "△";
    }
  }
  return r;
}

EvaluationReport evaluate_run(const Dataset& d, const SeedPartition& p, const ModelState& state,
                              const EvalOptions& options) {
  std::vector<ClassId> clusters, gold;
  auto take = [&](std::size_t i) {
    if (d.labels[i] == kNoLabel || state.assignments[i] == kNoLabel) return;
    clusters.push_back(state.assignments[i]);
    gold.push_back(d.labels[i]);
  };
  for (std::size_t i : p.unlabeled_idx) take(i);
  if (options.include_seeds) {
    for (std::size_t i : p.labeled_idx) take(i);
  }
  EvaluationReport report;
  report.per_class_prf = seed_class_prf(clusters, gold, p.seeded_class_ids);
  double total = 0.0;
  for (const auto& r : report.per_class_prf) total += r.f1;
  report.macro_f1_seed = p.seeded_class_ids.empty() ? 0.0 : total / static_cast<double>(p.seeded_class_ids.size());
  report.num_clusters = state.num_classes();
  if (!clusters.empty()) report.aligned_confusion = align_confusion(build_confusion(clusters, gold));
  return report;
}

}  // namespace exem
