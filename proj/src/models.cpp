#include "exem/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "exem/error.hpp"

namespace exem {

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::NaiveBayes: return "nb";
    case Family::KMeans: return "kmeans";
    case Family::VonMisesFisher: return "vmf";
  }
  return "?";
}

Family parse_family(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "nb") return Family::NaiveBayes;
  if (lower == "kmeans" || lower == "km") return Family::KMeans;
  if (lower == "vmf") return Family::VonMisesFisher;
  throw ConfigError("unknown model family '" + std::string(s) + "'");
}

Representation representation_for(Family f) noexcept {
  switch (f) {
    case Family::NaiveBayes: return Representation::RawCounts;
    case Family::KMeans: return Representation::TfidfL1;
    case Family::VonMisesFisher: return Representation::TfidfL2;
  }
  return Representation::RawCounts;
}

std::size_t ModelState::num_seeded() const noexcept {
  return static_cast<std::size_t>(std::count(seeded.begin(), seeded.end(), char{1}));
}

double ModelState::log_prior(std::size_t j) const {
  double total = 0.0;
  for (double c : prior_counts) total += c;
  const double m = static_cast<double>(prior_counts.size());
  return std::log((prior_counts[j] + 1.0) / (total + m));
}

std::vector<double> ModelState::log_priors() const {
  double total = 0.0;
  for (double c : prior_counts) total += c;
  const double log_denom = std::log(total + static_cast<double>(prior_counts.size()));
  std::vector<double> out(prior_counts.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::log(prior_counts[j] + 1.0) - log_denom;
  return out;
}

std::vector<double> ModelState::priors() const {
  std::vector<double> out = log_priors();
  for (double& v : out) v = std::exp(v);
  return out;
}

void ModelState::add_class(ClassParams p) {
  params.push_back(std::move(p));
  seeded.push_back(0);
  prior_counts.push_back(1.0);
}

double vmf_log_normalizer(double kappa, std::size_t dim) noexcept {
  const double half = static_cast<double>(dim) / 2.0;
  return (half - 1.0) * std::log(kappa) - kappa - half * std::log(2.0 * std::numbers::pi);
}

double estimate_kappa(double rbar, std::size_t dim, const ModelOptions& options) noexcept {
  if (!(rbar < 1.0 - 1e-12)) return options.kappa_max;
  const double d = static_cast<double>(dim);
  const double kappa = (rbar * d - rbar * rbar * rbar) / (1.0 - rbar * rbar);
  if (!std::isfinite(kappa)) return options.kappa_max;
  return std::clamp(kappa, options.kappa_min, options.kappa_max);
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < values.size(); ++j) {
    if (values[j] > values[best]) best = j;
  }
  return best;
}

std::vector<double> class_scores(const ModelState& state, const SparseVector& x) {
  const std::size_t m = state.num_classes();
  const std::vector<double> log_prior = state.log_priors();
  std::vector<double> scores(m);
  for (std::size_t j = 0; j < m; ++j) {
    const ClassParams& p = state.params[j];
    switch (state.family) {
      case Family::NaiveBayes:
        scores[j] = log_prior[j] + x.dot(p.weights);
        break;
      case Family::KMeans:
        scores[j] = std::exp(log_prior[j]) * std::max(0.0, x.dot(p.weights));
        break;
      case Family::VonMisesFisher:
        scores[j] = log_prior[j] + p.kappa * x.dot(p.weights);
        break;
    }
  }
  return scores;
}

std::vector<double> posterior(const ModelState& state, const SparseVector& x) {
  const std::size_t m = state.num_classes();
  if (m == 0) throw ContractViolation("posterior over zero classes");
  std::vector<double> p = class_scores(state, x);
  if (state.family == Family::KMeans) {
    double total = 0.0;
    for (double s : p) total += s;
    if (!(total > 0.0)) return std::vector<double>(m, 1.0 / static_cast<double>(m));
    for (double& s : p) s /= total;
    return p;
  }
  const double top = *std::max_element(p.begin(), p.end());
  if (!std::isfinite(top)) throw NumericalError("non-finite class score");
  double total = 0.0;
  for (double& s : p) {
    s = std::exp(s - top);
    total += s;
  }
  for (double& s : p) s /= total;
  return p;
}

namespace {

// Fills params[j] and prior_counts[j] for every class from `assignments`.
// Classes without members keep their previous parameters.
void estimate(ModelState& state, const Dataset& d, bool from_seeds) {
  const std::size_t m = state.num_classes();
  const std::size_t vocab = state.vocab_size;
  std::vector<std::vector<double>> sums(m, std::vector<double>(vocab, 0.0));
  std::vector<double> members(m, 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const ClassId y = state.assignments[i];
    if (y == kNoLabel) continue;
    auto& sum = sums[static_cast<std::size_t>(y)];
    for (const auto& e : d.instances[i].entries()) sum[e.id] += e.weight;
    members[static_cast<std::size_t>(y)] += 1.0;
  }

  for (std::size_t j = 0; j < m; ++j) {
    ClassParams& p = state.params[j];
    const auto& sum = sums[j];
    if (members[j] == 0.0) {
      if (p.weights.empty()) throw ConfigError("class " + std::to_string(j) + " has no members to estimate from");
      continue;
    }
    switch (state.family) {
      case Family::NaiveBayes: {
        double total = 0.0;
        for (double c : sum) total += c;
        const double denom = std::log(total + static_cast<double>(vocab));
        p.weights.resize(vocab);
        for (std::size_t w = 0; w < vocab; ++w) p.weights[w] = std::log(sum[w] + 1.0) - denom;
        break;
      }
      case Family::KMeans: {
        double total = 0.0;
        for (double c : sum) total += std::abs(c);
        if (total == 0.0) {
          if (from_seeds) throw NumericalError("seed centroid is the zero vector");
          break;
        }
        p.weights.resize(vocab);
        for (std::size_t w = 0; w < vocab; ++w) p.weights[w] = sum[w] / total;
        break;
      }
      case Family::VonMisesFisher: {
        double norm2 = 0.0;
        for (double c : sum) norm2 += c * c;
        const double norm = std::sqrt(norm2);
        if (!(norm > 1e-12 * members[j])) {
          if (from_seeds) throw NumericalError("degenerate direction: seed vectors cancel out");
          p.kappa = state.options.kappa_min;
          break;
        }
        p.weights.resize(vocab);
        for (std::size_t w = 0; w < vocab; ++w) p.weights[w] = sum[w] / norm;
        p.kappa = estimate_kappa(norm / members[j], vocab, state.options);
        break;
      }
    }
  }
  state.prior_counts = std::move(members);
}

}  // namespace

ModelState init_from_seeds(const Dataset& d, const SeedPartition& p, Family family, const ModelOptions& options) {
  ModelState state;
  state.family = family;
  state.vocab_size = d.vocab_size;
  state.options = options;
  const std::size_t k = p.seeded_class_ids.size();
  state.params.resize(k);
  state.seeded.assign(k, 1);
  state.prior_counts.assign(k, 0.0);
  state.assignments.assign(d.size(), kNoLabel);
  for (std::size_t i : p.labeled_idx) {
    const auto it = std::lower_bound(p.seeded_class_ids.begin(), p.seeded_class_ids.end(), d.labels[i]);
    if (it == p.seeded_class_ids.end() || *it != d.labels[i]) {
      throw ContractViolation("labeled instance outside the seeded classes");
    }
    state.assignments[i] = static_cast<ClassId>(it - p.seeded_class_ids.begin());
  }
  estimate(state, d, /*from_seeds=*/true);
  return state;
}

ClassParams init_new_class(const SparseVector& x, Family family, std::size_t vocab_size,
                           const ModelOptions& options) {
  if (x.empty()) throw NumericalError("cannot grow a class from the zero vector");
  ClassParams p;
  const double vocab = static_cast<double>(vocab_size);
  switch (family) {
    case Family::NaiveBayes: {
      const double denom = std::log(x.sum() + vocab);
      p.weights.assign(vocab_size, -denom);  // log(0 + 1) - denom
      for (const auto& e : x.entries()) p.weights[e.id] = std::log(e.weight + 1.0) - denom;
      break;
    }
    case Family::KMeans: {
      const double eps = 1.0 / vocab;
      const double total = x.l1_norm() + vocab * eps;
      p.weights.assign(vocab_size, eps / total);
      for (const auto& e : x.entries()) p.weights[e.id] = (e.weight + eps) / total;
      break;
    }
    case Family::VonMisesFisher: {
      p.weights = x.to_dense(vocab_size);
      const double norm = x.l2_norm();
      if (norm != 1.0) {
        for (double& w : p.weights) w /= norm;
      }
      p.kappa = options.kappa_init;
      break;
    }
  }
  return p;
}

ModelState m_step(const ModelState& state, const Dataset& d) {
  ModelState next = state;
  const std::size_t m = state.num_classes();
  std::vector<std::size_t> members(m, 0);
  for (ClassId y : state.assignments) {
    if (y != kNoLabel) ++members[static_cast<std::size_t>(y)];
  }

  std::vector<ClassId> remap(m, kNoLabel);
  ClassId live = 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (state.seeded[j] || members[j] > 0) remap[j] = live++;
  }
  if (static_cast<std::size_t>(live) != m) {
    next.params.clear();
    next.seeded.clear();
    next.prior_counts.clear();
    for (std::size_t j = 0; j < m; ++j) {
      if (remap[j] == kNoLabel) continue;
      next.params.push_back(state.params[j]);
      next.seeded.push_back(state.seeded[j]);
      next.prior_counts.push_back(state.prior_counts[j]);
    }
    for (ClassId& y : next.assignments) {
      if (y != kNoLabel) y = remap[static_cast<std::size_t>(y)];
    }
  }
  estimate(next, d, /*from_seeds=*/false);
  return next;
}

namespace {

double log_likelihood_term(const ModelState& state, const SparseVector& x, std::size_t j, double log_prior) {
  const ClassParams& p = state.params[j];
  switch (state.family) {
    case Family::NaiveBayes:
      return log_prior + x.dot(p.weights);
    case Family::KMeans:
      return log_prior + std::log(std::max(0.0, x.dot(p.weights)) + state.options.kmeans_ll_epsilon);
    case Family::VonMisesFisher:
      return log_prior + p.kappa * x.dot(p.weights) + vmf_log_normalizer(p.kappa, state.vocab_size);
  }
  return 0.0;
}

}  // namespace

double instance_log_likelihood(const ModelState& state, const SparseVector& x, std::size_t j) {
  return log_likelihood_term(state, x, j, state.log_prior(j));
}

double data_log_likelihood(const ModelState& state, const Dataset& d) {
  const std::vector<double> log_prior = state.log_priors();
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const ClassId y = state.assignments[i];
    if (y == kNoLabel) continue;
    const auto j = static_cast<std::size_t>(y);
    total += log_likelihood_term(state, d.instances[i], j, log_prior[j]);
  }
  if (!std::isfinite(total)) throw NumericalError("non-finite data log-likelihood");
  return total;
}

std::int64_t free_parameter_count(Family family, std::size_t num_classes, std::size_t vocab_size) noexcept {
  if (num_classes == 0) return 0;
  const auto m = static_cast<std::int64_t>(num_classes);
  const auto v = static_cast<std::int64_t>(vocab_size);
  const std::int64_t shared = m * (v - 1) + (m - 1);
  return family == Family::VonMisesFisher ? shared + m : shared;
}

std::int64_t free_parameter_count(const ModelState& state) noexcept {
  return free_parameter_count(state.family, state.num_classes(), state.vocab_size);
}

void write_snapshot(std::ostream& out, const ModelState& state) {
  const auto precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "family " << to_string(state.family) << '\n';
  out << "vocab_size " << state.vocab_size << '\n';
  out << "options " << state.options.kappa_init << ' ' << state.options.kappa_min << ' '
      << state.options.kappa_max << ' ' << state.options.kmeans_ll_epsilon << '\n';
  out << "classes " << state.num_classes() << '\n';
  for (std::size_t j = 0; j < state.num_classes(); ++j) {
    const ClassParams& p = state.params[j];
    // NB parameters are log-probabilities; the snapshot stores P(w|C).
    const bool as_prob = state.family == Family::NaiveBayes;
    std::size_t nnz = 0;
    for (double w : p.weights) nnz += (w != 0.0 || as_prob) ? 1 : 0;
    out << "class " << j << " seeded " << int(state.seeded[j]) << " prior_count " << state.prior_counts[j]
        << " prior " << std::exp(state.log_prior(j)) << " kappa " << p.kappa << " nnz " << nnz << '\n';
    for (std::size_t w = 0; w < p.weights.size(); ++w) {
      if (!as_prob && p.weights[w] == 0.0) continue;
      out << ' ' << w << ':' << (as_prob ? std::exp(p.weights[w]) : p.weights[w]);
    }
    out << '\n';
  }
  out << "assignments " << state.assignments.size() << '\n';
  for (ClassId y : state.assignments) out << ' ' << y;
  out << '\n';
  out.precision(precision);
}

ModelState read_snapshot(std::istream& in) {
  auto expect = [&](const char* key) {
    std::string tok;
    if (!(in >> tok) || tok != key) throw ParseError(std::string("snapshot: expected '") + key + "'", 0);
  };
  ModelState s;
  std::string family;
  expect("family");
  in >> family;
  s.family = parse_family(family);
  expect("vocab_size");
  in >> s.vocab_size;
  expect("options");
  in >> s.options.kappa_init >> s.options.kappa_min >> s.options.kappa_max >> s.options.kmeans_ll_epsilon;
  std::size_t m = 0;
  expect("classes");
  in >> m;
  for (std::size_t j = 0; j < m; ++j) {
    std::size_t id = 0, nnz = 0;
    int seeded = 0;
    double prior_count = 0.0, prior = 0.0;
    ClassParams p;
    expect("class");
    in >> id;
    expect("seeded");
    in >> seeded;
    expect("prior_count");
    in >> prior_count;
    expect("prior");
    in >> prior;
    expect("kappa");
    in >> p.kappa;
    expect("nnz");
    in >> nnz;
    p.weights.assign(s.vocab_size, 0.0);
    for (std::size_t e = 0; e < nnz; ++e) {
      std::string tok;
      in >> tok;
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw ParseError("snapshot: bad parameter entry '" + tok + "'", 0);
      const std::size_t w = std::stoul(tok.substr(0, colon));
      if (w >= s.vocab_size) throw BoundsError("snapshot: parameter index outside vocabulary");
      p.weights[w] = std::stod(tok.substr(colon + 1));
    }
    if (s.family == Family::NaiveBayes) {
      for (double& w : p.weights) w = std::log(w);
    }
    s.params.push_back(std::move(p));
    s.seeded.push_back(static_cast<char>(seeded != 0));
    s.prior_counts.push_back(prior_count);
  }
  std::size_t n = 0;
  expect("assignments");
  in >> n;
  s.assignments.resize(n);
  for (auto& y : s.assignments) in >> y;
  if (!in) throw ParseError("snapshot: truncated input", 0);
  return s;
}

}  // namespace exem
