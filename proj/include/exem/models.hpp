#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "exem/data.hpp"

namespace exem {

enum class Family { NaiveBayes, KMeans, VonMisesFisher };

std::string_view to_string(Family f) noexcept;
/// Accepts "nb", "kmeans"/"km", "vmf" (case-insensitive). Throws ConfigError.
Family parse_family(std::string_view s);

/// Input convention per family: NB reads raw term counts, K-Means reads
/// L1-normalized tf-idf, vMF reads L2-normalized tf-idf.
Representation representation_for(Family f) noexcept;

struct ModelOptions {
  double kappa_init = 1.0;         // concentration of a vMF class grown from one point
  double kappa_min = 1e-2;
  double kappa_max = 1e4;
  double kmeans_ll_epsilon = 1e-12;

  friend bool operator==(const ModelOptions&, const ModelOptions&) = default;
};

/// Per-class parameters. The meaning of `weights` depends on the family:
///   NB      log P(w|C) for every vocabulary entry
///   KMeans  centroid, L1 norm 1
///   VMF     mean direction, L2 norm 1 (with `kappa` > 0)
struct ClassParams {
  std::vector<double> weights;
  double kappa = 0.0;

  friend bool operator==(const ClassParams&, const ClassParams&) = default;
};

/// Parameters for the m live classes plus the hard assignment of every
/// instance. Classes [0, k) are the seeded ones, in the order of the
/// partition's seeded_class_ids; later classes were introduced at run time.
struct ModelState {
  Family family = Family::KMeans;
  std::size_t vocab_size = 0;
  ModelOptions options;
  std::vector<ClassParams> params;
  std::vector<char> seeded;
  /// Members per class at the last re-estimation; priors are
  /// (count + 1) / (total + m).
  std::vector<double> prior_counts;
  /// Model class per instance, kNoLabel while unassigned.
  std::vector<ClassId> assignments;

  std::size_t num_classes() const noexcept { return params.size(); }
  std::size_t num_seeded() const noexcept;
  double log_prior(std::size_t j) const;
  std::vector<double> log_priors() const;
  std::vector<double> priors() const;

  /// Appends an introduced class holding a single member's worth of prior mass.
  void add_class(ClassParams p);

  friend bool operator==(const ModelState&, const ModelState&) = default;
};

/// Unnormalized per-class scores: log-space for NB and vMF, linear
/// P(C) * (x . centroid) for K-Means.
std::vector<double> class_scores(const ModelState& state, const SparseVector& x);

/// P(C_j | x) for every live class. Requires m > 0. K-Means falls back to the
/// uniform distribution when every inner product is zero.
std::vector<double> posterior(const ModelState& state, const SparseVector& x);

/// Index of the largest entry, lowest index on ties.
std::size_t argmax(std::span<const double> values);

/// Seed-only model. Throws ConfigError when a seeded class has no labeled
/// instance and NumericalError when a vMF seed set has no mean direction.
ModelState init_from_seeds(const Dataset& d, const SeedPartition& p, Family family,
                           const ModelOptions& options = {});

/// Parameters of a class grown from the single point x. Throws
/// NumericalError on the zero vector.
ClassParams init_new_class(const SparseVector& x, Family family, std::size_t vocab_size,
                           const ModelOptions& options = {});

/// Re-estimates parameters and priors from the current assignments. Introduced
/// classes left without members are removed and assignments renumbered;
/// seeded classes are always kept.
ModelState m_step(const ModelState& state, const Dataset& d);

/// log of P(C_y) * P(x | C_y) for a single instance and class.
double instance_log_likelihood(const ModelState& state, const SparseVector& x, std::size_t j);

/// Complete-data log-likelihood under the hard assignments (unassigned
/// instances are skipped). For K-Means this is the surrogate
/// log[P(C) * (x . centroid + eps)].
double data_log_likelihood(const ModelState& state, const Dataset& d);

std::int64_t free_parameter_count(Family family, std::size_t num_classes, std::size_t vocab_size) noexcept;
std::int64_t free_parameter_count(const ModelState& state) noexcept;

/// Large-concentration approximation of the log vMF normalizer in d dimensions.
double vmf_log_normalizer(double kappa, std::size_t dim) noexcept;

/// Banerjee et al. approximation of the ML concentration, clamped to
/// [kappa_min, kappa_max].
double estimate_kappa(double mean_resultant_length, std::size_t dim, const ModelOptions& options) noexcept;

/// Plain-text snapshot: family, vocabulary, then one block per class with its
/// flags, prior and the nonzero parameter entries.
void write_snapshot(std::ostream& out, const ModelState& state);
ModelState read_snapshot(std::istream& in);

}  // namespace exem
