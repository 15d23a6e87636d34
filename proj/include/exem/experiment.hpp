#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exem/config.hpp"
#include "exem/criteria.hpp"
#include "exem/data.hpp"
#include "exem/eval.hpp"
#include "exem/models.hpp"
#include "exem/selection.hpp"

namespace exem {

enum class Algorithm { Exploratory, Semisup, SemisupSweep, CrpStandard, CrpModified };

std::string_view to_string(Algorithm a) noexcept;
/// Accepts "exploratory", "semisup", "semisup-sweep", "crp-standard",
/// "crp-modified". Throws ConfigError.
Algorithm parse_algorithm(std::string_view s);

/// Everything needed to run one experiment grid. Built from a ConfigMap whose
/// keys match the field names; see README for the full key list.
struct ExperimentSpec {
  std::filesystem::path dataset;
  InputFormat format = InputFormat::SparseTriplet;
  std::optional<std::size_t> vocab_size;
  std::vector<Family> families{Family::NaiveBayes, Family::KMeans, Family::VonMisesFisher};
  std::vector<Algorithm> algorithms{Algorithm::Exploratory, Algorithm::Semisup, Algorithm::SemisupSweep};
  std::vector<CriterionKind> criteria{CriterionKind::MinMax, CriterionKind::JS, CriterionKind::Random};
  int num_seed_classes = 6;
  std::vector<std::string> seeded_classes;  // class names; overrides num_seed_classes
  double seeds_fraction = 0.05;
  int num_partitions = 10;
  SelectionCriterion model_selection = SelectionCriterion::AICc;
  std::vector<double> crp_p_new{1e-4};
  int crp_epochs = 50;
  int max_iterations = 15;
  double ll_rel_tolerance = 1e-4;
  std::vector<int> sweep_m{0, 1, 2, 5, 10, 20, 40};
  /// Criterion whose observed firing rate calibrates the Random criterion.
  CriterionKind random_reference = CriterionKind::MinMax;
  std::uint64_t rng_seed = 0;
  std::filesystem::path output_dir = "results";
  int jobs = 1;  // 0 = hardware concurrency
  bool save_assignments = false;
  bool include_seeds_in_eval = false;
  double kappa_init = 1.0;

  static ExperimentSpec from_config(const ConfigMap& cfg);
  void validate() const;
};

struct RunCoordinates {
  Algorithm algorithm = Algorithm::Exploratory;
  Family family = Family::NaiveBayes;
  std::optional<CriterionKind> criterion;  // exploratory only
  std::optional<double> p_new;             // CRP only
  int partition = 0;
};

/// "explore-minmax", "semisup", "crp-standard@0.0001", ...
std::string method_label(const RunCoordinates& c);

/// Families outermost, then algorithms, criteria or p_new values, then
/// partitions.
std::vector<RunCoordinates> expand_grid(const ExperimentSpec& spec);

/// Seed of one run: the root seed mixed with hashes of family, method and
/// partition index.
std::uint64_t run_seed(std::uint64_t root, const RunCoordinates& c);

struct TracePoint {
  int iteration = 0;
  double log_likelihood = 0.0;
  double score = 0.0;  // penalized score; NaN for CRP
  int classes = 0;
  int created = 0;
};

struct RunRecord {
  RunCoordinates coords;
  std::uint64_t seed = 0;
  double seed_f1 = 0.0;
  std::size_t num_clusters = 0;
  int iterations = 0;
  std::optional<double> firing_rate;        // exploratory only
  std::optional<int> best_extra_classes;    // semisup-sweep only
  double runtime_s = 0.0;
  std::string error;                        // empty on success
  std::vector<TracePoint> trace;
  std::vector<ClassId> assignments;         // filled when assignments are saved
};

struct ExperimentReport {
  std::string dataset_name;
  std::vector<RunRecord> records;  // grid order
};

/// Runs the whole grid on a count-valued dataset. Each run catches its own
/// failure and records it in `error`.
ExperimentReport run_grid(const ExperimentSpec& spec, const Dataset& counts, std::string dataset_name);

/// Loads the dataset, runs the grid and writes results.csv, timings.csv,
/// traces.csv, summary.json (and assignments/ when requested) into
/// spec.output_dir. Returns 0 unless every run failed.
int run_experiment(const ExperimentSpec& spec);

void write_results_csv(std::ostream& out, const ExperimentReport& report);
void write_timings_csv(std::ostream& out, const ExperimentReport& report);
void write_traces_csv(std::ostream& out, const ExperimentReport& report);
/// Means per method and family, plus a paired test of each method against
/// semisup of the same family.
std::string summary_json(const ExperimentReport& report);

/// CRP sweep: every family x {standard, modified} x p_new value. Writes
/// results.csv and pnew_sweep.csv (means per p_new and pick rule).
int run_pnew_sweep(ExperimentSpec spec);

/// One row per instance of a finished run.
struct AssignmentRow {
  std::size_t index = 0;
  ClassId gold = kNoLabel;
  ClassId cluster = kNoLabel;
  bool is_seed = false;
};

void write_assignments(std::ostream& out, const std::vector<AssignmentRow>& rows);
std::vector<AssignmentRow> read_assignments(std::istream& in);

/// Re-scores saved assignments. Seeded classes are the gold classes of seed
/// rows; seed rows are excluded unless `include_seeds`.
EvaluationReport rescore_assignments(const std::vector<AssignmentRow>& rows, const EvalOptions& options = {});

}  // namespace exem
