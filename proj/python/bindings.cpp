#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "exem/crp.hpp"
#include "exem/criteria.hpp"
#include "exem/data.hpp"
#include "exem/engine.hpp"
#include "exem/error.hpp"
#include "exem/eval.hpp"
#include "exem/experiment.hpp"
#include "exem/selection.hpp"
#include "exem/synth.hpp"

namespace py = pybind11;
using namespace exem;

namespace {

Dataset dataset_from_rows(const std::vector<std::map<FeatureId, double>>& rows, const std::vector<std::string>& labels,
                          std::optional<std::size_t> vocab_size) {
  if (rows.size() != labels.size()) throw ConfigError("rows and labels differ in length");
  std::ostringstream text;
  text.precision(17);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    text << labels[i];
    for (const auto& [id, w] : rows[i]) text << ' ' << id << ':' << w;
    text << '\n';
  }
  std::istringstream in(text.str());
  return read_sparse_triplet(in, vocab_size);
}

std::vector<std::map<FeatureId, double>> dataset_rows(const Dataset& d) {
  std::vector<std::map<FeatureId, double>> out;
  for (const auto& x : d.instances) {
    std::map<FeatureId, double> row;
    for (const auto& e : x.entries()) row[e.id] = e.weight;
    out.push_back(std::move(row));
  }
  return out;
}

py::dict report_dict(const EvaluationReport& r) {
  py::list per_class;
  for (const auto& c : r.per_class_prf) {
    py::dict row;
    row["gold_class"] = c.gold_class;
    row["precision"] = c.precision;
    row["recall"] = c.recall;
    row["f1"] = c.f1;
    per_class.append(row);
  }
  py::dict out;
  out["macro_f1_seed"] = r.macro_f1_seed;
  out["num_clusters"] = r.num_clusters;
  out["per_class"] = per_class;
  out["aligned_confusion"] = r.aligned_confusion.counts;
  return out;
}

EngineConfig engine_config(Family family, CriterionKind criterion, double random_rate, SelectionCriterion selection,
                           int max_iterations, double tol, std::uint64_t seed) {
  EngineConfig cfg;
  cfg.family = family;
  cfg.criterion.kind = criterion;
  cfg.criterion.random_rate = random_rate;
  cfg.criterion.rng_seed = seed;
  cfg.selection = selection;
  cfg.max_iterations = max_iterations;
  cfg.ll_rel_tolerance = tol;
  cfg.rng_seed = seed;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exploratory semi-supervised EM: seeded clustering that can grow new classes";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<BoundsError>(m, "BoundsError", PyExc_IndexError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  py::enum_<Family>(m, "Family")
      .value("NB", Family::NaiveBayes)
      .value("KMEANS", Family::KMeans)
      .value("VMF", Family::VonMisesFisher);
  py::enum_<CriterionKind>(m, "Criterion")
      .value("MINMAX", CriterionKind::MinMax)
      .value("JS", CriterionKind::JS)
      .value("RANDOM", CriterionKind::Random);
  py::enum_<SelectionCriterion>(m, "Selection")
      .value("BIC", SelectionCriterion::BIC)
      .value("AIC", SelectionCriterion::AIC)
      .value("AICC", SelectionCriterion::AICc);
  py::enum_<CrpPick>(m, "CrpPick").value("STANDARD", CrpPick::Standard).value("MODIFIED", CrpPick::Modified);

  py::enum_<InputFormat>(m, "InputFormat")
      .value("SPARSE_TRIPLET", InputFormat::SparseTriplet)
      .value("DENSE_CSV", InputFormat::DenseCsv);

  py::class_<Dataset>(m, "Dataset")
      .def_static("from_rows", &dataset_from_rows, py::arg("rows"), py::arg("labels"),
                  py::arg("vocab_size") = std::nullopt,
                  "Build from sparse rows ({feature_id: value}) and label strings; \"?\" marks a missing label.")
      .def_static("load", &load_dataset, py::arg("path"), py::arg("format") = InputFormat::SparseTriplet,
                  py::arg("vocab_size") = std::nullopt)
      .def("__len__", &Dataset::size)
      .def_readonly("labels", &Dataset::labels)
      .def_readonly("class_names", &Dataset::class_names)
      .def_readonly("vocab_size", &Dataset::vocab_size)
      .def_property_readonly("num_classes", &Dataset::num_classes)
      .def("rows", &dataset_rows)
      .def("featurize", [](const Dataset& d, Family f) { return featurize(drop_tfidf_degenerate(d), representation_for(f)); },
           py::arg("family"), "Drops instances that vanish under tf-idf, then converts to the family's representation.");

  py::class_<SeedPartition>(m, "SeedPartition")
      .def_readonly("seeded_class_ids", &SeedPartition::seeded_class_ids)
      .def_readonly("labeled_idx", &SeedPartition::labeled_idx)
      .def_readonly("unlabeled_idx", &SeedPartition::unlabeled_idx);

  m.def(
      "make_partitions",
      [](const Dataset& d, int num_seed_classes, double seeds_fraction, int num_partitions, std::uint64_t rng_seed,
         std::vector<ClassId> seeded_classes) {
        PartitionConfig pc{num_seed_classes, seeds_fraction, num_partitions, rng_seed, std::move(seeded_classes)};
        return make_partitions(d, pc);
      },
      py::arg("dataset"), py::arg("num_seed_classes"), py::arg("seeds_fraction") = 0.05, py::arg("num_partitions") = 10,
      py::arg("rng_seed") = 0, py::arg("seeded_classes") = std::vector<ClassId>{});

  m.def(
      "generate_synthetic",
      [](int num_classes, int instances_per_class, int vocab_size, double separation, const std::string& generator,
         std::uint64_t rng_seed, int doc_length, double noise) {
        SyntheticSpec s{num_classes, instances_per_class, vocab_size, separation, parse_generator(generator),
                        rng_seed, doc_length, noise};
        return generate_synthetic(s).data;
      },
      py::arg("num_classes") = 3, py::arg("instances_per_class") = 100, py::arg("vocab_size") = 60,
      py::arg("separation") = 1.0, py::arg("generator") = "multinomial", py::arg("rng_seed") = 0,
      py::arg("doc_length") = 50, py::arg("noise") = 0.5);

  py::class_<RunResult>(m, "RunResult")
      .def_property_readonly("assignments", [](const RunResult& r) { return r.final_state.assignments; })
      .def_property_readonly("num_classes", [](const RunResult& r) { return r.final_state.num_classes(); })
      .def_readonly("iterations", &RunResult::iterations_run)
      .def_readonly("ll_trace", &RunResult::ll_trace)
      .def_readonly("score_trace", &RunResult::score_trace)
      .def_readonly("class_count_trace", &RunResult::class_count_trace)
      .def_readonly("can_add_latched_at", &RunResult::can_add_latched_at)
      .def_property_readonly("firing_rate", &RunResult::firing_rate);

  m.def(
      "exploratory_em",
      [](const Dataset& d, const SeedPartition& p, Family family, CriterionKind criterion, double random_rate,
         SelectionCriterion selection, int max_iterations, double tol, std::uint64_t rng_seed) {
        py::gil_scoped_release release;
        return exploratory_em(d, p, engine_config(family, criterion, random_rate, selection, max_iterations, tol, rng_seed));
      },
      py::arg("dataset"), py::arg("partition"), py::arg("family"), py::arg("criterion") = CriterionKind::MinMax,
      py::arg("random_rate") = 0.0, py::arg("selection") = SelectionCriterion::AICc, py::arg("max_iterations") = 15,
      py::arg("ll_rel_tolerance") = 1e-4, py::arg("rng_seed") = 0);

  m.def(
      "semisup_em",
      [](const Dataset& d, const SeedPartition& p, Family family, int extra_classes, int max_iterations, double tol,
         std::uint64_t rng_seed) {
        EngineConfig cfg =
            engine_config(family, CriterionKind::MinMax, 0.0, SelectionCriterion::AICc, max_iterations, tol, rng_seed);
        cfg.extra_classes = extra_classes;
        py::gil_scoped_release release;
        return semisup_em(d, p, cfg);
      },
      py::arg("dataset"), py::arg("partition"), py::arg("family"), py::arg("extra_classes") = 0,
      py::arg("max_iterations") = 15, py::arg("ll_rel_tolerance") = 1e-4, py::arg("rng_seed") = 0);

  m.def(
      "crp_gibbs",
      [](const Dataset& d, const SeedPartition& p, double p_new, CrpPick pick, Family family, int num_epochs,
         std::uint64_t rng_seed) {
        CrpConfig cfg;
        cfg.p_new = p_new;
        cfg.pick = pick;
        cfg.family = family;
        cfg.num_epochs = num_epochs;
        cfg.rng_seed = rng_seed;
        py::gil_scoped_release release;
        return crp_gibbs(d, p, cfg);
      },
      py::arg("dataset"), py::arg("partition"), py::arg("p_new") = 1e-4, py::arg("pick") = CrpPick::Standard,
      py::arg("family") = Family::KMeans, py::arg("num_epochs") = 50, py::arg("rng_seed") = 0);

  m.def(
      "evaluate",
      [](const Dataset& d, const SeedPartition& p, const RunResult& r, bool include_seeds) {
        return report_dict(evaluate_run(d, p, r.final_state, {include_seeds}));
      },
      py::arg("dataset"), py::arg("partition"), py::arg("result"), py::arg("include_seeds") = false);

  m.def("seed_macro_f1",
        [](const std::vector<ClassId>& clusters, const std::vector<ClassId>& gold, const std::vector<ClassId>& seeded) {
          return seed_macro_f1(clusters, gold, seeded);
        },
        py::arg("clusters"), py::arg("gold"), py::arg("seeded_class_ids"));
  m.def("max_weight_matching", &max_weight_matching, py::arg("weights"),
        "Row -> column assignment of a maximum-weight matching on the zero-padded square matrix.");

  m.def("js_divergence",
        [](const std::vector<double>& p, const std::vector<double>& q) { return js_divergence(p, q); });
  m.def("js_criterion", [](const std::vector<double>& p) { return js_criterion(p); });
  m.def("minmax_criterion", [](const std::vector<double>& p) { return minmax_criterion(p); });
  m.def("score_model",
        [](double ll, std::int64_t v, std::int64_t n, SelectionCriterion c) { return score_model(ll, v, n, c).score; },
        py::arg("log_likelihood"), py::arg("num_params"), py::arg("num_instances"), py::arg("criterion"));

  m.def(
      "run_experiment",
      [](const std::map<std::string, std::string>& config) {
        const ExperimentSpec spec = ExperimentSpec::from_config(config);
        py::gil_scoped_release release;
        return run_experiment(spec);
      },
      py::arg("config"), "Runs a grid from string settings (same keys as the config file); returns the exit code.");
}
