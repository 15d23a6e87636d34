// exem: exploratory semi-supervised clustering experiments.
//
//   exem run --config spec.cfg [--key value ...]
//   exem sweep-pnew --config spec.cfg --crp-p-new "1e-6,1e-4,1e-2"
//   exem synth --num-classes 5 --output synth.txt
//   exem eval run.csv

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "exem/config.hpp"
#include "exem/error.hpp"
#include "exem/experiment.hpp"
#include "exem/log.hpp"
#include "exem/synth.hpp"

namespace {

const char* const kSpecKeys[] = {
    "dataset",        "format",           "vocab_size",      "families",       "algorithms",
    "criteria",       "num_seed_classes", "seeded_classes",  "seeds_fraction", "num_partitions",
    "model_selection", "crp_p_new",       "crp_epochs",      "max_iterations", "ll_rel_tolerance",
    "sweep_m",        "random_reference", "rng_seed",        "output_dir",     "jobs",
    "save_assignments", "include_seeds_in_eval", "kappa_init"};

struct SpecOptions {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

void add_spec_options(CLI::App& cmd, SpecOptions& o) {
  cmd.add_option("-c,--config", o.config_file, "Experiment config file (key = value)")->check(CLI::ExistingFile);
  for (const char* key : kSpecKeys) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    o.options[key] = cmd.add_option("--" + flag, o.values[key], "Overrides config key '" + std::string(key) + "'");
  }
}

exem::ExperimentSpec resolve_spec(const SpecOptions& o) {
  exem::ConfigMap cfg;
  if (!o.config_file.empty()) cfg = exem::load_config(o.config_file);
  exem::ConfigMap flags;
  for (const auto& [key, opt] : o.options) {
    if (opt->count() > 0) flags[key] = o.values.at(key);
  }
  cfg = exem::merge_config(std::move(cfg), flags);
  if (!cfg.contains("dataset")) throw exem::ConfigError("no dataset given (config key 'dataset' or --dataset)");
  return exem::ExperimentSpec::from_config(cfg);
}

nlohmann::ordered_json report_json(const exem::EvaluationReport& r) {
  nlohmann::ordered_json j;
  j["macro_f1_seed"] = r.macro_f1_seed;
  j["num_clusters"] = r.num_clusters;
  j["per_class"] = nlohmann::ordered_json::array();
  for (const auto& c : r.per_class_prf) {
    j["per_class"].push_back({{"gold_class", c.gold_class},
                              {"precision", c.precision},
                              {"recall", c.recall},
                              {"f1", c.f1},
                              {"true_positives", c.true_positives},
                              {"predicted", c.predicted},
                              {"actual", c.actual}});
  }
  const auto& cm = r.aligned_confusion;
  j["aligned_confusion"] = {{"row_clusters", cm.row_ids}, {"col_classes", cm.col_ids}, {"counts", cm.counts}};
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exploratory semi-supervised EM experiments"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  SpecOptions run_opts;
  auto* run = app.add_subcommand("run", "Run an experiment grid and write reports");
  add_spec_options(*run, run_opts);

  SpecOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep-pnew", "CRP concentration sweep, standard vs modified pick");
  add_spec_options(*sweep, sweep_opts);

  exem::SyntheticSpec synth_spec;
  std::string synth_out, synth_labels, generator = "multinomial";
  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset in sparse triplet format");
  synth->add_option("--num-classes", synth_spec.num_classes)->capture_default_str();
  synth->add_option("--instances-per-class", synth_spec.instances_per_class)->capture_default_str();
  synth->add_option("--vocab-size", synth_spec.vocab_size)->capture_default_str();
  synth->add_option("--separation", synth_spec.separation)->capture_default_str();
  synth->add_option("--generator", generator)->check(CLI::IsMember({"multinomial", "hypersphere"}))->capture_default_str();
  synth->add_option("--rng-seed", synth_spec.rng_seed)->capture_default_str();
  synth->add_option("--doc-length", synth_spec.doc_length)->capture_default_str();
  synth->add_option("--noise", synth_spec.noise)->capture_default_str();
  synth->add_option("-o,--output", synth_out, "Output path")->required();
  synth->add_option("--label-map", synth_labels, "Also write class_id,label CSV here");

  std::string assignments_path;
  bool include_seeds = false;
  auto* eval = app.add_subcommand("eval", "Re-score a saved assignments CSV; prints JSON");
  eval->add_option("assignments", assignments_path, "index,gold,cluster,is_seed CSV")->required()->check(CLI::ExistingFile);
  eval->add_flag("--include-seeds", include_seeds, "Score seed instances too");

  CLI11_PARSE(app, argc, argv);
  exem::logger()->set_level(spdlog::level::from_str(log_level));

  try {
    if (*run) return exem::run_experiment(resolve_spec(run_opts));
    if (*sweep) return exem::run_pnew_sweep(resolve_spec(sweep_opts));
    if (*synth) {
      synth_spec.generator = exem::parse_generator(generator);
      const auto corpus = exem::generate_synthetic(synth_spec);
      std::ofstream out(synth_out);
      if (!out) throw exem::ConfigError("cannot write '" + synth_out + "'");
      exem::write_sparse_triplet(out, corpus.data);
      if (!synth_labels.empty()) {
        std::ofstream labels(synth_labels);
        exem::write_label_map(labels, corpus.data);
      }
      return 0;
    }
    if (*eval) {
      std::ifstream in(assignments_path);
      const auto rows = exem::read_assignments(in);
      std::cout << report_json(exem::rescore_assignments(rows, {include_seeds})).dump(2) << '\n';
      return 0;
    }
  } catch (const exem::ParseError& e) {
    exem::logger()->error("parse error: {}", e.what());
    return 3;
  } catch (const exem::ConfigError& e) {
    exem::logger()->error("config error: {}", e.what());
    return 2;
  } catch (const std::exception& e) {
    exem::logger()->error("{}", e.what());
    return 1;
  }
  return 0;
}
