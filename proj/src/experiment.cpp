#include "exem/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"

#include "exem/crp.hpp"
#include "exem/engine.hpp"
#include "exem/error.hpp"
#include "exem/log.hpp"
#include "exem/rng.hpp"

namespace exem {

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::Exploratory: return "exploratory";
    case Algorithm::Semisup: return "semisup";
    case Algorithm::SemisupSweep: return "semisup-sweep";
    case Algorithm::CrpStandard: return "crp-standard";
    case Algorithm::CrpModified: return "crp-modified";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view s) {
  for (Algorithm a : {Algorithm::Exploratory, Algorithm::Semisup, Algorithm::SemisupSweep, Algorithm::CrpStandard,
                      Algorithm::CrpModified}) {
    if (s == to_string(a)) return a;
  }
  throw ConfigError("unknown algorithm '" + std::string(s) + "'");
}

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw ConfigError("bad value for '" + key + "': '" + text + "'");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("bad boolean for '" + key + "': '" + text + "'");
}

InputFormat parse_format(const std::string& text) {
  if (text == "sparse" || text == "triplet" || text == "sparse-triplet") return InputFormat::SparseTriplet;
  if (text == "csv" || text == "dense-csv") return InputFormat::DenseCsv;
  throw ConfigError("unknown format '" + text + "'");
}

template <class T, class F>
std::vector<T> parse_list(const std::string& text, F parse) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse(item));
  return out;
}

}  // namespace

ExperimentSpec ExperimentSpec::from_config(const ConfigMap& cfg) {
  static const std::set<std::string> known{
      "dataset",          "format",          "vocab_size",      "families",         "algorithms",
      "criteria",         "num_seed_classes", "seeded_classes", "seeds_fraction",   "num_partitions",
      "model_selection",  "crp_p_new",       "crp_epochs",      "max_iterations",   "ll_rel_tolerance",
      "sweep_m",          "random_reference", "rng_seed",       "output_dir",       "jobs",
      "save_assignments", "include_seeds_in_eval", "kappa_init"};
  ExperimentSpec s;
  for (const auto& [key, value] : cfg) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
    if (key == "dataset") s.dataset = value;
    else if (key == "format") s.format = parse_format(value);
    else if (key == "vocab_size") s.vocab_size = parse_number<std::size_t>(key, value);
    else if (key == "families") s.families = parse_list<Family>(value, [](const std::string& v) { return parse_family(v); });
    else if (key == "algorithms") s.algorithms = parse_list<Algorithm>(value, [](const std::string& v) { return parse_algorithm(v); });
    else if (key == "criteria") s.criteria = parse_list<CriterionKind>(value, [](const std::string& v) { return parse_criterion(v); });
    else if (key == "num_seed_classes") s.num_seed_classes = parse_number<int>(key, value);
    else if (key == "seeded_classes") s.seeded_classes = split_list(value);
    else if (key == "seeds_fraction") s.seeds_fraction = parse_number<double>(key, value);
    else if (key == "num_partitions") s.num_partitions = parse_number<int>(key, value);
    else if (key == "model_selection") s.model_selection = parse_selection(value);
    else if (key == "crp_p_new") s.crp_p_new = parse_list<double>(value, [&](const std::string& v) { return parse_number<double>(key, v); });
    else if (key == "crp_epochs") s.crp_epochs = parse_number<int>(key, value);
    else if (key == "max_iterations") s.max_iterations = parse_number<int>(key, value);
    else if (key == "ll_rel_tolerance") s.ll_rel_tolerance = parse_number<double>(key, value);
    else if (key == "sweep_m") s.sweep_m = parse_list<int>(value, [&](const std::string& v) { return parse_number<int>(key, v); });
    else if (key == "random_reference") s.random_reference = parse_criterion(value);
    else if (key == "rng_seed") s.rng_seed = parse_number<std::uint64_t>(key, value);
    else if (key == "output_dir") s.output_dir = value;
    else if (key == "jobs") s.jobs = parse_number<int>(key, value);
    else if (key == "save_assignments") s.save_assignments = parse_bool(key, value);
    else if (key == "include_seeds_in_eval") s.include_seeds_in_eval = parse_bool(key, value);
    else if (key == "kappa_init") s.kappa_init = parse_number<double>(key, value);
  }
  s.validate();
  return s;
}

void ExperimentSpec::validate() const {
  if (families.empty()) throw ConfigError("families must not be empty");
  if (algorithms.empty()) throw ConfigError("algorithms must not be empty");
  const bool has_explore = std::find(algorithms.begin(), algorithms.end(), Algorithm::Exploratory) != algorithms.end();
  if (has_explore && criteria.empty()) throw ConfigError("criteria must not be empty for exploratory runs");
  if (random_reference == CriterionKind::Random) throw ConfigError("random_reference must be minmax or js");
  if (seeded_classes.empty() && num_seed_classes < 1) throw ConfigError("num_seed_classes must be positive");
  if (!(seeds_fraction > 0.0 && seeds_fraction <= 1.0)) throw ConfigError("seeds_fraction must lie in (0, 1]");
  if (num_partitions < 1) throw ConfigError("num_partitions must be positive");
  for (double p : crp_p_new) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("crp_p_new values must lie in (0, 1)");
  }
  if (crp_epochs < 1) throw ConfigError("crp_epochs must be positive");
  if (max_iterations < 1) throw ConfigError("max_iterations must be positive");
  if (!(ll_rel_tolerance > 0.0)) throw ConfigError("ll_rel_tolerance must be positive");
  const bool has_sweep = std::find(algorithms.begin(), algorithms.end(), Algorithm::SemisupSweep) != algorithms.end();
  if (has_sweep && sweep_m.empty()) throw ConfigError("sweep_m must not be empty");
  for (int m : sweep_m) {
    if (m < 0) throw ConfigError("sweep_m values must be non-negative");
  }
  if (jobs < 0) throw ConfigError("jobs must be non-negative");
  if (!(kappa_init > 0.0)) throw ConfigError("kappa_init must be positive");
}

std::string method_label(const RunCoordinates& c) {
  switch (c.algorithm) {
    case Algorithm::Exploratory:
      return "explore-" + std::string(to_string(c.criterion.value_or(CriterionKind::MinMax)));
    case Algorithm::CrpStandard:
    case Algorithm::CrpModified:
      return std::string(to_string(c.algorithm)) + "@" + format_double(c.p_new.value_or(0.0));
    default:
      return std::string(to_string(c.algorithm));
  }
}

std::vector<RunCoordinates> expand_grid(const ExperimentSpec& spec) {
  std::vector<RunCoordinates> grid;
  auto add_partitions = [&](RunCoordinates c) {
    for (int p = 0; p < spec.num_partitions; ++p) {
      c.partition = p;
      grid.push_back(c);
    }
  };
  for (Family f : spec.families) {
    for (Algorithm a : spec.algorithms) {
      RunCoordinates c;
      c.algorithm = a;
      c.family = f;
      if (a == Algorithm::Exploratory) {
        for (CriterionKind k : spec.criteria) {
          c.criterion = k;
          add_partitions(c);
        }
      } else if (a == Algorithm::CrpStandard || a == Algorithm::CrpModified) {
        for (double p : spec.crp_p_new) {
          c.p_new = p;
          add_partitions(c);
        }
      } else {
        add_partitions(c);
      }
    }
  }
  return grid;
}

std::uint64_t run_seed(std::uint64_t root, const RunCoordinates& c) {
  return derive_seed(root, {hash_string(to_string(c.family)), hash_string(method_label(c)),
                            static_cast<std::uint64_t>(c.partition)});
}

namespace {

struct GridContext {
  const ExperimentSpec& spec;
  const std::vector<SeedPartition>& partitions;
  const std::map<Family, Dataset>& data;
};

EngineConfig engine_config(const ExperimentSpec& spec, Family f, std::uint64_t seed) {
  EngineConfig cfg;
  cfg.family = f;
  cfg.selection = spec.model_selection;
  cfg.max_iterations = spec.max_iterations;
  cfg.ll_rel_tolerance = spec.ll_rel_tolerance;
  cfg.rng_seed = seed;
  cfg.model.kappa_init = spec.kappa_init;
  return cfg;
}

std::vector<TracePoint> trace_of(const RunResult& r) {
  std::vector<TracePoint> out;
  for (std::size_t t = 0; t < r.ll_trace.size(); ++t) {
    TracePoint tp;
    tp.iteration = static_cast<int>(t) + 1;
    tp.log_likelihood = r.ll_trace[t];
    tp.score = t < r.score_trace.size() ? r.score_trace[t] : std::nan("");
    tp.classes = r.class_count_trace[t];
    tp.created = r.created_trace[t];
    out.push_back(tp);
  }
  return out;
}

RunRecord execute(const GridContext& ctx, const RunCoordinates& c) {
  RunRecord rec;
  rec.coords = c;
  rec.seed = run_seed(ctx.spec.rng_seed, c);
  const auto start = std::chrono::steady_clock::now();
  try {
    const Dataset& d = ctx.data.at(c.family);
    const SeedPartition& p = ctx.partitions[static_cast<std::size_t>(c.partition)];
    const EvalOptions eval_opts{ctx.spec.include_seeds_in_eval};
    EngineConfig cfg = engine_config(ctx.spec, c.family, rec.seed);
    RunResult run;
    switch (c.algorithm) {
      case Algorithm::Exploratory: {
        cfg.criterion.kind = *c.criterion;
        cfg.criterion.rng_seed = rec.seed;
        if (*c.criterion == CriterionKind::Random) {
          RunCoordinates ref = c;
          ref.criterion = ctx.spec.random_reference;
          EngineConfig ref_cfg = engine_config(ctx.spec, c.family, run_seed(ctx.spec.rng_seed, ref));
          ref_cfg.criterion.kind = ctx.spec.random_reference;
          cfg.criterion.random_rate = exploratory_em(d, p, ref_cfg).firing_rate();
        }
        run = exploratory_em(d, p, cfg);
        rec.firing_rate = run.firing_rate();
        break;
      }
      case Algorithm::Semisup:
        run = semisup_em(d, p, cfg);
        break;
      case Algorithm::SemisupSweep: {
        const SweepResult sweep = best_extra_classes_sweep(d, p, cfg, ctx.spec.sweep_m);
        cfg.extra_classes = sweep.best_extra_classes;
        run = semisup_em(d, p, cfg);
        rec.best_extra_classes = sweep.best_extra_classes;
        break;
      }
      case Algorithm::CrpStandard:
      case Algorithm::CrpModified: {
        CrpConfig crp;
        crp.p_new = *c.p_new;
        crp.num_epochs = ctx.spec.crp_epochs;
        crp.pick = c.algorithm == Algorithm::CrpStandard ? CrpPick::Standard : CrpPick::Modified;
        crp.family = c.family;
        crp.rng_seed = rec.seed;
        crp.model = cfg.model;
        run = crp_gibbs(d, p, crp);
        break;
      }
    }
    const EvaluationReport report = evaluate_run(d, p, run.final_state, eval_opts);
    rec.seed_f1 = report.macro_f1_seed;
    rec.num_clusters = report.num_clusters;
    rec.iterations = run.iterations_run;
    rec.trace = trace_of(run);
    if (ctx.spec.save_assignments) rec.assignments = run.final_state.assignments;
  } catch (const std::exception& e) {
    rec.error = e.what();
    logger()->warn("{} {} partition {}: {}", to_string(c.family), method_label(c), c.partition, e.what());
  }
  rec.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' || ch == '\r' ? ' ' : ch;
  }
  return out + "\"";
}

std::string criterion_field(const RunCoordinates& c) {
  return c.criterion ? std::string(to_string(*c.criterion)) : "";
}

std::string pnew_field(const RunCoordinates& c) { return c.p_new ? format_double(*c.p_new) : ""; }

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

std::vector<SeedPartition> partitions_for(const ExperimentSpec& spec, const Dataset& counts) {
  PartitionConfig pc;
  pc.num_seed_classes = spec.num_seed_classes;
  pc.seeds_fraction = spec.seeds_fraction;
  pc.num_partitions = spec.num_partitions;
  pc.rng_seed = derive_seed(spec.rng_seed, {hash_string("partitions")});
  for (const auto& name : spec.seeded_classes) {
    const auto it = std::find(counts.class_names.begin(), counts.class_names.end(), name);
    if (it == counts.class_names.end()) throw ConfigError("seeded class '" + name + "' not in dataset");
    pc.seeded_classes.push_back(static_cast<ClassId>(it - counts.class_names.begin()));
  }
  return make_partitions(counts, pc);
}

}  // namespace

ExperimentReport run_grid(const ExperimentSpec& spec, const Dataset& counts, std::string dataset_name) {
  spec.validate();
  const Dataset cleaned = drop_tfidf_degenerate(counts);
  std::map<Family, Dataset> data;
  for (Family f : spec.families) data.emplace(f, featurize(cleaned, representation_for(f)));
  const auto partitions = partitions_for(spec, cleaned);
  const GridContext ctx{spec, partitions, data};

  const auto grid = expand_grid(spec);
  ExperimentReport report;
  report.dataset_name = std::move(dataset_name);
  report.records.resize(grid.size());

  std::size_t workers = spec.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                       : static_cast<std::size_t>(spec.jobs);
  workers = std::min(workers, std::max<std::size_t>(1, grid.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) report.records[i] = execute(ctx, grid[i]);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return report;
}

void write_results_csv(std::ostream& out, const ExperimentReport& report) {
  out << "dataset,algorithm,family,criterion,p_new,partition,seed_f1,clusters,iterations,firing_rate,"
         "best_extra_classes,error\n";
  for (const auto& r : report.records) {
    const auto& c = r.coords;
    out << csv_escape(report.dataset_name) << ',' << to_string(c.algorithm) << ',' << to_string(c.family) << ','
        << criterion_field(c) << ',' << pnew_field(c) << ',' << c.partition << ',';
    if (r.error.empty()) {
      out << format_double(r.seed_f1) << ',' << r.num_clusters << ',' << r.iterations << ',';
    } else {
      out << ",,,";
    }
    out << (r.firing_rate ? format_double(*r.firing_rate) : "") << ','
        << (r.best_extra_classes ? std::to_string(*r.best_extra_classes) : "") << ',' << csv_escape(r.error)
        << '\n';
  }
}

void write_timings_csv(std::ostream& out, const ExperimentReport& report) {
  out << "dataset,algorithm,family,criterion,p_new,partition,runtime_s\n";
  for (const auto& r : report.records) {
    const auto& c = r.coords;
    out << csv_escape(report.dataset_name) << ',' << to_string(c.algorithm) << ',' << to_string(c.family) << ','
        << criterion_field(c) << ',' << pnew_field(c) << ',' << c.partition << ',' << format_double(r.runtime_s)
        << '\n';
  }
}

void write_traces_csv(std::ostream& out, const ExperimentReport& report) {
  out << "dataset,algorithm,family,criterion,p_new,partition,iteration,log_likelihood,score,classes,created\n";
  for (const auto& r : report.records) {
    const auto& c = r.coords;
    for (const auto& t : r.trace) {
      out << csv_escape(report.dataset_name) << ',' << to_string(c.algorithm) << ',' << to_string(c.family) << ','
          << criterion_field(c) << ',' << pnew_field(c) << ',' << c.partition << ',' << t.iteration << ','
          << format_double(t.log_likelihood) << ',' << format_double(t.score) << ',' << t.classes << ','
          << t.created << '\n';
    }
  }
}

std::string summary_json(const ExperimentReport& report) {
  using nlohmann::ordered_json;
  // Groups keep first-appearance (grid) order.
  std::vector<std::pair<std::string, std::vector<const RunRecord*>>> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& r : report.records) {
    const std::string key = std::string(to_string(r.coords.family)) + "/" + method_label(r.coords);
    auto [it, inserted] = index.try_emplace(key, groups.size());
    if (inserted) groups.push_back({key, {}});
    groups[it->second].second.push_back(&r);
  }

  auto f1_by_partition = [](const std::vector<const RunRecord*>& rows) {
    std::map<int, double> out;
    for (const auto* r : rows) {
      if (r->error.empty()) out[r->coords.partition] = r->seed_f1;
    }
    return out;
  };

  ordered_json j;
  j["dataset"] = report.dataset_name;
  j["groups"] = ordered_json::array();
  for (const auto& [key, rows] : groups) {
    const RunCoordinates& c = rows.front()->coords;
    ordered_json g;
    g["family"] = to_string(c.family);
    g["algorithm"] = to_string(c.algorithm);
    g["method"] = method_label(c);
    if (c.criterion) g["criterion"] = to_string(*c.criterion);
    if (c.p_new) g["p_new"] = *c.p_new;
    double f1 = 0.0, clusters = 0.0, iterations = 0.0;
    std::size_t ok = 0;
    for (const auto* r : rows) {
      if (!r->error.empty()) continue;
      ++ok;
      f1 += r->seed_f1;
      clusters += static_cast<double>(r->num_clusters);
      iterations += r->iterations;
    }
    g["runs"] = rows.size();
    g["errors"] = rows.size() - ok;
    if (ok > 0) {
      g["mean_seed_f1"] = f1 / static_cast<double>(ok);
      g["mean_clusters"] = clusters / static_cast<double>(ok);
      g["mean_iterations"] = iterations / static_cast<double>(ok);
    } else {
      g["mean_seed_f1"] = nullptr;
      g["mean_clusters"] = nullptr;
      g["mean_iterations"] = nullptr;
    }

    const std::string base_key = std::string(to_string(c.family)) + "/semisup";
    if (c.algorithm != Algorithm::Semisup && index.contains(base_key)) {
      const auto mine = f1_by_partition(rows);
      const auto base = f1_by_partition(groups[index.at(base_key)].second);
      std::vector<double> a, b;
      for (const auto& [part, v] : mine) {
        if (const auto it = base.find(part); it != base.end()) {
          a.push_back(v);
          b.push_back(it->second);
        }
      }
      if (a.size() >= 2) {
        const auto sig = paired_significance(a, b);
        g["vs_semisup"] = {{"pairs", a.size()},
                           {"mean_difference", sig.mean_difference},
                           {"t_statistic", std::isfinite(sig.t_statistic) ? ordered_json(sig.t_statistic) : ordered_json(nullptr)},
                           {"p_value", sig.p_value},
                           {"marker", sig.marker}};
      }
    }
    j["groups"].push_back(std::move(g));
  }
  return j.dump(2) + "\n";
}

namespace {

void write_assignment_files(const ExperimentSpec& spec, const ExperimentReport& report, const Dataset& counts) {
  const auto dir = spec.output_dir / "assignments";
  std::filesystem::create_directories(dir);
  const Dataset cleaned = drop_tfidf_degenerate(counts);
  const auto partitions = partitions_for(spec, cleaned);
  for (const auto& r : report.records) {
    if (!r.error.empty() || r.assignments.empty()) continue;
    const SeedPartition& p = partitions[static_cast<std::size_t>(r.coords.partition)];
    std::vector<char> seed(cleaned.size(), 0);
    for (std::size_t i : p.labeled_idx) seed[i] = 1;
    std::vector<AssignmentRow> rows;
    for (std::size_t i = 0; i < cleaned.size(); ++i) {
      rows.push_back({i, cleaned.labels[i], r.assignments[i], seed[i] != 0});
    }
    std::string name = std::string(to_string(r.coords.family)) + "_" + method_label(r.coords) + "_p" +
                       std::to_string(r.coords.partition) + ".csv";
    std::replace(name.begin(), name.end(), '@', '_');
    auto out = open_output(dir / name);
    write_assignments(out, rows);
  }
}

void write_reports(const ExperimentSpec& spec, const ExperimentReport& report) {
  std::filesystem::create_directories(spec.output_dir);
  {
    auto out = open_output(spec.output_dir / "results.csv");
    write_results_csv(out, report);
  }
  {
    auto out = open_output(spec.output_dir / "timings.csv");
    write_timings_csv(out, report);
  }
  {
    auto out = open_output(spec.output_dir / "traces.csv");
    write_traces_csv(out, report);
  }
  auto out = open_output(spec.output_dir / "summary.json");
  out << summary_json(report);
}

int exit_code(const ExperimentReport& report) {
  const bool all_failed = std::all_of(report.records.begin(), report.records.end(),
                                      [](const RunRecord& r) { return !r.error.empty(); });
  return report.records.empty() || all_failed ? 1 : 0;
}

}  // namespace

int run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const Dataset counts = load_dataset(spec.dataset, spec.format, spec.vocab_size);
  const ExperimentReport report = run_grid(spec, counts, spec.dataset.stem().string());
  write_reports(spec, report);
  if (spec.save_assignments) write_assignment_files(spec, report, counts);
  logger()->info("{} runs written to {}", report.records.size(), spec.output_dir.string());
  return exit_code(report);
}

int run_pnew_sweep(ExperimentSpec spec) {
  spec.algorithms = {Algorithm::CrpStandard, Algorithm::CrpModified};
  spec.validate();
  const Dataset counts = load_dataset(spec.dataset, spec.format, spec.vocab_size);
  const ExperimentReport report = run_grid(spec, counts, spec.dataset.stem().string());
  write_reports(spec, report);

  struct Acc {
    double f1 = 0.0, clusters = 0.0;
    std::size_t n = 0;
  };
  std::map<std::tuple<std::size_t, double, int>, Acc> acc;  // family order, p_new, pick
  for (const auto& r : report.records) {
    if (!r.error.empty()) continue;
    const auto fam = static_cast<std::size_t>(
        std::find(spec.families.begin(), spec.families.end(), r.coords.family) - spec.families.begin());
    auto& a = acc[{fam, *r.coords.p_new, static_cast<int>(r.coords.algorithm)}];
    a.f1 += r.seed_f1;
    a.clusters += static_cast<double>(r.num_clusters);
    ++a.n;
  }
  auto out = open_output(spec.output_dir / "pnew_sweep.csv");
  out << "family,algorithm,p_new,runs,mean_seed_f1,mean_clusters\n";
  for (const auto& [key, a] : acc) {
    const auto& [fam, p_new, alg] = key;
    out << to_string(spec.families[fam]) << ',' << to_string(static_cast<Algorithm>(alg)) << ','
        << format_double(p_new) << ',' << a.n << ',' << format_double(a.f1 / static_cast<double>(a.n)) << ','
        << format_double(a.clusters / static_cast<double>(a.n)) << '\n';
  }
  return exit_code(report);
}

void write_assignments(std::ostream& out, const std::vector<AssignmentRow>& rows) {
  out << "index,gold,cluster,is_seed\n";
  for (const auto& r : rows) out << r.index << ',' << r.gold << ',' << r.cluster << ',' << (r.is_seed ? 1 : 0) << '\n';
}

std::vector<AssignmentRow> read_assignments(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty assignments file", 0);
  ++line_no;
  if (trim(line) != "index,gold,cluster,is_seed") throw ParseError("expected header 'index,gold,cluster,is_seed'", 1);
  std::vector<AssignmentRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(trim(f));
    if (fields.size() != 4) throw ParseError("expected 4 fields", line_no);
    try {
      AssignmentRow r;
      r.index = parse_number<std::size_t>("index", fields[0]);
      r.gold = parse_number<int>("gold", fields[1]);
      r.cluster = parse_number<int>("cluster", fields[2]);
      r.is_seed = parse_bool("is_seed", fields[3]);
      rows.push_back(r);
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return rows;
}

EvaluationReport rescore_assignments(const std::vector<AssignmentRow>& rows, const EvalOptions& options) {
  std::set<ClassId> seeded, clusters_seen;
  for (const auto& r : rows) {
    if (r.is_seed && r.gold != kNoLabel) seeded.insert(r.gold);
    if (r.cluster != kNoLabel) clusters_seen.insert(r.cluster);
  }
  std::vector<ClassId> clusters, gold;
  for (const auto& r : rows) {
    if (r.is_seed && !options.include_seeds) continue;
    if (r.gold == kNoLabel || r.cluster == kNoLabel) continue;
    clusters.push_back(r.cluster);
    gold.push_back(r.gold);
  }
  const std::vector<ClassId> seeded_ids(seeded.begin(), seeded.end());
  EvaluationReport report;
  report.per_class_prf = seed_class_prf(clusters, gold, seeded_ids);
  double total = 0.0;
  for (const auto& p : report.per_class_prf) total += p.f1;
  report.macro_f1_seed = seeded_ids.empty() ? 0.0 : total / static_cast<double>(seeded_ids.size());
  report.num_clusters = clusters_seen.size();
  if (!clusters.empty()) report.aligned_confusion = align_confusion(build_confusion(clusters, gold));
  return report;
}

}  // namespace exem
