#include "exem/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "exem/error.hpp"
#include "exem/log.hpp"
#include "exem/rng.hpp"

namespace exem {

std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    if (auto existing = spdlog::get("exem")) return existing;
    auto l = spdlog::stderr_color_mt("exem");
    l->set_pattern("[%l] %v");
    return l;
  }();
  return instance;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_uint(std::string_view s, std::uint64_t& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

class LabelDictionary {
 public:
  ClassId intern(const std::string& name) {
    if (name == kMissingLabelToken) return kNoLabel;
    auto [it, inserted] = ids_.try_emplace(name, static_cast<ClassId>(names_.size()));
    if (inserted) names_.push_back(name);
    return it->second;
  }
  std::vector<std::string> release() { return std::move(names_); }

 private:
  std::unordered_map<std::string, ClassId> ids_;
  std::vector<std::string> names_;
};

}  // namespace

std::vector<std::size_t> Dataset::class_sizes() const {
  std::vector<std::size_t> sizes(num_classes(), 0);
  for (ClassId y : labels) {
    if (y != kNoLabel) ++sizes[static_cast<std::size_t>(y)];
  }
  return sizes;
}

void Dataset::validate() const {
  if (instances.empty()) throw ContractViolation("dataset has no instances");
  if (labels.size() != instances.size() || instance_ids.size() != instances.size()) {
    throw ContractViolation("dataset field lengths disagree");
  }
  if (vocab_size == 0) throw ContractViolation("vocab_size must be positive");
  for (const auto& x : instances) {
    if (x.extent() > vocab_size) throw ContractViolation("feature id outside vocabulary");
  }
  for (ClassId y : labels) {
    if (y != kNoLabel && (y < 0 || static_cast<std::size_t>(y) >= num_classes())) {
      throw ContractViolation("label id outside class dictionary");
    }
  }
}

Dataset read_sparse_triplet(std::istream& in, std::optional<std::size_t> vocab_size) {
  Dataset d;
  LabelDictionary dict;
  std::size_t max_extent = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;

    std::istringstream tokens{std::string(view)};
    std::string label;
    tokens >> label;
    std::vector<SparseEntry> entries;
    std::string tok;
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw ParseError("expected <fid>:<count>, got '" + tok + "'", lineno);
      std::uint64_t fid = 0;
      double count = 0.0;
      if (!parse_uint(std::string_view(tok).substr(0, colon), fid)) {
        throw ParseError("bad feature id in '" + tok + "'", lineno);
      }
      if (!parse_double(std::string_view(tok).substr(colon + 1), count) || !std::isfinite(count)) {
        throw ParseError("bad count in '" + tok + "'", lineno);
      }
      if (count < 0.0) throw ParseError("negative count in '" + tok + "'", lineno);
      if (vocab_size && fid >= *vocab_size) {
        throw BoundsError("line " + std::to_string(lineno) + ": feature id " + std::to_string(fid) +
                          " >= vocab_size " + std::to_string(*vocab_size));
      }
      if (fid > std::numeric_limits<FeatureId>::max()) throw ParseError("feature id too large", lineno);
      entries.push_back({static_cast<FeatureId>(fid), count});
    }
    SparseVector x = SparseVector::from_entries(std::move(entries));
    max_extent = std::max(max_extent, x.extent());
    d.labels.push_back(dict.intern(label));
    d.instances.push_back(std::move(x));
    d.instance_ids.push_back(std::to_string(lineno));
  }
  if (d.instances.empty()) throw ParseError("no instances", 0);
  d.class_names = dict.release();
  d.vocab_size = vocab_size.value_or(std::max<std::size_t>(max_extent, 1));
  return d;
}

Dataset read_dense_csv(std::istream& in) {
  Dataset d;
  LabelDictionary dict;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = view.find(',', start);
      fields.push_back(trim(view.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() < 2) throw ParseError("expected label and at least one feature column", lineno);
    double probe = 0.0;
    if (first && !parse_double(fields[1], probe)) {
      first = false;
      continue;  // header row
    }
    first = false;
    if (width == 0) width = fields.size() - 1;
    if (fields.size() - 1 != width) throw ParseError("inconsistent column count", lineno);
    std::vector<SparseEntry> entries;
    for (std::size_t j = 1; j < fields.size(); ++j) {
      double v = 0.0;
      if (!parse_double(fields[j], v) || !std::isfinite(v)) {
        throw ParseError("bad numeric field '" + std::string(fields[j]) + "'", lineno);
      }
      if (v < 0.0) throw ParseError("negative count", lineno);
      if (v != 0.0) entries.push_back({static_cast<FeatureId>(j - 1), v});
    }
    d.labels.push_back(dict.intern(std::string(fields[0])));
    d.instances.push_back(SparseVector::from_entries(std::move(entries)));
    d.instance_ids.push_back(std::to_string(lineno));
  }
  if (d.instances.empty()) throw ParseError("no instances", 0);
  d.class_names = dict.release();
  d.vocab_size = width;
  return d;
}

Dataset load_dataset(const std::filesystem::path& path, InputFormat format,
                     std::optional<std::size_t> vocab_size) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset file " + path.string());
  Dataset d = format == InputFormat::SparseTriplet ? read_sparse_triplet(in, vocab_size) : read_dense_csv(in);
  if (format == InputFormat::DenseCsv && vocab_size && *vocab_size != d.vocab_size) {
    throw BoundsError("dense-csv column count does not match declared vocab_size");
  }
  return d;
}

void write_sparse_triplet(std::ostream& out, const Dataset& d) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const ClassId y = d.labels[i];
    out << (y == kNoLabel ? std::string(kMissingLabelToken) : d.class_names[static_cast<std::size_t>(y)]);
    for (const auto& e : d.instances[i].entries()) out << ' ' << e.id << ':' << e.weight;
    out << '\n';
  }
  out.precision(old_precision);
}

void write_label_map(std::ostream& out, const Dataset& d) {
  out << "class_id,label\n";
  for (std::size_t c = 0; c < d.class_names.size(); ++c) out << c << ',' << d.class_names[c] << '\n';
}

Dataset tfidf_weight(const Dataset& d) {
  std::vector<std::size_t> df(d.vocab_size, 0);
  for (const auto& x : d.instances) {
    for (const auto& e : x.entries()) {
      if (e.weight < 0.0) throw ContractViolation("tf-idf requires non-negative counts");
      ++df[e.id];
    }
  }
  const double n = static_cast<double>(d.size());
  std::vector<double> idf(d.vocab_size, 0.0);
  for (std::size_t t = 0; t < d.vocab_size; ++t) {
    if (df[t] > 0) idf[t] = std::log(n / static_cast<double>(df[t]));
  }
  Dataset out = d;
  for (auto& x : out.instances) {
    std::vector<SparseEntry> entries;
    entries.reserve(x.nnz());
    for (const auto& e : x.entries()) {
      if (df[e.id] == d.size()) continue;  // ln(N/N) = 0
      entries.push_back({e.id, e.weight * idf[e.id]});
    }
    x = SparseVector::from_entries(std::move(entries));
  }
  return out;
}

SparseVector normalize(const SparseVector& x, Norm norm) {
  const double z = norm == Norm::L1 ? x.l1_norm() : x.l2_norm();
  if (x.empty() || z == 0.0) throw NumericalError("degenerate instance");
  return x.scaled(1.0 / z);
}

Dataset drop_tfidf_degenerate(const Dataset& d) {
  const Dataset weighted = tfidf_weight(d);
  Dataset out;
  out.class_names = d.class_names;
  out.vocab_size = d.vocab_size;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (weighted.instances[i].empty()) {
      ++dropped;
      continue;
    }
    out.instances.push_back(d.instances[i]);
    out.labels.push_back(d.labels[i]);
    out.instance_ids.push_back(d.instance_ids[i]);
  }
  if (dropped > 0) {
    logger()->warn("dropped {} instance(s) that are all-zero after tf-idf weighting", dropped);
  }
  if (out.instances.empty()) throw Error("no instances left after tf-idf weighting");
  if (dropped > 0) return drop_tfidf_degenerate(out);  // document frequencies shift with N
  return out;
}

Dataset featurize(const Dataset& counts, Representation rep) {
  if (rep == Representation::RawCounts) return counts;
  Dataset out = tfidf_weight(counts);
  const Norm norm = rep == Representation::TfidfL1 ? Norm::L1 : Norm::L2;
  for (auto& x : out.instances) x = normalize(x, norm);
  return out;
}

void SeedPartition::validate(const Dataset& d) const {
  std::vector<char> seen(d.size(), 0);
  auto mark = [&](std::size_t i) {
    if (i >= d.size()) throw ContractViolation("partition index outside dataset");
    if (seen[i]) throw ContractViolation("instance appears twice in partition");
    seen[i] = 1;
  };
  for (std::size_t i : labeled_idx) {
    mark(i);
    if (!std::binary_search(seeded_class_ids.begin(), seeded_class_ids.end(), d.labels[i])) {
      throw ContractViolation("labeled instance outside the seeded classes");
    }
  }
  for (std::size_t i : unlabeled_idx) mark(i);
  if (labeled_idx.size() + unlabeled_idx.size() != d.size()) {
    throw ContractViolation("partition does not cover every instance");
  }
}

std::vector<ClassId> choose_seed_classes(const Dataset& d, const PartitionConfig& cfg) {
  const auto sizes = d.class_sizes();
  std::vector<ClassId> chosen;
  if (!cfg.seeded_classes.empty()) {
    chosen = cfg.seeded_classes;
    for (ClassId c : chosen) {
      if (c < 0 || static_cast<std::size_t>(c) >= sizes.size()) throw ConfigError("unknown seeded class id");
    }
  } else {
    if (cfg.num_seed_classes < 0 || static_cast<std::size_t>(cfg.num_seed_classes) > sizes.size()) {
      throw ConfigError("num_seed_classes exceeds the number of gold classes");
    }
    std::vector<ClassId> order(sizes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](ClassId a, ClassId b) {
      return sizes[static_cast<std::size_t>(a)] > sizes[static_cast<std::size_t>(b)];
    });
    chosen.assign(order.begin(), order.begin() + cfg.num_seed_classes);
  }
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  for (ClassId c : chosen) {
    if (sizes[static_cast<std::size_t>(c)] == 0) {
      throw ConfigError("seeded class '" + d.class_names[static_cast<std::size_t>(c)] + "' has no instances");
    }
  }
  return chosen;
}

std::vector<SeedPartition> make_partitions(const Dataset& d, const PartitionConfig& cfg) {
  if (!(cfg.seeds_fraction > 0.0 && cfg.seeds_fraction < 1.0)) {
    throw ConfigError("seeds_fraction must lie in (0, 1)");
  }
  if (cfg.num_partitions < 1) throw ConfigError("num_partitions must be positive");
  const auto seeded = choose_seed_classes(d, cfg);

  std::vector<std::vector<std::size_t>> members(d.num_classes());
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.labels[i] != kNoLabel) members[static_cast<std::size_t>(d.labels[i])].push_back(i);
  }

  std::vector<SeedPartition> out;
  out.reserve(static_cast<std::size_t>(cfg.num_partitions));
  for (int p = 0; p < cfg.num_partitions; ++p) {
    SeedPartition part;
    part.seeded_class_ids = seeded;
    part.rng_seed = derive_seed(cfg.rng_seed, {static_cast<std::uint64_t>(p)});
    Rng rng(part.rng_seed);
    std::vector<char> labeled(d.size(), 0);
    for (ClassId c : seeded) {
      auto pool = members[static_cast<std::size_t>(c)];
      const double want = std::ceil(cfg.seeds_fraction * static_cast<double>(pool.size()) - 1e-9);
      const std::size_t take = std::clamp<std::size_t>(static_cast<std::size_t>(want), 1, pool.size());
      // Partial Fisher-Yates: the first `take` slots become a uniform sample.
      for (std::size_t j = 0; j < take; ++j) {
        std::swap(pool[j], pool[j + rng.below(pool.size() - j)]);
        labeled[pool[j]] = 1;
      }
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
      (labeled[i] ? part.labeled_idx : part.unlabeled_idx).push_back(i);
    }
    out.push_back(std::move(part));
  }
  return out;
}

SeedPartition supervised_partition(const Dataset& d, std::vector<ClassId> seeded_classes) {
  SeedPartition part;
  std::sort(seeded_classes.begin(), seeded_classes.end());
  part.seeded_class_ids = std::move(seeded_classes);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const bool seeded = std::binary_search(part.seeded_class_ids.begin(), part.seeded_class_ids.end(), d.labels[i]);
    (seeded ? part.labeled_idx : part.unlabeled_idx).push_back(i);
  }
  return part;
}

}  // namespace exem
