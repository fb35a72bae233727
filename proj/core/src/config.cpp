#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "testgen/errors.hpp"
#include "testgen/harness.hpp"

namespace testgen {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string index_path(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<std::string_view> known) {
  const std::set<std::string_view> allowed(known);
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError(join(path, key), "unknown key");
  }
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  return j;
}

double read_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

std::uint64_t read_unsigned(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  throw ConfigError(path, "expected a nonnegative integer");
}

std::size_t read_positive(const json& j, const std::string& path) {
  const std::uint64_t v = read_unsigned(j, path);
  if (v == 0) throw ConfigError(path, "must be >= 1");
  return static_cast<std::size_t>(v);
}

InputSpace read_space(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of 6 dimensions");
  if (j.size() != kInputDims) {
    throw ConfigError(path, "expected exactly 6 dimensions, got " + std::to_string(j.size()));
  }
  std::vector<Dimension> dims;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = index_path(path, i);
    const json& d = require_object(j[i], p);
    reject_unknown_keys(d, p, {"name", "levels"});
    Dimension dim;
    if (!d.contains("name") || !d["name"].is_string()) {
      throw ConfigError(join(p, "name"), "expected a string");
    }
    dim.name = d["name"].get<std::string>();
    if (!d.contains("levels") || !d["levels"].is_array() || d["levels"].empty()) {
      throw ConfigError(join(p, "levels"), "expected a nonempty array of numbers");
    }
    for (std::size_t k = 0; k < d["levels"].size(); ++k) {
      const double v = read_number(d["levels"][k], index_path(join(p, "levels"), k));
      if (!dim.levels.empty() && v <= dim.levels.back()) {
        throw ConfigError(index_path(join(p, "levels"), k), "levels must be strictly increasing");
      }
      dim.levels.push_back(v);
    }
    dims.push_back(std::move(dim));
  }
  return InputSpace(std::move(dims));
}

gan::GanHyperparams read_gan(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown_keys(j, path, {"disc_epochs", "gen_epochs", "minibatch", "gen_samples_per_round"});
  gan::GanHyperparams hp;
  if (j.contains("disc_epochs")) hp.disc_epochs = read_positive(j["disc_epochs"], join(path, "disc_epochs"));
  if (j.contains("gen_epochs")) hp.gen_epochs = read_positive(j["gen_epochs"], join(path, "gen_epochs"));
  if (j.contains("minibatch")) hp.minibatch = read_positive(j["minibatch"], join(path, "minibatch"));
  if (j.contains("gen_samples_per_round")) {
    hp.gen_samples_per_round =
        read_positive(j["gen_samples_per_round"], join(path, "gen_samples_per_round"));
  }
  return hp;
}

AlgorithmConfig read_algorithm(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown_keys(j, path,
                      {"kind", "name", "budget", "warmup", "treducer", "batchsize", "dedup_floor", "gan"});
  AlgorithmConfig a;
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw ConfigError(join(path, "kind"), "expected one of random, dn, ogan");
  }
  const auto kind = parse_algorithm_kind(j["kind"].get<std::string>());
  if (!kind) throw ConfigError(join(path, "kind"), "expected one of random, dn, ogan");
  a.kind = *kind;
  if (j.contains("name")) {
    if (!j["name"].is_string() || j["name"].get<std::string>().empty()) {
      throw ConfigError(join(path, "name"), "expected a nonempty string");
    }
    a.name = j["name"].get<std::string>();
  }
  if (j.contains("budget")) a.budget = read_positive(j["budget"], join(path, "budget"));
  if (j.contains("warmup")) {
    a.warmup = static_cast<std::size_t>(read_unsigned(j["warmup"], join(path, "warmup")));
  }
  if (j.contains("treducer")) a.treducer = read_number(j["treducer"], join(path, "treducer"));
  if (j.contains("dedup_floor")) {
    a.dedup_floor = read_number(j["dedup_floor"], join(path, "dedup_floor"));
  }
  if (j.contains("batchsize")) {
    if (a.kind != AlgorithmKind::kDn) {
      throw ConfigError(join(path, "batchsize"), "only valid for kind dn");
    }
    a.batchsize = read_positive(j["batchsize"], join(path, "batchsize"));
  }
  if (j.contains("gan")) a.gan = read_gan(j["gan"], join(path, "gan"));
  return a;
}

ordered_json number_array(const std::vector<double>& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(x);
  return a;
}

}  // namespace

void validate_config(const ExperimentConfig& cfg) {
  const auto& p = cfg.sut.params;
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(p.p_idle)) throw ConfigError("sut.p_idle", "must be positive");
  if (!positive(p.kappa_big)) throw ConfigError("sut.kappa_big", "must be positive");
  if (!positive(p.kappa_little)) throw ConfigError("sut.kappa_little", "must be positive");
  if (!positive(p.gain)) throw ConfigError("sut.gain", "must be positive");
  if (cfg.sut.target_density &&
      !(*cfg.sut.target_density > 0.0 && *cfg.sut.target_density < 1.0)) {
    throw ConfigError("sut.target_density", "must lie in (0, 1)");
  }
  if (cfg.sut.command && cfg.sut.command->empty()) {
    throw ConfigError("sut.command", "must be a nonempty string");
  }
  if (!positive(cfg.fitness.p_m)) throw ConfigError("fitness.p_m", "must be positive");
  if (cfg.algorithms.empty()) throw ConfigError("algorithms", "at least one algorithm is required");
  if (cfg.runs < 1) throw ConfigError("runs", "must be >= 1");
  if (cfg.sma_window < 1) throw ConfigError("sma_window", "must be >= 1");
  if (cfg.histogram_bins < 2) throw ConfigError("histogram_bins", "must be >= 2");

  std::set<std::string> labels;
  for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
    const auto& a = cfg.algorithms[i];
    const std::string path = index_path("algorithms", i);
    if (a.budget < 1) throw ConfigError(join(path, "budget"), "must be >= 1");
    if (a.budget > cfg.space.cardinality()) {
      throw ConfigError(join(path, "budget"), "exceeds the size of the input space (" +
                                                  std::to_string(cfg.space.cardinality()) + ")");
    }
    if (a.warmup > a.budget) throw ConfigError(join(path, "warmup"), "exceeds budget");
    if (!(a.treducer > 0.0 && a.treducer < 1.0)) {
      throw ConfigError(join(path, "treducer"), "must lie in (0, 1)");
    }
    if (!(a.dedup_floor > 0.0 && a.dedup_floor <= 1.0)) {
      throw ConfigError(join(path, "dedup_floor"), "must lie in (0, 1]");
    }
    if (a.batchsize < 1) throw ConfigError(join(path, "batchsize"), "must be >= 1");
    if (cfg.sma_window > a.budget) {
      throw ConfigError("sma_window", "exceeds the budget of " + path);
    }
    if (!labels.insert(a.label()).second) {
      throw ConfigError(join(path, "name"), "duplicate algorithm name '" + a.label() + "'");
    }
  }
}

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  require_object(doc, "<root>");
  reject_unknown_keys(doc, "", {"space", "sut", "fitness", "algorithms", "runs", "master_seed",
                                "sma_window", "histogram_bins"});

  ExperimentConfig cfg;
  try {
    if (doc.contains("space")) cfg.space = read_space(doc["space"], "space");
  } catch (const ContractViolation& e) {
    throw ConfigError("space", e.what());
  }

  if (doc.contains("sut")) {
    const json& s = require_object(doc["sut"], "sut");
    reject_unknown_keys(s, "sut", {"p_idle", "kappa_big", "kappa_little", "gain",
                                   "target_density", "expected_density", "command"});
    auto& p = cfg.sut.params;
    if (s.contains("p_idle")) p.p_idle = read_number(s["p_idle"], "sut.p_idle");
    if (s.contains("kappa_big")) p.kappa_big = read_number(s["kappa_big"], "sut.kappa_big");
    if (s.contains("kappa_little")) {
      p.kappa_little = read_number(s["kappa_little"], "sut.kappa_little");
    }
    if (s.contains("gain") && s.contains("target_density")) {
      throw ConfigError("sut", "specify either gain or target_density, not both");
    }
    if (s.contains("gain")) p.gain = read_number(s["gain"], "sut.gain");
    if (s.contains("target_density")) {
      cfg.sut.target_density = read_number(s["target_density"], "sut.target_density");
    }
    if (s.contains("expected_density")) {
      cfg.sut.expected_density = read_number(s["expected_density"], "sut.expected_density");
    }
    if (s.contains("command")) {
      if (!s["command"].is_string()) throw ConfigError("sut.command", "expected a string");
      cfg.sut.command = s["command"].get<std::string>();
    }
  }

  if (doc.contains("fitness")) {
    const json& f = require_object(doc["fitness"], "fitness");
    reject_unknown_keys(f, "fitness", {"p_m"});
    if (f.contains("p_m")) cfg.fitness.p_m = read_number(f["p_m"], "fitness.p_m");
  }

  if (doc.contains("algorithms")) {
    const json& algs = doc["algorithms"];
    if (!algs.is_array()) throw ConfigError("algorithms", "expected an array");
    for (std::size_t i = 0; i < algs.size(); ++i) {
      cfg.algorithms.push_back(read_algorithm(algs[i], index_path("algorithms", i)));
    }
  } else {
    for (AlgorithmKind kind : {AlgorithmKind::kRandom, AlgorithmKind::kDn, AlgorithmKind::kOgan}) {
      AlgorithmConfig a;
      a.kind = kind;
      cfg.algorithms.push_back(a);
    }
  }

  if (doc.contains("runs")) cfg.runs = read_positive(doc["runs"], "runs");
  if (doc.contains("master_seed")) cfg.master_seed = read_unsigned(doc["master_seed"], "master_seed");
  if (doc.contains("sma_window")) cfg.sma_window = read_positive(doc["sma_window"], "sma_window");
  if (doc.contains("histogram_bins")) {
    cfg.histogram_bins = read_positive(doc["histogram_bins"], "histogram_bins");
  }

  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open configuration file");
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError(path.string(), "error while reading configuration file");
  return parse_config(text.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  ordered_json doc;
  ordered_json space = ordered_json::array();
  for (const auto& d : cfg.space.dims()) {
    space.push_back({{"name", d.name}, {"levels", number_array(d.levels)}});
  }
  doc["space"] = space;

  ordered_json sut;
  sut["p_idle"] = cfg.sut.params.p_idle;
  sut["kappa_big"] = cfg.sut.params.kappa_big;
  sut["kappa_little"] = cfg.sut.params.kappa_little;
  if (cfg.sut.target_density) {
    sut["target_density"] = *cfg.sut.target_density;
  } else {
    sut["gain"] = cfg.sut.params.gain;
  }
  if (cfg.sut.expected_density) sut["expected_density"] = *cfg.sut.expected_density;
  if (cfg.sut.command) sut["command"] = *cfg.sut.command;
  doc["sut"] = sut;
  doc["fitness"] = {{"p_m", cfg.fitness.p_m}};

  ordered_json algs = ordered_json::array();
  for (const auto& a : cfg.algorithms) {
    ordered_json entry;
    entry["kind"] = std::string(to_string(a.kind));
    if (!a.name.empty()) entry["name"] = a.name;
    entry["budget"] = a.budget;
    entry["warmup"] = a.warmup;
    entry["treducer"] = a.treducer;
    if (a.kind == AlgorithmKind::kOgan) entry["dedup_floor"] = a.dedup_floor;
    if (a.kind == AlgorithmKind::kDn) entry["batchsize"] = a.batchsize;
    if (a.kind != AlgorithmKind::kRandom) {
      entry["gan"] = {{"disc_epochs", a.gan.disc_epochs},
                      {"gen_epochs", a.gan.gen_epochs},
                      {"minibatch", a.gan.minibatch},
                      {"gen_samples_per_round", a.gan.gen_samples_per_round}};
    }
    algs.push_back(entry);
  }
  doc["algorithms"] = algs;
  doc["runs"] = cfg.runs;
  doc["master_seed"] = cfg.master_seed;
  doc["sma_window"] = cfg.sma_window;
  doc["histogram_bins"] = cfg.histogram_bins;
  return doc.dump(2);
}

}  // namespace testgen
