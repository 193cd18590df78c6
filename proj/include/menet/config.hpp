#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "menet/corpus.hpp"
#include "menet/errors.hpp"
#include "menet/model.hpp"
#include "menet/node2vec.hpp"
#include "menet/pvdbow.hpp"

namespace menet {

// Minimal INI/TOML-style config: [section] headers, key = value lines,
// # or ; comments, everything stored as trimmed strings.
struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  static ConfigFile parse(const std::string& text) {
    ConfigFile cf;
    std::string section;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    while (std::getline(is, line)) {
      ++lineno;
      const auto hash = line.find_first_of("#;");
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw input_error("config line " + std::to_string(lineno) + ": unterminated section");
        section = trim(line.substr(1, line.size() - 2));
        cf.sections[section];
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw input_error("config line " + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
        value = value.substr(1, value.size() - 2);
      if (key.empty())
        throw input_error("config line " + std::to_string(lineno) + ": empty key");
      cf.sections[section][key] = value;
    }
    return cf;
  }

  static ConfigFile load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw input_error("cannot read config file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse(ss.str());
  }
};

namespace config_detail {

inline double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw input_error("config value for " + key + " is not a number: " + v);
  }
}

inline std::int64_t to_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const std::int64_t i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw input_error("config value for " + key + " is not an integer: " + v);
  }
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw input_error("config value for " + key + " is not a boolean: " + v);
}

}  // namespace config_detail

// Everything the pipeline stages need, with the shipped defaults.
struct PipelineConfig {
  // [paths]
  std::string input;
  std::string workdir = "work";
  std::string label_file;  // optional user_id<TAB>label lookup
  std::string split_file;  // optional externally fixed split

  // [corpus]
  std::string format = "jsonl";  // or geotext_tsv
  double validation_frac = 0.1;
  double test_frac = 0.1;

  // [features]
  std::uint64_t min_df = 40;
  size_t d_doc = 300;
  size_t d_node = 300;
  int doc_epochs = 20;
  int doc_negatives = 5;
  std::uint64_t doc_min_count = 1;
  double walk_p = 1.0;
  double walk_q = 1.0;
  int walk_length = 80;
  int walks_per_node = 10;
  int window = 10;
  int node_negatives = 5;
  int node_epochs = 5;
  std::uint32_t celebrity_threshold = 5;

  // [model]
  std::array<size_t, kViews> hidden = {150, 150, 30, 30};
  double learning_rate = 0.0001;
  double weight_decay = 0.1;
  size_t batch_size = 64;
  int max_epochs = 200;
  int patience = 10;
  double anneal_factor = 0.9;
  int anneal_every = 10;
  bool use_adam = true;

  // [run]
  std::string task = "region";  // region | state | custom; recorded, not interpreted
  std::uint64_t seed = 1;
  bool deterministic = true;
  int threads = 1;

  void apply(const ConfigFile& cf) {
    using config_detail::to_bool;
    using config_detail::to_double;
    using config_detail::to_int;
    for (const auto& [section, entries] : cf.sections) {
      for (const auto& [key, value] : entries) {
        const std::string where = section.empty() ? key : section + "." + key;
        if (section == "paths") {
          if (key == "input") input = value;
          else if (key == "workdir") workdir = value;
          else if (key == "label_file") label_file = value;
          else if (key == "split_file") split_file = value;
          else throw input_error("unknown config key: " + where);
        } else if (section == "corpus") {
          if (key == "format") format = value;
          else if (key == "validation_frac") validation_frac = to_double(where, value);
          else if (key == "test_frac") test_frac = to_double(where, value);
          else throw input_error("unknown config key: " + where);
        } else if (section == "features") {
          if (key == "min_df") min_df = static_cast<std::uint64_t>(to_int(where, value));
          else if (key == "d_doc") d_doc = static_cast<size_t>(to_int(where, value));
          else if (key == "d_node") d_node = static_cast<size_t>(to_int(where, value));
          else if (key == "doc_epochs") doc_epochs = static_cast<int>(to_int(where, value));
          else if (key == "doc_negatives") doc_negatives = static_cast<int>(to_int(where, value));
          else if (key == "doc_min_count") doc_min_count = static_cast<std::uint64_t>(to_int(where, value));
          else if (key == "p") walk_p = to_double(where, value);
          else if (key == "q") walk_q = to_double(where, value);
          else if (key == "walk_length") walk_length = static_cast<int>(to_int(where, value));
          else if (key == "walks_per_node") walks_per_node = static_cast<int>(to_int(where, value));
          else if (key == "window") window = static_cast<int>(to_int(where, value));
          else if (key == "node_negatives") node_negatives = static_cast<int>(to_int(where, value));
          else if (key == "node_epochs") node_epochs = static_cast<int>(to_int(where, value));
          else if (key == "celebrity_threshold") celebrity_threshold = static_cast<std::uint32_t>(to_int(where, value));
          else throw input_error("unknown config key: " + where);
        } else if (section == "model") {
          if (key == "hidden1") hidden[0] = static_cast<size_t>(to_int(where, value));
          else if (key == "hidden2") hidden[1] = static_cast<size_t>(to_int(where, value));
          else if (key == "hidden3") hidden[2] = static_cast<size_t>(to_int(where, value));
          else if (key == "hidden4") hidden[3] = static_cast<size_t>(to_int(where, value));
          else if (key == "learning_rate") learning_rate = to_double(where, value);
          else if (key == "weight_decay") weight_decay = to_double(where, value);
          else if (key == "batch_size") batch_size = static_cast<size_t>(to_int(where, value));
          else if (key == "max_epochs") max_epochs = static_cast<int>(to_int(where, value));
          else if (key == "patience") patience = static_cast<int>(to_int(where, value));
          else if (key == "anneal_factor") anneal_factor = to_double(where, value);
          else if (key == "anneal_every") anneal_every = static_cast<int>(to_int(where, value));
          else if (key == "optimizer") {
            if (value == "adam") use_adam = true;
            else if (value == "sgd") use_adam = false;
            else throw input_error("unknown optimizer: " + value);
          }
          else throw input_error("unknown config key: " + where);
        } else if (section == "run") {
          if (key == "task") task = value;
          else if (key == "seed") seed = static_cast<std::uint64_t>(to_int(where, value));
          else if (key == "deterministic") deterministic = to_bool(where, value);
          else if (key == "threads") threads = static_cast<int>(to_int(where, value));
          else throw input_error("unknown config key: " + where);
        } else {
          throw input_error("unknown config section: " + section);
        }
      }
    }
    if (format != "jsonl" && format != "geotext_tsv")
      throw input_error("unknown corpus format: " + format);
  }

  static PipelineConfig from_file(const std::string& path) {
    PipelineConfig cfg;
    cfg.apply(ConfigFile::load(path));
    return cfg;
  }

  int effective_threads() const { return deterministic ? 1 : std::max(threads, 1); }

  InputFormat input_format() const {
    return format == "jsonl" ? InputFormat::jsonl : InputFormat::geotext_tsv;
  }

  PvdbowConfig pvdbow_config() const {
    PvdbowConfig c;
    c.dim = d_doc;
    c.epochs = doc_epochs;
    c.negatives = doc_negatives;
    c.min_count = doc_min_count;
    c.seed = derive_seed(seed, 11);
    c.threads = effective_threads();
    return c;
  }

  WalkConfig walk_config() const {
    WalkConfig c;
    c.p = walk_p;
    c.q = walk_q;
    c.walk_length = walk_length;
    c.walks_per_node = walks_per_node;
    c.seed = derive_seed(seed, 12);
    return c;
  }

  Node2vecConfig node2vec_config() const {
    Node2vecConfig c;
    c.dim = d_node;
    c.window = window;
    c.negatives = node_negatives;
    c.epochs = node_epochs;
    c.seed = derive_seed(seed, 13);
    c.threads = effective_threads();
    return c;
  }

  MenetConfig model_config(size_t n_classes) const {
    MenetConfig c;
    c.hidden = hidden;
    c.n_classes = n_classes;
    c.learning_rate = learning_rate;
    c.weight_decay = weight_decay;
    c.batch_size = batch_size;
    c.max_epochs = max_epochs;
    c.patience = patience;
    c.anneal_factor = anneal_factor;
    c.anneal_every = anneal_every;
    c.use_adam = use_adam;
    c.seed = derive_seed(seed, 14);
    return c;
  }
};

}  // namespace menet
