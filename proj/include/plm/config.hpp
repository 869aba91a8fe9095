#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "common.hpp"

namespace plm {

// Resolved run settings. Precedence: built-in command defaults < config file
// < command-line flags. A bare run reproduces the reference settings for its
// command.
struct RunConfig {
  std::string command;
  std::string mnist_path;
  std::string ckpt_path;
  std::string out_dir = "out";

  std::uint64_t seed_init = 101;
  std::uint64_t seed_split = 202;
  std::uint64_t seed_sampler = 303;
  std::uint64_t seed_dither = 404;

  double lr = 0.5;
  double lr_recall = 0.5;
  int replicas = 100;
  double dither_amplitude = 1.0;
  double dropout_rate = 0.5;
  bool dither_class_input = false;
  double recall_init_scale = 3.0;

  std::array<double, 3> bias{0.8, 0.15, 0.05};
  int epochs = 100;
  long iters = 30000;
  long eval_every = 1;

  std::string classes = "0-9";
  bool dump_originals = false;
};

// Command-specific defaults; everything else keeps the struct initializers.
inline RunConfig default_config(const std::string& command) {
  RunConfig cfg;
  cfg.command = command;
  if (command == "pretrain") {
    cfg.lr = 0.5;
    cfg.lr_recall = 20.0;
  } else if (command == "learn") {
    cfg.lr = 0.5;
    cfg.bias = {0.8, 0.15, 0.05};
    cfg.iters = 30000;
  } else if (command == "forget") {
    cfg.lr = 1.0;
    cfg.lr_recall = 1.0;
    cfg.bias = {0.99, 0.01, 0.0};
    cfg.iters = 10000;
  }
  return cfg;
}

namespace detail {

inline double parse_double(const std::string& key, const std::string& value) {
  const char* s = value.c_str();
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s || *end != '\0') throw ConfigError(key + ": not a number: '" + value + "'");
  return v;
}

inline long long parse_int(const std::string& key, const std::string& value) {
  const char* s = value.c_str();
  char* end = nullptr;
  long long v = std::strtoll(s, &end, 10);
  if (end == s || *end != '\0') throw ConfigError(key + ": not an integer: '" + value + "'");
  return v;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  const char* s = value.c_str();
  char* end = nullptr;
  unsigned long long v = std::strtoull(s, &end, 10);
  if (end == s || *end != '\0' || value.find('-') != std::string::npos)
    throw ConfigError(key + ": not an unsigned integer: '" + value + "'");
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "0" || value == "false") return false;
  if (value == "1" || value == "true") return true;
  throw ConfigError(key + ": expected 0/1/true/false, got '" + value + "'");
}

inline std::array<double, 3> parse_bias(const std::string& key, const std::string& value) {
  std::array<double, 3> out{};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    std::size_t comma = i < 2 ? value.find(',', pos) : value.size();
    if (comma == std::string::npos)
      throw ConfigError(key + ": expected three comma-separated probabilities");
    out[i] = parse_double(key, value.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

}  // namespace detail

// Applies one key=value setting; shared by the config file and CLI flags.
inline void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "mnist_path") cfg.mnist_path = value;
  else if (key == "ckpt_path") cfg.ckpt_path = value;
  else if (key == "out_dir") cfg.out_dir = value;
  else if (key == "seed_init") cfg.seed_init = parse_u64(key, value);
  else if (key == "seed_split") cfg.seed_split = parse_u64(key, value);
  else if (key == "seed_sampler") cfg.seed_sampler = parse_u64(key, value);
  else if (key == "seed_dither") cfg.seed_dither = parse_u64(key, value);
  else if (key == "seed") {
    std::uint64_t base = parse_u64(key, value);
    cfg.seed_init = base;
    cfg.seed_split = base + 1;
    cfg.seed_sampler = base + 2;
    cfg.seed_dither = base + 3;
  } else if (key == "lr") cfg.lr = parse_double(key, value);
  else if (key == "lr_recall") cfg.lr_recall = parse_double(key, value);
  else if (key == "replicas") cfg.replicas = static_cast<int>(parse_int(key, value));
  else if (key == "dither_amplitude") cfg.dither_amplitude = parse_double(key, value);
  else if (key == "dropout_rate") cfg.dropout_rate = parse_double(key, value);
  else if (key == "dither_class_input") cfg.dither_class_input = parse_bool(key, value);
  else if (key == "recall_init_scale") cfg.recall_init_scale = parse_double(key, value);
  else if (key == "bias") cfg.bias = parse_bias(key, value);
  else if (key == "epochs") cfg.epochs = static_cast<int>(parse_int(key, value));
  else if (key == "iters") cfg.iters = static_cast<long>(parse_int(key, value));
  else if (key == "eval_every") cfg.eval_every = static_cast<long>(parse_int(key, value));
  else if (key == "classes") cfg.classes = value;
  else if (key == "dump_originals") cfg.dump_originals = parse_bool(key, value);
  else throw ConfigError("unknown configuration key '" + key + "'");
}

// Flat key=value file; blank lines and lines starting with '#' are ignored;
// later keys override earlier ones.
inline void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::string text = read_file_bytes(path);
  std::size_t pos = 0;
  int lineno = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    line = line.substr(start);
    if (line[0] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    apply_key(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

inline void validate_config(const RunConfig& cfg) {
  if (cfg.replicas < 1) throw ConfigError("replicas must be >= 1");
  if (!(cfg.lr > 0) || !(cfg.lr_recall > 0)) throw ConfigError("learning rates must be positive");
  if (cfg.dither_amplitude < 0) throw ConfigError("dither_amplitude must be non-negative");
  if (cfg.dropout_rate < 0 || cfg.dropout_rate >= 1)
    throw ConfigError("dropout_rate must lie in [0,1)");
  if (cfg.recall_init_scale < 0) throw ConfigError("recall_init_scale must be non-negative");
  if (cfg.epochs < 0) throw ConfigError("epochs must be non-negative");
  if (cfg.iters < 0) throw ConfigError("iters must be non-negative");
  if (cfg.eval_every < 1) throw ConfigError("eval_every must be >= 1");
  double sum = 0.0;
  for (double p : cfg.bias) {
    if (p < 0) throw ConfigError("bias probabilities must be non-negative");
    sum += p;
  }
  if (sum < 1.0 - 1e-9 || sum > 1.0 + 1e-9)
    throw ConfigError("bias probabilities must sum to 1 (got " + fmt_shortest(sum) + ")");
}

}  // namespace plm
