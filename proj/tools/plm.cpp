// plm: storage/recall network pair under perpetual stochastic gradient
// descent, with the selective learning and selective forgetting experiment
// drivers and their artifact emission.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "plm/plm.hpp"

namespace fs = std::filesystem;
using namespace plm;

namespace {

void usage(std::ostream& os) {
  os << "usage: plm <command> [flags]\n"
        "\n"
        "commands:\n"
        "  pretrain     train a fresh pair on the 75 images; writes a checkpoint\n"
        "  learn        selective-learning run from scratch; writes curves\n"
        "  forget       selectively-biased PSGD from a checkpoint; writes curves\n"
        "  recall-dump  synthesize classes from a checkpoint into PGM images\n"
        "  eval         report per-group and recall-fidelity errors of a checkpoint\n"
        "\n"
        "flags (defaults in parentheses; config file keys use the same names):\n"
        "  --config <file>            flat key=value config, applied before flags\n"
        "  --mnist <dir|file>         IDX image file or its directory\n"
        "  --ckpt <file>              checkpoint path (pretrain writes, others read)\n"
        "  --out <dir>                artifact directory (out)\n"
        "  --seed <n>                 base seed; sets the four seeds below to n..n+3\n"
        "  --seed-init/--seed-split/--seed-sampler/--seed-dither <n>\n"
        "  --lr <f> --lr-recall <f>   learning rates (pretrain 0.5/20, forget 1/1)\n"
        "  --replicas <n>             dither replicas per step (100)\n"
        "  --dither <f>               dither peak-to-peak amplitude (1.0)\n"
        "  --dropout <f>              hidden dropout rate (0.5)\n"
        "  --dither-class-input <0|1> dither the recall net's class input (0)\n"
        "  --recall-init-scale <f>    recall first-layer init half-width (3; 0=standard)\n"
        "  --bias <a,b,c>             group probabilities (learn .8,.15,.05; forget .99,.01,0)\n"
        "  --epochs <n>               pretraining sweeps (100)\n"
        "  --iters <n>                run length (learn 30000, forget 10000)\n"
        "  --eval-every <n>           evaluation cadence in iterations (1)\n"
        "  --classes <spec>           recall-dump classes, e.g. 0-9 or 3,17,42 (0-9)\n"
        "  --originals                also dump the original images (needs --mnist)\n";
}

std::string flag_to_key(const std::string& flag) {
  static const std::pair<const char*, const char*> table[] = {
      {"--mnist", "mnist_path"},
      {"--ckpt", "ckpt_path"},
      {"--out", "out_dir"},
      {"--seed", "seed"},
      {"--seed-init", "seed_init"},
      {"--seed-split", "seed_split"},
      {"--seed-sampler", "seed_sampler"},
      {"--seed-dither", "seed_dither"},
      {"--lr", "lr"},
      {"--lr-recall", "lr_recall"},
      {"--replicas", "replicas"},
      {"--dither", "dither_amplitude"},
      {"--dropout", "dropout_rate"},
      {"--dither-class-input", "dither_class_input"},
      {"--recall-init-scale", "recall_init_scale"},
      {"--bias", "bias"},
      {"--epochs", "epochs"},
      {"--iters", "iters"},
      {"--eval-every", "eval_every"},
      {"--classes", "classes"},
  };
  for (const auto& [f, k] : table)
    if (flag == f) return k;
  return "";
}

RunConfig parse_args(const std::string& cmd, const std::vector<std::string>& args) {
  RunConfig cfg = default_config(cmd);
  for (std::size_t i = 0; i < args.size(); ++i)
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a file argument");
      apply_config_file(cfg, args[i + 1]);
    }
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config") {
      ++i;
      continue;
    }
    if (a == "--originals") {
      cfg.dump_originals = true;
      continue;
    }
    std::string key = flag_to_key(a);
    if (key.empty()) throw ConfigError("unknown flag '" + a + "'");
    if (i + 1 >= args.size()) throw ConfigError(a + " needs an argument");
    apply_key(cfg, key, args[++i]);
  }
  validate_config(cfg);
  return cfg;
}

std::string resolve_mnist(const RunConfig& cfg) {
  if (cfg.mnist_path.empty()) throw ConfigError(cfg.command + " requires --mnist");
  fs::path p(cfg.mnist_path);
  if (fs::is_directory(p)) p /= "train-images-idx3-ubyte";
  return p.string();
}

void ensure_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.out_dir);
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  return (fs::path(cfg.out_dir) / name).string();
}

std::vector<int> parse_classes(const std::string& spec) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    std::size_t comma = spec.find(',', pos);
    std::string tok = spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    pos = comma == std::string::npos ? spec.size() + 1 : comma + 1;
    if (tok.empty()) throw ConfigError("classes: empty entry in '" + spec + "'");
    std::size_t dash = tok.find('-');
    long lo, hi;
    if (dash == std::string::npos) {
      lo = hi = detail::parse_int("classes", tok);
    } else {
      lo = detail::parse_int("classes", tok.substr(0, dash));
      hi = detail::parse_int("classes", tok.substr(dash + 1));
    }
    if (lo < 0 || hi >= kClassCount || lo > hi)
      throw RangeError("classes: '" + tok + "' outside 0.." + std::to_string(kClassCount - 1));
    for (long c = lo; c <= hi; ++c) out.push_back(static_cast<int>(c));
  }
  return out;
}

std::string pgm_name(const std::string& prefix, int cls) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%03d.pgm", prefix.c_str(), cls);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void emit_curves(const RunConfig& cfg, const MetricsLog& log) {
  ensure_out_dir(cfg);
  std::string csv = out_path(cfg, "curves.csv");
  write_csv(log, csv);
  std::vector<std::pair<std::string, std::string>> artifacts{{"curves_csv", csv}};
  if (!log.empty()) {
    std::string svg = out_path(cfg, "curves.svg");
    render_svg(log, cfg.bias, svg);
    artifacts.emplace_back("curves_svg", svg);
  }
  write_manifest(cfg, artifacts, out_path(cfg, "manifest.txt"));
}

int cmd_pretrain(RunConfig cfg) {
  Timer timer;
  Dataset75 data = load_dataset(resolve_mnist(cfg));
  ensure_out_dir(cfg);
  if (cfg.ckpt_path.empty()) cfg.ckpt_path = out_path(cfg, "plm.ckpt");
  PlmPair plm = make_plm(cfg);
  pretrain(plm, data, cfg);
  save_checkpoint(plm, cfg.ckpt_path);
  write_manifest(cfg, {{"checkpoint", cfg.ckpt_path}}, out_path(cfg, "manifest.txt"));
  std::cout << "storage_err=" << storage_errors(plm.storage, data) << "/" << kClassCount
            << " recall_err=" << recall_errors(plm) << "/" << kClassCount << "\n";
  std::cout << "elapsed_s=" << fmt_fixed(timer.seconds(), 1) << "\n";
  return 0;
}

int cmd_learn(const RunConfig& cfg) {
  Timer timer;
  Dataset75 data = load_dataset(resolve_mnist(cfg));
  GroupAssignment groups = split_groups(cfg.seed_split);
  MetricsLog log;
  try {
    run_selective_learning(data, groups, cfg, log);
  } catch (const NumericError&) {
    emit_curves(cfg, log);  // partial log is still flushed
    throw;
  }
  emit_curves(cfg, log);
  std::cout << "rows=" << log.size() << " final_iteration=" << (log.empty() ? 0 : log.back().iteration)
            << "\n";
  std::cout << "elapsed_s=" << fmt_fixed(timer.seconds(), 1) << "\n";
  return 0;
}

int cmd_forget(const RunConfig& cfg) {
  Timer timer;
  Dataset75 data = load_dataset(resolve_mnist(cfg));
  if (cfg.ckpt_path.empty()) throw ConfigError("forget requires --ckpt");
  PlmPair plm = load_plm_checkpoint(cfg.ckpt_path);
  GroupAssignment groups = split_groups(cfg.seed_split);
  MetricsLog log;
  try {
    run_selective_forgetting(plm, data, groups, cfg, log);
  } catch (const NumericError&) {
    emit_curves(cfg, log);
    throw;
  }
  emit_curves(cfg, log);
  std::cout << "rows=" << log.size() << "\n";
  std::cout << "elapsed_s=" << fmt_fixed(timer.seconds(), 1) << "\n";
  return 0;
}

int cmd_recall_dump(const RunConfig& cfg) {
  if (cfg.ckpt_path.empty()) throw ConfigError("recall-dump requires --ckpt");
  PlmPair plm = load_plm_checkpoint(cfg.ckpt_path);
  std::vector<int> classes = parse_classes(cfg.classes);
  ensure_out_dir(cfg);
  std::vector<std::pair<std::string, std::string>> artifacts;
  for (int cls : classes) {
    std::string path = out_path(cfg, pgm_name("recall", cls));
    export_image_pgm(synthesize(plm.recall, cls), path);
    artifacts.emplace_back(pgm_name("recall", cls), path);
  }
  if (cfg.dump_originals) {
    Dataset75 data = load_dataset(resolve_mnist(cfg));
    for (int cls : classes) {
      std::string path = out_path(cfg, pgm_name("original", cls));
      export_image_pgm(data.image(cls), path);
      artifacts.emplace_back(pgm_name("original", cls), path);
    }
  }
  write_manifest(cfg, artifacts, out_path(cfg, "manifest.txt"));
  std::cout << "dumped=" << artifacts.size() << "\n";
  return 0;
}

int cmd_eval(const RunConfig& cfg) {
  Dataset75 data = load_dataset(resolve_mnist(cfg));
  if (cfg.ckpt_path.empty()) throw ConfigError("eval requires --ckpt");
  PlmPair plm = load_plm_checkpoint(cfg.ckpt_path);
  GroupAssignment groups = split_groups(cfg.seed_split);
  auto e = evaluate_groups(plm.storage, data, groups);
  std::cout << "err_g1=" << fmt_fixed(e[0], 6) << " err_g2=" << fmt_fixed(e[1], 6)
            << " err_g3=" << fmt_fixed(e[2], 6) << "\n";
  std::cout << "storage_err=" << storage_errors(plm.storage, data) << "/" << kClassCount
            << " recall_err=" << recall_errors(plm) << "/" << kClassCount << "\n";
  ensure_out_dir(cfg);
  write_manifest(cfg, {}, out_path(cfg, "manifest.txt"));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
    usage(args.empty() ? std::cerr : std::cout);
    return args.empty() ? 2 : 0;
  }
  std::string cmd = args[0];
  args.erase(args.begin());
  try {
    RunConfig cfg = parse_args(cmd, args);
    if (cmd == "pretrain") return cmd_pretrain(cfg);
    if (cmd == "learn") return cmd_learn(cfg);
    if (cmd == "forget") return cmd_forget(cfg);
    if (cmd == "recall-dump") return cmd_recall_dump(cfg);
    if (cmd == "eval") return cmd_eval(cfg);
    std::cerr << "error: unknown command '" << cmd << "'\n";
    usage(std::cerr);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const RangeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
