#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "config.hpp"
#include "engine.hpp"

namespace plm {

inline void write_text_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  f.flush();
  if (!f) throw IoError("write failed on " + path);
}

// Header plus one row per log entry; errors at 6 decimal places, LF endings.
inline std::string csv_bytes(const MetricsLog& log) {
  std::string s = "iteration,err_g1,err_g2,err_g3\n";
  for (const auto& row : log) {
    s += std::to_string(row.iteration);
    for (double e : row.err) {
      s += ',';
      s += fmt_fixed(e, 6);
    }
    s += '\n';
  }
  return s;
}

inline void write_csv(const MetricsLog& log, const std::string& path) {
  write_text_file(path, csv_bytes(log));
}

inline MetricsLog parse_csv(const std::string& bytes) {
  MetricsLog log;
  std::size_t pos = bytes.find('\n');
  if (pos == std::string::npos || bytes.substr(0, pos) != "iteration,err_g1,err_g2,err_g3")
    throw FormatError("metrics csv: bad header");
  ++pos;
  while (pos < bytes.size()) {
    std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string::npos) throw FormatError("metrics csv: missing final newline");
    std::string line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    MetricsRow row{};
    std::size_t p = 0;
    std::size_t comma = line.find(',');
    if (comma == std::string::npos) throw FormatError("metrics csv: short row");
    try {
      row.iteration = detail::parse_int("iteration", line.substr(0, comma));
      p = comma + 1;
      for (int i = 0; i < 3; ++i) {
        comma = i < 2 ? line.find(',', p) : line.size();
        if (comma == std::string::npos) throw FormatError("metrics csv: short row");
        row.err[i] = detail::parse_double("err", line.substr(p, comma - p));
        p = comma + 1;
      }
    } catch (const ConfigError& e) {
      throw FormatError("metrics csv: " + std::string(e.what()));
    }
    log.push_back(row);
  }
  return log;
}

// Standalone SVG: three per-group polylines over an iteration/error-rate
// frame, error 0 at the axis bottom and 1 at the top, with a legend naming
// the group probabilities. Byte output is deterministic for a given log.
inline std::string svg_bytes(const MetricsLog& log, const std::array<double, 3>& bias) {
  if (log.empty()) throw RangeError("render_svg: need at least one row");
  constexpr double W = 960, H = 600;
  constexpr double x0 = 70, x1 = 930, y0 = 560, y1 = 40;  // plot frame; y0 = error 0
  const char* colors[3] = {"#d62728", "#2ca02c", "#1f77b4"};

  long it_first = log.front().iteration;
  long it_last = log.back().iteration;
  double span = it_last > it_first ? double(it_last - it_first) : 1.0;
  auto X = [&](long it) { return x0 + (double(it - it_first) / span) * (x1 - x0); };
  auto Y = [&](double e) { return y0 - e * (y0 - y1); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_fixed(W, 0) + "\" height=\"" +
       fmt_fixed(H, 0) + "\" viewBox=\"0 0 960 600\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"960\" height=\"600\" fill=\"#ffffff\"/>\n";
  // frame
  s += "<line x1=\"70\" y1=\"560\" x2=\"930\" y2=\"560\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  s += "<line x1=\"70\" y1=\"40\" x2=\"70\" y2=\"560\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  // y ticks every 0.2 error
  for (int k = 0; k <= 5; ++k) {
    double e = k / 5.0;
    std::string y = fmt_fixed(Y(e), 2);
    s += "<line x1=\"64\" y1=\"" + y + "\" x2=\"70\" y2=\"" + y +
         "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    s += "<text x=\"58\" y=\"" + fmt_fixed(Y(e) + 4, 2) +
         "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"end\">" + fmt_fixed(e, 1) +
         "</text>\n";
  }
  // x ticks at quarters of the iteration range
  for (int k = 0; k <= 4; ++k) {
    long it = it_first + static_cast<long>((double(it_last - it_first) * k) / 4.0 + 0.5);
    std::string x = fmt_fixed(X(it), 2);
    s += "<line x1=\"" + x + "\" y1=\"560\" x2=\"" + x +
         "\" y2=\"566\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    s += "<text x=\"" + x +
         "\" y=\"582\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" +
         std::to_string(it) + "</text>\n";
  }
  s += "<text x=\"500\" y=\"598\" font-family=\"sans-serif\" font-size=\"14\" "
       "text-anchor=\"middle\">iteration</text>\n";
  s += "<text x=\"20\" y=\"300\" font-family=\"sans-serif\" font-size=\"14\" "
       "text-anchor=\"middle\" transform=\"rotate(-90 20 300)\">error rate</text>\n";
  // curves
  for (int g = 0; g < 3; ++g) {
    s += "<polyline fill=\"none\" stroke=\"";
    s += colors[g];
    s += "\" stroke-width=\"1.5\" points=\"";
    for (const auto& row : log) {
      s += fmt_fixed(X(row.iteration), 2);
      s += ',';
      s += fmt_fixed(Y(row.err[g]), 2);
      s += ' ';
    }
    if (s.back() == ' ') s.pop_back();
    s += "\"/>\n";
  }
  // legend
  for (int g = 0; g < 3; ++g) {
    std::string y = std::to_string(58 + 20 * g);
    s += "<line x1=\"760\" y1=\"" + y + "\" x2=\"790\" y2=\"" + y + "\" stroke=\"";
    s += colors[g];
    s += "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"796\" y=\"" + std::to_string(62 + 20 * g) +
         "\" font-family=\"sans-serif\" font-size=\"13\">group " + std::to_string(g + 1) +
         " (p=" + fmt_fixed(bias[g], 2) + ")</text>\n";
  }
  s += "</svg>\n";
  return s;
}

inline void render_svg(const MetricsLog& log, const std::array<double, 3>& bias,
                       const std::string& path) {
  write_text_file(path, svg_bytes(log, bias));
}

// Flat key=value manifest: the fully resolved configuration plus an FNV-1a64
// checksum per artifact. Contains nothing time- or host-dependent, so two
// identically configured runs write byte-identical manifests.
inline std::string manifest_bytes(const RunConfig& cfg,
                                  const std::vector<std::pair<std::string, std::string>>& artifacts) {
  std::string s;
  s += "tool=plm " + std::string(kVersion) + "\n";
  s += "command=" + cfg.command + "\n";
  s += "mnist_path=" + cfg.mnist_path + "\n";
  s += "ckpt_path=" + cfg.ckpt_path + "\n";
  s += "out_dir=" + cfg.out_dir + "\n";
  s += "seed_init=" + std::to_string(cfg.seed_init) + "\n";
  s += "seed_split=" + std::to_string(cfg.seed_split) + "\n";
  s += "seed_sampler=" + std::to_string(cfg.seed_sampler) + "\n";
  s += "seed_dither=" + std::to_string(cfg.seed_dither) + "\n";
  s += "lr=" + fmt_shortest(cfg.lr) + "\n";
  s += "lr_recall=" + fmt_shortest(cfg.lr_recall) + "\n";
  s += "replicas=" + std::to_string(cfg.replicas) + "\n";
  s += "dither_amplitude=" + fmt_shortest(cfg.dither_amplitude) + "\n";
  s += "dropout_rate=" + fmt_shortest(cfg.dropout_rate) + "\n";
  s += "dither_class_input=" + std::string(cfg.dither_class_input ? "1" : "0") + "\n";
  s += "recall_init_scale=" + fmt_shortest(cfg.recall_init_scale) + "\n";
  s += "bias=" + fmt_shortest(cfg.bias[0]) + "," + fmt_shortest(cfg.bias[1]) + "," +
       fmt_shortest(cfg.bias[2]) + "\n";
  s += "epochs=" + std::to_string(cfg.epochs) + "\n";
  s += "iters=" + std::to_string(cfg.iters) + "\n";
  s += "eval_every=" + std::to_string(cfg.eval_every) + "\n";
  s += "classes=" + cfg.classes + "\n";
  s += "dump_originals=" + std::string(cfg.dump_originals ? "1" : "0") + "\n";
  for (const auto& [name, path] : artifacts) {
    std::string base = path;
    std::size_t slash = base.find_last_of('/');
    if (slash != std::string::npos) base = base.substr(slash + 1);
    s += "artifact." + name + ".file=" + base + "\n";
    s += "artifact." + name + ".fnv1a64=" + to_hex64(fnv1a64(read_file_bytes(path))) + "\n";
  }
  return s;
}

inline void write_manifest(const RunConfig& cfg,
                           const std::vector<std::pair<std::string, std::string>>& artifacts,
                           const std::string& path) {
  write_text_file(path, manifest_bytes(cfg, artifacts));
}

}  // namespace plm
