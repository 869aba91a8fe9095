#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "checkpoint.hpp"
#include "config.hpp"
#include "data.hpp"
#include "network.hpp"
#include "regularize.hpp"
#include "rng.hpp"

namespace plm {

// The coupled pair: storage 784-100-75 (sigmoid hidden, softmax out,
// cross-entropy), recall 75-100-784 (sigmoid hidden, sigmoid out, mean MSE).
// Both output layers carry pinned zero biases.
struct PlmPair {
  Network<double> storage;
  Network<double> recall;
};

inline PlmPair make_plm(const RunConfig& cfg) {
  PlmPair plm;
  plm.storage = init_network({kImageDim, 100, kClassCount}, {Act::sigmoid, Act::softmax},
                             Loss::cross_entropy, Stream(cfg.seed_init, salt::net_storage).bits());
  plm.recall = init_network({kClassCount, 100, kImageDim}, {Act::sigmoid, Act::sigmoid},
                            Loss::mean_squared_error, Stream(cfg.seed_init, salt::net_recall).bits());
  // One-hot inputs leave the standard +-1/sqrt(75) first layer with nearly
  // identical hidden codes across classes; a wider first-layer init separates
  // them. Scale 0 keeps the standard init.
  if (cfg.recall_init_scale > 0) {
    Stream st(cfg.seed_init, salt::net_recall, 1);
    for (auto& w : plm.recall.layers[0].w)
      w = st.uniform(-cfg.recall_init_scale, cfg.recall_init_scale);
  }
  return plm;
}

inline void validate_plm(const PlmPair& plm) {
  const auto& s = plm.storage;
  const auto& r = plm.recall;
  if (s.input_dim() != kImageDim || s.output_dim() != kClassCount ||
      s.layers.back().act != Act::softmax || s.loss != Loss::cross_entropy)
    throw FormatError("checkpoint: storage network is not a 784->75 softmax classifier");
  if (r.input_dim() != kClassCount || r.output_dim() != kImageDim ||
      r.loss != Loss::mean_squared_error)
    throw FormatError("checkpoint: recall network is not a 75->784 synthesis net");
  if (s.layers.back().bias_trainable || r.layers.back().bias_trainable)
    throw FormatError("checkpoint: output-layer biases must be pinned");
}

inline void save_checkpoint(const PlmPair& plm, const std::string& path) {
  save_checkpoint(plm.storage, plm.recall, path);
}

inline PlmPair load_plm_checkpoint(const std::string& path) {
  auto [storage, recall] = load_checkpoint(path);
  PlmPair plm{std::move(storage), std::move(recall)};
  validate_plm(plm);
  return plm;
}

// Group selection walks the cumulative distribution over positive-probability
// groups only, so a zero-probability group can never be returned; the final
// positive group absorbs any floating-point residue.
inline int sample_group(const std::array<double, 3>& bias, Stream& rng) {
  int last_positive = -1;
  for (int g = 0; g < 3; ++g)
    if (bias[g] > 0.0) last_positive = g;
  if (last_positive < 0) throw ConfigError("sample_group: all probabilities are zero");
  double u = rng.uniform();
  double c = 0.0;
  for (int g = 0; g < 3; ++g) {
    if (bias[g] <= 0.0) continue;
    c += bias[g];
    if (u < c) return g;
  }
  return last_positive;
}

inline int sample_class(const std::array<double, 3>& bias,
                        const std::array<std::vector<int>, 3>& members, Stream& rng) {
  int g = sample_group(bias, rng);
  const auto& m = members[g];
  return m[rng.below(m.size())];
}

inline std::array<std::vector<int>, 3> group_members(const GroupAssignment& groups) {
  return {groups.members(0), groups.members(1), groups.members(2)};
}

// Eval-mode synthesis: one_hot(class) through the recall net, no noise.
inline std::vector<double> synthesize(const Network<double>& recall, int cls) {
  return forward_eval(recall, one_hot(cls, recall.input_dim()));
}

// One regularized SGD step of the storage net on (zero_mean(image), class).
inline void train_step_storage(Network<double>& storage, const std::vector<double>& image,
                               int cls, const RunConfig& cfg, std::uint64_t step) {
  Gradients<double> g = parallel_dithered_gradient(
      storage, zero_mean(image), one_hot(cls, storage.output_dim()), ReplicaConfig{cfg.replicas},
      DitherSpec{cfg.dither_amplitude}, DropoutSpec{cfg.dropout_rate}, cfg.seed_dither, step,
      salt::storage_step);
  apply_update(storage, g, cfg.lr);
}

// One regularized SGD step of the recall net on (one_hot(class), target
// image); class-input dither is governed by cfg.dither_class_input.
inline void train_step_recall(Network<double>& recall, int cls,
                              const std::vector<double>& target_image, const RunConfig& cfg,
                              std::uint64_t step) {
  Gradients<double> g = parallel_dithered_gradient(
      recall, one_hot(cls, recall.input_dim()), target_image, ReplicaConfig{cfg.replicas},
      DitherSpec{cfg.dither_amplitude}, DropoutSpec{cfg.dropout_rate}, cfg.seed_dither, step,
      salt::recall_step, cfg.dither_class_input);
  apply_update(recall, g, cfg.lr_recall);
}

// Full sweeps over all 75 classes in a fresh shuffled order per epoch; the
// only phase that trains on the real images.
inline void pretrain(PlmPair& plm, const Dataset75& data, const RunConfig& cfg) {
  std::array<int, kClassCount> order{};
  for (int i = 0; i < kClassCount; ++i) order[i] = i;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Stream shuffle_stream(cfg.seed_sampler, salt::sweep_order, static_cast<std::uint64_t>(epoch));
    shuffle_stream.shuffle(order.begin(), order.end());
    for (int i = 0; i < kClassCount; ++i) {
      int cls = order[i];
      std::uint64_t step = std::uint64_t(epoch) * kClassCount + i;
      train_step_storage(plm.storage, data.image(cls), cls, cfg, step);
      train_step_recall(plm.recall, cls, data.image(cls), cfg, step);
    }
  }
}

// One PSGD iteration: sample a class, synthesize its image from the recall
// net, train both nets on that self-generated pair. Takes no dataset: the
// originals are unreachable from here by construction.
inline void psgd_step(PlmPair& plm, const std::array<double, 3>& bias,
                      const std::array<std::vector<int>, 3>& members, Stream& sampler,
                      const RunConfig& cfg, std::uint64_t iteration) {
  int cls = sample_class(bias, members, sampler);
  std::vector<double> image = synthesize(plm.recall, cls);
  train_step_storage(plm.storage, image, cls, cfg, iteration);
  train_step_recall(plm.recall, cls, image, cfg, iteration);
}

// Per-group fraction of originals misclassified by eval-mode storage.
inline std::array<double, 3> evaluate_groups(const Network<double>& storage, const Dataset75& data,
                                             const GroupAssignment& groups) {
  std::array<int, 3> wrong{0, 0, 0};
  for (int cls = 0; cls < kClassCount; ++cls) {
    std::vector<double> out = forward_eval(storage, zero_mean(data.image(cls)));
    if (argmax(out) != cls) ++wrong[groups.group_of[cls]];
  }
  return {wrong[0] / double(kGroupSize), wrong[1] / double(kGroupSize),
          wrong[2] / double(kGroupSize)};
}

// Count of originals misclassified, and of synthesized images misclassified.
inline int storage_errors(const Network<double>& storage, const Dataset75& data) {
  int wrong = 0;
  for (int cls = 0; cls < kClassCount; ++cls)
    if (argmax(forward_eval(storage, zero_mean(data.image(cls)))) != cls) ++wrong;
  return wrong;
}

inline int recall_errors(const PlmPair& plm) {
  int wrong = 0;
  for (int cls = 0; cls < kClassCount; ++cls)
    if (argmax(forward_eval(plm.storage, zero_mean(synthesize(plm.recall, cls)))) != cls) ++wrong;
  return wrong;
}

struct MetricsRow {
  long iteration;
  std::array<double, 3> err;
};

using MetricsLog = std::vector<MetricsRow>;

namespace detail {

inline void check_finite(const Network<double>& net, const char* which, long iteration) {
  for (const auto& layer : net.layers) {
    for (double w : layer.w)
      if (!std::isfinite(w))
        throw NumericError(std::string(which) + " diverged at iteration " +
                           std::to_string(iteration));
    for (double b : layer.b)
      if (!std::isfinite(b))
        throw NumericError(std::string(which) + " diverged at iteration " +
                           std::to_string(iteration));
  }
}

}  // namespace detail

// Storage-only training on the real images under the learning bias schedule.
// Logs every eval_every iterations (iteration 0 included) into `log`, which
// retains all rows logged before a divergence abort; stops early once every
// group reads zero error.
inline void run_selective_learning(const Dataset75& data, const GroupAssignment& groups,
                                   const RunConfig& cfg, MetricsLog& log) {
  Network<double> storage =
      init_network({kImageDim, 100, kClassCount}, {Act::sigmoid, Act::softmax},
                   Loss::cross_entropy, Stream(cfg.seed_init, salt::net_storage).bits());
  auto members = group_members(groups);
  Stream sampler(cfg.seed_sampler);
  for (long it = 0;; ++it) {
    if (it % cfg.eval_every == 0) {
      auto e = evaluate_groups(storage, data, groups);
      log.push_back({it, e});
      if (e[0] == 0.0 && e[1] == 0.0 && e[2] == 0.0) break;
    }
    if (it == cfg.iters) break;
    int cls = sample_class(cfg.bias, members, sampler);
    try {
      train_step_storage(storage, data.image(cls), cls, cfg, static_cast<std::uint64_t>(it));
      detail::check_finite(storage, "storage", it);
    } catch (const NumericError& e) {
      throw NumericError("selective learning aborted: " + std::string(e.what()) + " (iteration " +
                         std::to_string(it) + ")");
    }
  }
}

// PSGD under the forgetting bias schedule from a (pre)trained pair. The
// originals are read only inside evaluate_groups at log points.
inline void run_selective_forgetting(PlmPair& plm, const Dataset75& data,
                                     const GroupAssignment& groups, const RunConfig& cfg,
                                     MetricsLog& log) {
  auto members = group_members(groups);
  Stream sampler(cfg.seed_sampler);
  for (long it = 0;; ++it) {
    if (it % cfg.eval_every == 0) log.push_back({it, evaluate_groups(plm.storage, data, groups)});
    if (it == cfg.iters) break;
    try {
      psgd_step(plm, cfg.bias, members, sampler, cfg, static_cast<std::uint64_t>(it));
      detail::check_finite(plm.storage, "storage", it);
      detail::check_finite(plm.recall, "recall", it);
    } catch (const NumericError& e) {
      throw NumericError("psgd aborted: " + std::string(e.what()) + " (iteration " +
                         std::to_string(it) + ")");
    }
  }
}

}  // namespace plm
