#pragma once

#include <cstdint>
#include <vector>

#include "network.hpp"
#include "rng.hpp"

namespace plm {

// Uniform noise of peak-to-peak width `amplitude`, so each sample lies in
// [-amplitude/2, +amplitude/2] and has zero mean in expectation.
struct DitherSpec {
  double amplitude = 1.0;
};

// Inverted dropout: kept units are scaled by 1/(1-rate) at train time so eval
// passes need no rescaling.
struct DropoutSpec {
  double rate = 0.5;
};

struct ReplicaConfig {
  int count = 100;
};

template <class T>
std::vector<T> dither(const std::vector<T>& input, const DitherSpec& spec, Stream& rng) {
  if (spec.amplitude < 0) throw ConfigError("dither: amplitude must be non-negative");
  std::vector<T> out(input.size());
  for (std::size_t i = 0; i < input.size(); ++i)
    out[i] = input[i] + T((rng.uniform() - 0.5) * spec.amplitude);
  return out;
}

inline std::vector<double> sample_dropout_mask(int dim, const DropoutSpec& spec, Stream& rng) {
  if (dim < 1) throw ConfigError("sample_dropout_mask: dim must be positive");
  if (spec.rate < 0 || spec.rate >= 1)
    throw ConfigError("sample_dropout_mask: rate must lie in [0,1)");
  double keep = 1.0 / (1.0 - spec.rate);
  std::vector<double> mask(dim);
  for (int i = 0; i < dim; ++i) mask[i] = rng.uniform() < spec.rate ? 0.0 : keep;
  return mask;
}

// Replica k's noise and masks come from Stream(seed, step, salt, k) alone, so
// any evaluation order would see the same streams; accumulation is serial in
// replica order to pin the floating-point sum. Per replica: dither the input
// (skipped when dither_input is false), draw one mask per hidden layer, then
// forward/backward. Returns the arithmetic mean of the replica gradients.
template <class T>
Gradients<T> parallel_dithered_gradient(const Network<T>& net, const std::vector<T>& input,
                                        const std::vector<T>& target, const ReplicaConfig& replicas,
                                        const DitherSpec& dspec, const DropoutSpec& dropout,
                                        std::uint64_t seed, std::uint64_t step, std::uint64_t salt,
                                        bool dither_input = true) {
  if (replicas.count < 1) throw ConfigError("parallel_dithered_gradient: count must be >= 1");
  Gradients<T> acc = zero_gradients(net);
  ForwardTrace<T> tr;
  int hidden = net.depth() - 1;
  std::vector<std::vector<T>> masks(hidden);
  for (int k = 0; k < replicas.count; ++k) {
    Stream rs(seed, step, salt, static_cast<std::uint64_t>(k));
    std::vector<T> x = dither_input ? dither(input, dspec, rs) : input;
    for (int h = 0; h < hidden; ++h)
      masks[h] = sample_dropout_mask(net.layers[h].fan_out, dropout, rs);
    forward(net, x, &masks, tr);
    backward_accumulate(net, tr, target, acc);
  }
  T inv = T(1) / T(replicas.count);
  for (auto& g : acc.gw)
    for (auto& v : g) v *= inv;
  for (auto& g : acc.gb)
    for (auto& v : g) v *= inv;
  return acc;
}

}  // namespace plm
