#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "common.hpp"
#include "rng.hpp"

namespace plm {

enum class Act : std::int32_t { sigmoid = 0, softmax = 1, identity = 2 };
enum class Loss : std::int32_t { cross_entropy = 0, mean_squared_error = 1 };

// Fixed-order four-lane dot product: deterministic reassociation that still
// pipelines well on one core.
template <class T>
T dot(const T* a, const T* b, int n) {
  T s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  T s = (s0 + s1) + (s2 + s3);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

template <class T>
void axpy(T a, const T* x, T* y, int n) {
  for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

template <class T = double>
struct DenseLayer {
  int fan_in = 0;
  int fan_out = 0;
  Act act = Act::sigmoid;
  bool bias_trainable = true;
  std::vector<T> w;  // fan_out x fan_in, row-major
  std::vector<T> b;  // fan_out; all-zero whenever bias_trainable is false
};

template <class T = double>
struct Network {
  std::vector<DenseLayer<T>> layers;
  Loss loss = Loss::cross_entropy;

  int input_dim() const { return layers.empty() ? 0 : layers.front().fan_in; }
  int output_dim() const { return layers.empty() ? 0 : layers.back().fan_out; }
  int depth() const { return static_cast<int>(layers.size()); }
};

// Everything backward() needs from one forward pass. `post` is the value that
// actually flowed to the next layer (mask applied); `act` is the raw
// activation so derivatives need no recomputation. `mask` has one entry per
// hidden layer; an empty inner vector means no mask on that layer.
template <class T = double>
struct ForwardTrace {
  std::vector<T> input;
  std::vector<std::vector<T>> pre;
  std::vector<std::vector<T>> act;
  std::vector<std::vector<T>> post;
  std::vector<std::vector<T>> mask;
};

template <class T = double>
struct Gradients {
  std::vector<std::vector<T>> gw;
  std::vector<std::vector<T>> gb;
};

template <class T>
Gradients<T> zero_gradients(const Network<T>& net) {
  Gradients<T> g;
  g.gw.resize(net.layers.size());
  g.gb.resize(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    g.gw[l].assign(net.layers[l].w.size(), T(0));
    g.gb[l].assign(net.layers[l].b.size(), T(0));
  }
  return g;
}

namespace detail {

template <class T>
void activate(Act act, const std::vector<T>& pre, std::vector<T>& out) {
  int n = static_cast<int>(pre.size());
  out.resize(n);
  switch (act) {
    case Act::sigmoid:
      for (int i = 0; i < n; ++i) out[i] = T(1) / (T(1) + std::exp(-pre[i]));
      break;
    case Act::identity:
      out = pre;
      break;
    case Act::softmax: {
      T mx = pre[0];
      for (int i = 1; i < n; ++i)
        if (pre[i] > mx) mx = pre[i];
      T sum = 0;
      for (int i = 0; i < n; ++i) {
        out[i] = std::exp(pre[i] - mx);
        sum += out[i];
      }
      for (int i = 0; i < n; ++i) out[i] /= sum;
      break;
    }
  }
}

template <class T>
void check_network(const Network<T>& net) {
  if (net.layers.empty()) throw ShapeError("network has no layers");
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& L = net.layers[l];
    if (L.fan_in <= 0 || L.fan_out <= 0) throw ShapeError("layer with non-positive dimension");
    if (L.w.size() != std::size_t(L.fan_in) * std::size_t(L.fan_out))
      throw ShapeError("weight buffer does not match layer dims");
    if (L.b.size() != std::size_t(L.fan_out)) throw ShapeError("bias buffer does not match fan_out");
    if (l + 1 < net.layers.size() && net.layers[l + 1].fan_in != L.fan_out)
      throw ShapeError("adjacent layer dimensions do not chain");
    if (L.act == Act::softmax && l + 1 != net.layers.size())
      throw ShapeError("softmax allowed on the output layer only");
  }
  Act out = net.layers.back().act;
  if (net.loss == Loss::cross_entropy && out != Act::softmax)
    throw ShapeError("cross_entropy requires a softmax output layer");
  if (net.loss == Loss::mean_squared_error && out == Act::softmax)
    throw ShapeError("mean_squared_error requires sigmoid or identity output");
}

}  // namespace detail

// `masks`: nullptr for eval mode, else one mask per hidden layer (empty inner
// vectors skip individual layers). Masks multiply post-activations; the output
// layer is never masked.
template <class T>
void forward(const Network<T>& net, const std::vector<T>& input,
             const std::vector<std::vector<T>>* masks, ForwardTrace<T>& tr) {
  detail::check_network(net);
  if (static_cast<int>(input.size()) != net.input_dim())
    throw ShapeError("forward: input length " + std::to_string(input.size()) +
                     " != input_dim " + std::to_string(net.input_dim()));
  int L = net.depth();
  if (masks && static_cast<int>(masks->size()) != L - 1)
    throw ShapeError("forward: expected one dropout mask slot per hidden layer");
  tr.input = input;
  tr.pre.resize(L);
  tr.act.resize(L);
  tr.post.resize(L);
  tr.mask.assign(L > 0 ? L - 1 : 0, {});
  const std::vector<T>* x = &tr.input;
  for (int l = 0; l < L; ++l) {
    const auto& layer = net.layers[l];
    auto& pre = tr.pre[l];
    pre.resize(layer.fan_out);
    for (int o = 0; o < layer.fan_out; ++o)
      pre[o] = dot(layer.w.data() + std::size_t(o) * layer.fan_in, x->data(), layer.fan_in) +
               layer.b[o];
    detail::activate(layer.act, pre, tr.act[l]);
    tr.post[l] = tr.act[l];
    if (l < L - 1 && masks && !(*masks)[l].empty()) {
      const auto& m = (*masks)[l];
      if (m.size() != std::size_t(layer.fan_out))
        throw ShapeError("forward: dropout mask length mismatch");
      for (int o = 0; o < layer.fan_out; ++o) tr.post[l][o] *= m[o];
      tr.mask[l] = m;
    }
    x = &tr.post[l];
  }
}

template <class T>
std::pair<std::vector<T>, ForwardTrace<T>> forward(const Network<T>& net,
                                                   const std::vector<T>& input,
                                                   const std::vector<std::vector<T>>* masks =
                                                       nullptr) {
  ForwardTrace<T> tr;
  forward(net, input, masks, tr);
  return {tr.post.back(), std::move(tr)};
}

// Mask-free, rescale-free forward pass.
template <class T>
std::vector<T> forward_eval(const Network<T>& net, const std::vector<T>& input) {
  ForwardTrace<T> tr;
  forward<T>(net, input, nullptr, tr);
  return tr.post.back();
}

template <class T>
T loss_value(const Network<T>& net, const std::vector<T>& output, const std::vector<T>& target) {
  if (output.size() != std::size_t(net.output_dim()) || target.size() != output.size())
    throw ShapeError("loss_value: output/target length mismatch");
  for (T v : output)
    if (!std::isfinite(v)) throw NumericError("loss_value: non-finite output entry");
  T loss = 0;
  if (net.loss == Loss::cross_entropy) {
    for (std::size_t i = 0; i < output.size(); ++i)
      if (target[i] != T(0)) loss -= target[i] * std::log(output[i]);
  } else {
    for (std::size_t i = 0; i < output.size(); ++i) {
      T d = output[i] - target[i];
      loss += d * d;
    }
    loss /= T(output.size());
  }
  return loss;
}

// Accumulates exact loss gradients into `acc` (summed, not averaged). Dropout
// recorded in the trace propagates zero through dropped units; pinned biases
// accumulate nothing.
template <class T>
void backward_accumulate(const Network<T>& net, const ForwardTrace<T>& tr,
                         const std::vector<T>& target, Gradients<T>& acc) {
  int L = net.depth();
  if (static_cast<int>(tr.pre.size()) != L || static_cast<int>(tr.post.size()) != L)
    throw ShapeError("backward: trace depth does not match network");
  if (target.size() != std::size_t(net.output_dim()))
    throw ShapeError("backward: target length mismatch");
  if (acc.gw.size() != std::size_t(L)) throw ShapeError("backward: gradient accumulator mismatch");

  // Output delta = dLoss/dpre for the output layer.
  std::vector<T> delta(net.layers.back().fan_out);
  const auto& out = tr.act[L - 1];
  if (net.loss == Loss::cross_entropy) {
    for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = out[i] - target[i];
  } else {
    T scale = T(2) / T(delta.size());
    Act a = net.layers.back().act;
    for (std::size_t i = 0; i < delta.size(); ++i) {
      T d = scale * (out[i] - target[i]);
      delta[i] = a == Act::sigmoid ? d * out[i] * (T(1) - out[i]) : d;
    }
  }

  std::vector<T> prev_delta;
  for (int l = L - 1; l >= 0; --l) {
    const auto& layer = net.layers[l];
    const std::vector<T>& in = l == 0 ? tr.input : tr.post[l - 1];
    if (in.size() != std::size_t(layer.fan_in)) throw ShapeError("backward: trace width mismatch");
    for (int o = 0; o < layer.fan_out; ++o)
      axpy(delta[o], in.data(), acc.gw[l].data() + std::size_t(o) * layer.fan_in, layer.fan_in);
    if (layer.bias_trainable)
      for (int o = 0; o < layer.fan_out; ++o) acc.gb[l][o] += delta[o];
    if (l == 0) break;
    prev_delta.assign(layer.fan_in, T(0));
    for (int o = 0; o < layer.fan_out; ++o)
      axpy(delta[o], layer.w.data() + std::size_t(o) * layer.fan_in, prev_delta.data(),
           layer.fan_in);
    const auto& mask = tr.mask[l - 1];
    if (!mask.empty())
      for (int i = 0; i < layer.fan_in; ++i) prev_delta[i] *= mask[i];
    if (net.layers[l - 1].act == Act::sigmoid) {
      const auto& a = tr.act[l - 1];
      for (int i = 0; i < layer.fan_in; ++i) prev_delta[i] *= a[i] * (T(1) - a[i]);
    }
    delta.swap(prev_delta);
  }
}

template <class T>
Gradients<T> backward(const Network<T>& net, const ForwardTrace<T>& tr,
                      const std::vector<T>& target) {
  Gradients<T> g = zero_gradients(net);
  backward_accumulate(net, tr, target, g);
  return g;
}

// p <- p - lr * g for every trainable parameter; pinned biases stay 0.
template <class T>
void apply_update(Network<T>& net, const Gradients<T>& grads, T learning_rate) {
  if (grads.gw.size() != net.layers.size()) throw ShapeError("apply_update: layer count mismatch");
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto& layer = net.layers[l];
    if (grads.gw[l].size() != layer.w.size() || grads.gb[l].size() != layer.b.size())
      throw ShapeError("apply_update: gradient shape mismatch");
    for (T g : grads.gw[l])
      if (!std::isfinite(g)) throw NumericError("apply_update: non-finite weight gradient");
    for (T g : grads.gb[l])
      if (!std::isfinite(g)) throw NumericError("apply_update: non-finite bias gradient");
    for (std::size_t i = 0; i < layer.w.size(); ++i) layer.w[i] -= learning_rate * grads.gw[l][i];
    if (layer.bias_trainable)
      for (std::size_t i = 0; i < layer.b.size(); ++i) layer.b[i] -= learning_rate * grads.gb[l][i];
  }
}

// Weights U(-1/sqrt(fan_in), +1/sqrt(fan_in)) from a stream derived only from
// `seed`; trainable biases start at 0; the output layer's bias is pinned.
template <class T = double>
Network<T> init_network(const std::vector<int>& dims, const std::vector<Act>& activations,
                        Loss loss, std::uint64_t seed) {
  if (dims.size() < 2) throw ConfigError("init_network: need at least input and output dims");
  if (activations.size() != dims.size() - 1)
    throw ConfigError("init_network: one activation per weight layer required");
  Network<T> net;
  net.loss = loss;
  Stream st(seed);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer<T> layer;
    layer.fan_in = dims[l];
    layer.fan_out = dims[l + 1];
    layer.act = activations[l];
    layer.bias_trainable = l != dims.size() - 2;
    if (layer.fan_in <= 0 || layer.fan_out <= 0)
      throw ConfigError("init_network: dims must be positive");
    T bound = T(1) / std::sqrt(T(layer.fan_in));
    layer.w.resize(std::size_t(layer.fan_in) * layer.fan_out);
    for (auto& w : layer.w) w = st.uniform(-bound, bound);
    layer.b.assign(layer.fan_out, T(0));
    net.layers.push_back(std::move(layer));
  }
  detail::check_network(net);
  return net;
}

}  // namespace plm
