#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "network.hpp"

namespace plm {

inline constexpr char kCkptMagic[8] = {'P', 'L', 'M', 'C', 'K', 'P', 'T', '1'};

// PLMCKPT1 layout, all scalars little-endian: 8-byte magic; then for each of
// the two networks (storage first, recall second): int32 layer count; per
// layer int32 fan_in, fan_out, activation tag (0 sigmoid, 1 softmax,
// 2 identity), bias_trainable flag, followed by float64 row-major weights and
// float64 biases. Loss is recoverable from the output activation: softmax
// pairs with cross-entropy, anything else with mean squared error.
namespace detail {

inline void serialize_network(std::string& out, const Network<double>& net) {
  put_i32le(out, static_cast<std::int32_t>(net.layers.size()));
  for (const auto& layer : net.layers) {
    put_i32le(out, layer.fan_in);
    put_i32le(out, layer.fan_out);
    put_i32le(out, static_cast<std::int32_t>(layer.act));
    put_i32le(out, layer.bias_trainable ? 1 : 0);
    for (double w : layer.w) put_f64le(out, w);
    for (double b : layer.b) put_f64le(out, b);
  }
}

struct ByteReader {
  const unsigned char* p;
  std::size_t left;
  const std::string& path;

  std::int32_t i32() {
    if (left < 4) throw FormatError(path + ": truncated checkpoint");
    std::int32_t v = get_i32le(p);
    p += 4;
    left -= 4;
    return v;
  }
  double f64() {
    if (left < 8) throw FormatError(path + ": truncated checkpoint");
    double v = get_f64le(p);
    p += 8;
    left -= 8;
    return v;
  }
};

inline Network<double> parse_network(ByteReader& r) {
  std::int32_t count = r.i32();
  if (count < 1 || count > 64) throw FormatError(r.path + ": implausible layer count");
  Network<double> net;
  for (std::int32_t l = 0; l < count; ++l) {
    DenseLayer<double> layer;
    layer.fan_in = r.i32();
    layer.fan_out = r.i32();
    std::int32_t tag = r.i32();
    std::int32_t trainable = r.i32();
    if (layer.fan_in < 1 || layer.fan_out < 1 || layer.fan_in > 1000000 ||
        layer.fan_out > 1000000)
      throw FormatError(r.path + ": implausible layer dimensions");
    if (tag < 0 || tag > 2) throw FormatError(r.path + ": unknown activation tag");
    if (trainable != 0 && trainable != 1)
      throw FormatError(r.path + ": bias_trainable flag must be 0 or 1");
    layer.act = static_cast<Act>(tag);
    layer.bias_trainable = trainable == 1;
    layer.w.resize(std::size_t(layer.fan_in) * layer.fan_out);
    for (auto& w : layer.w) w = r.f64();
    layer.b.resize(layer.fan_out);
    for (auto& b : layer.b) b = r.f64();
    net.layers.push_back(std::move(layer));
  }
  net.loss =
      net.layers.back().act == Act::softmax ? Loss::cross_entropy : Loss::mean_squared_error;
  detail::check_network(net);
  return net;
}

}  // namespace detail

inline void save_checkpoint(const Network<double>& storage, const Network<double>& recall,
                            const std::string& path) {
  std::string out(kCkptMagic, 8);
  detail::serialize_network(out, storage);
  detail::serialize_network(out, recall);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  f.flush();
  if (!f) throw IoError("write failed on " + path);
}

inline std::pair<Network<double>, Network<double>> load_checkpoint(const std::string& path) {
  std::string bytes = read_file_bytes(path);
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kCkptMagic, 8) != 0)
    throw FormatError(path + ": not a PLMCKPT1 checkpoint");
  detail::ByteReader r{reinterpret_cast<const unsigned char*>(bytes.data()) + 8, bytes.size() - 8,
                       path};
  Network<double> storage = detail::parse_network(r);
  Network<double> recall = detail::parse_network(r);
  if (r.left != 0) throw FormatError(path + ": trailing bytes after checkpoint payload");
  return {std::move(storage), std::move(recall)};
}

}  // namespace plm
