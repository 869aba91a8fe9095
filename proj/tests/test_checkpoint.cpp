#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <string>

#include "fixtures.hpp"
#include "plm/checkpoint.hpp"
#include "plm/config.hpp"
#include "plm/engine.hpp"

using namespace plm;

namespace {

PlmPair sample_pair() {
  RunConfig cfg = default_config("pretrain");
  PlmPair plm = make_plm(cfg);
  // dirty a few parameters so the round-trip is not testing pristine zeros
  plm.storage.layers[0].w[17] = -0.123456789012345;
  plm.storage.layers[0].b[3] = 2.5e-17;
  plm.recall.layers[1].w[100] = 1e300;
  return plm;
}

bool same_net(const Network<double>& a, const Network<double>& b) {
  if (a.loss != b.loss || a.layers.size() != b.layers.size()) return false;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    const auto& x = a.layers[l];
    const auto& y = b.layers[l];
    if (x.fan_in != y.fan_in || x.fan_out != y.fan_out || x.act != y.act ||
        x.bias_trainable != y.bias_trainable || x.w != y.w || x.b != y.b)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("checkpoint round-trips bit-exactly") {
  std::string dir = fixtures::scratch_dir("ckpt");
  PlmPair plm = sample_pair();
  std::string path = dir + "/pair.ckpt";
  save_checkpoint(plm, path);
  PlmPair back = load_plm_checkpoint(path);
  CHECK(same_net(plm.storage, back.storage));
  CHECK(same_net(plm.recall, back.recall));
  CHECK(back.storage.loss == Loss::cross_entropy);  // inferred from softmax output
  CHECK(back.recall.loss == Loss::mean_squared_error);
}

TEST_CASE("checkpoint loader rejects corrupted files") {
  std::string dir = fixtures::scratch_dir("ckptbad");
  PlmPair plm = sample_pair();
  std::string path = dir + "/pair.ckpt";
  save_checkpoint(plm, path);
  std::string bytes = read_file_bytes(path);

  CHECK_THROWS_AS(load_checkpoint(dir + "/missing"), IoError);

  std::string bad_magic = bytes;
  bad_magic[7] = '2';
  std::ofstream(dir + "/magic", std::ios::binary) << bad_magic;
  CHECK_THROWS_AS(load_checkpoint(dir + "/magic"), FormatError);

  // truncation at several depths: inside the header, inside a weight block,
  // and just before the final byte
  for (std::size_t cut : {4ul, 20ul, bytes.size() / 2, bytes.size() - 1}) {
    std::ofstream(dir + "/trunc", std::ios::binary) << bytes.substr(0, cut);
    CHECK_THROWS_AS(load_checkpoint(dir + "/trunc"), FormatError);
  }

  std::string trailing = bytes + "x";
  std::ofstream(dir + "/trail", std::ios::binary) << trailing;
  CHECK_THROWS_AS(load_checkpoint(dir + "/trail"), FormatError);
}

TEST_CASE("checkpoint loader validates layer metadata") {
  std::string dir = fixtures::scratch_dir("ckptmeta");
  auto craft = [&](std::int32_t count, std::int32_t fan_in, std::int32_t fan_out,
                   std::int32_t act, std::int32_t trainable) {
    std::string out(kCkptMagic, 8);
    put_i32le(out, count);
    put_i32le(out, fan_in);
    put_i32le(out, fan_out);
    put_i32le(out, act);
    put_i32le(out, trainable);
    for (int i = 0; i < fan_in * fan_out + fan_out; ++i) put_f64le(out, 0.5);
    std::string path = dir + "/crafted";
    std::ofstream(path, std::ios::binary) << out;
    return path;
  };
  CHECK_THROWS_AS(load_checkpoint(craft(0, 1, 1, 0, 1)), FormatError);    // layer count
  CHECK_THROWS_AS(load_checkpoint(craft(1, -1, 1, 0, 1)), FormatError);   // fan_in
  CHECK_THROWS_AS(load_checkpoint(craft(1, 1, 1, 7, 1)), FormatError);    // activation tag
  CHECK_THROWS_AS(load_checkpoint(craft(1, 1, 1, 0, 2)), FormatError);    // trainable flag
}

TEST_CASE("pair validation rejects mismatched networks") {
  std::string dir = fixtures::scratch_dir("ckptpair");
  PlmPair plm = sample_pair();

  // two storage nets in one file: the second is not a synthesis net
  std::string path = dir + "/swapped.ckpt";
  save_checkpoint(plm.storage, plm.storage, path);
  CHECK_THROWS_AS(load_plm_checkpoint(path), FormatError);

  save_checkpoint(plm.recall, plm.storage, path);
  CHECK_THROWS_AS(load_plm_checkpoint(path), FormatError);

  // right shapes in the right order passes
  save_checkpoint(plm.storage, plm.recall, path);
  CHECK_NOTHROW(load_plm_checkpoint(path));
}

TEST_CASE("saving to an unwritable path raises IoError") {
  PlmPair plm = sample_pair();
  CHECK_THROWS_AS(save_checkpoint(plm, "/nonexistent_dir_zz/pair.ckpt"), IoError);
}
