#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <string>

#include "fixtures.hpp"
#include "plm/config.hpp"

using namespace plm;

TEST_CASE("command defaults carry the reference settings") {
  RunConfig pre = default_config("pretrain");
  CHECK(pre.lr == 0.5);
  CHECK(pre.lr_recall == 20.0);
  CHECK(pre.epochs == 100);
  CHECK(pre.replicas == 100);

  RunConfig learn = default_config("learn");
  CHECK(learn.lr == 0.5);
  CHECK(learn.bias == std::array<double, 3>{0.8, 0.15, 0.05});
  CHECK(learn.iters == 30000);

  RunConfig forget = default_config("forget");
  CHECK(forget.lr == 1.0);
  CHECK(forget.bias == std::array<double, 3>{0.99, 0.01, 0.0});

  for (const char* cmd : {"pretrain", "learn", "forget"}) {
    RunConfig cfg = default_config(cmd);
    CHECK(cfg.seed_init == 101);
    CHECK(cfg.seed_split == 202);
    CHECK(cfg.seed_sampler == 303);
    CHECK(cfg.seed_dither == 404);
    CHECK(cfg.dither_amplitude == 1.0);
    CHECK(cfg.dropout_rate == 0.5);
    CHECK_FALSE(cfg.dither_class_input);
    CHECK_NOTHROW(validate_config(cfg));
  }
}

TEST_CASE("apply_key parses every supported key") {
  RunConfig cfg = default_config("learn");
  apply_key(cfg, "mnist_path", "/data/x");
  apply_key(cfg, "ckpt_path", "a.ckpt");
  apply_key(cfg, "out_dir", "results");
  apply_key(cfg, "lr", "0.25");
  apply_key(cfg, "lr_recall", "2.5");
  apply_key(cfg, "replicas", "10");
  apply_key(cfg, "dither_amplitude", "0.75");
  apply_key(cfg, "dropout_rate", "0.4");
  apply_key(cfg, "dither_class_input", "true");
  apply_key(cfg, "recall_init_scale", "2");
  apply_key(cfg, "bias", "0.5,0.25,0.25");
  apply_key(cfg, "epochs", "7");
  apply_key(cfg, "iters", "123");
  apply_key(cfg, "eval_every", "5");
  apply_key(cfg, "classes", "1,2,3");
  apply_key(cfg, "dump_originals", "1");
  CHECK(cfg.mnist_path == "/data/x");
  CHECK(cfg.ckpt_path == "a.ckpt");
  CHECK(cfg.out_dir == "results");
  CHECK(cfg.lr == 0.25);
  CHECK(cfg.lr_recall == 2.5);
  CHECK(cfg.replicas == 10);
  CHECK(cfg.dither_amplitude == 0.75);
  CHECK(cfg.dropout_rate == 0.4);
  CHECK(cfg.dither_class_input);
  CHECK(cfg.recall_init_scale == 2.0);
  CHECK(cfg.bias == std::array<double, 3>{0.5, 0.25, 0.25});
  CHECK(cfg.epochs == 7);
  CHECK(cfg.iters == 123);
  CHECK(cfg.eval_every == 5);
  CHECK(cfg.classes == "1,2,3");
  CHECK(cfg.dump_originals);

  CHECK_THROWS_AS(apply_key(cfg, "lerning_rate", "1"), ConfigError);
  CHECK_THROWS_AS(apply_key(cfg, "lr", "fast"), ConfigError);
  CHECK_THROWS_AS(apply_key(cfg, "lr", "0.5x"), ConfigError);
  CHECK_THROWS_AS(apply_key(cfg, "iters", "12.5"), ConfigError);
  CHECK_THROWS_AS(apply_key(cfg, "seed_init", "-3"), ConfigError);
  CHECK_THROWS_AS(apply_key(cfg, "dump_originals", "yes"), ConfigError);
  CHECK_THROWS_AS(apply_key(cfg, "bias", "0.5,0.5"), ConfigError);
}

TEST_CASE("the base seed fans out to the four role seeds") {
  RunConfig cfg = default_config("forget");
  apply_key(cfg, "seed", "1000");
  CHECK(cfg.seed_init == 1000);
  CHECK(cfg.seed_split == 1001);
  CHECK(cfg.seed_sampler == 1002);
  CHECK(cfg.seed_dither == 1003);
  // a later explicit role seed still overrides
  apply_key(cfg, "seed_sampler", "77");
  CHECK(cfg.seed_sampler == 77);
}

TEST_CASE("config file applies over defaults and under later flags") {
  std::string dir = fixtures::scratch_dir("cfg");
  std::string path = dir + "/run.conf";
  std::ofstream(path) << "# comment line\n"
                         "\n"
                         "lr=0.125\r\n"
                         "no equals sign here\n";
  RunConfig cfg = default_config("learn");
  CHECK_THROWS_AS(apply_config_file(cfg, path), ConfigError);

  std::ofstream(path) << "# reference run\n"
                         "lr=0.125\r\n"
                         "iters=500\n"
                         "bias=0.9,0.1,0\n"
                         "lr=0.25\n";  // later key wins within the file
  cfg = default_config("learn");
  apply_config_file(cfg, path);
  CHECK(cfg.lr == 0.25);
  CHECK(cfg.iters == 500);
  CHECK(cfg.bias == std::array<double, 3>{0.9, 0.1, 0.0});

  // flag applied after the file wins
  apply_key(cfg, "lr", "0.0625");
  CHECK(cfg.lr == 0.0625);

  CHECK_THROWS_AS(apply_config_file(cfg, dir + "/missing.conf"), IoError);
}

TEST_CASE("validation guards every numeric range") {
  auto bad = [](auto&& mutate) {
    RunConfig cfg = default_config("learn");
    mutate(cfg);
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  };
  bad([](RunConfig& c) { c.replicas = 0; });
  bad([](RunConfig& c) { c.lr = 0.0; });
  bad([](RunConfig& c) { c.lr_recall = -1.0; });
  bad([](RunConfig& c) { c.dither_amplitude = -0.1; });
  bad([](RunConfig& c) { c.dropout_rate = 1.0; });
  bad([](RunConfig& c) { c.dropout_rate = -0.5; });
  bad([](RunConfig& c) { c.recall_init_scale = -2.0; });
  bad([](RunConfig& c) { c.epochs = -1; });
  bad([](RunConfig& c) { c.iters = -1; });
  bad([](RunConfig& c) { c.eval_every = 0; });
  bad([](RunConfig& c) { c.bias = {0.5, 0.4, 0.2}; });   // sums to 1.1
  bad([](RunConfig& c) { c.bias = {0.5, 0.6, -0.1}; });  // negative entry
}

TEST_CASE("bias probabilities tolerate float rounding in the sum") {
  RunConfig cfg = default_config("learn");
  apply_key(cfg, "bias", "0.8,0.15,0.05");  // sums to 1 + 1ulp-ish
  CHECK_NOTHROW(validate_config(cfg));
  apply_key(cfg, "bias", "0.99,0.01,0.0");
  CHECK_NOTHROW(validate_config(cfg));
  apply_key(cfg, "bias", "1,0,0");
  CHECK_NOTHROW(validate_config(cfg));
}
