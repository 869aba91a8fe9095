#pragma once

// Shared test fixtures: a deterministic synthetic stand-in for the MNIST IDX
// file (75 stroke images, distinct enough to be memorized as 75 classes) and
// scratch-directory plumbing.

#include <unistd.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "plm/data.hpp"
#include "plm/rng.hpp"

namespace fixtures {

// 2-4 anti-aliased line segments per 28x28 image, endpoints inside the
// [4,24) square, intensity 1 within 0.8px of a segment fading to 0 at 1.8px.
inline std::vector<plm::RawImage> make_stroke_images(std::uint64_t seed = 7, int count = 75) {
  std::vector<plm::RawImage> out(count);
  plm::Stream st(seed, 0x494d4753ull);
  for (int i = 0; i < count; ++i) {
    std::array<double, 784> img{};
    int nseg = 2 + static_cast<int>(st.below(3));
    for (int s = 0; s < nseg; ++s) {
      double x0 = st.uniform(4.0, 24.0), y0 = st.uniform(4.0, 24.0);
      double x1 = st.uniform(4.0, 24.0), y1 = st.uniform(4.0, 24.0);
      double dx = x1 - x0, dy = y1 - y0;
      double len2 = std::max(dx * dx + dy * dy, 1e-9);
      for (int r = 0; r < 28; ++r)
        for (int c = 0; c < 28; ++c) {
          double t = std::clamp(((c - x0) * dx + (r - y0) * dy) / len2, 0.0, 1.0);
          double px = x0 + t * dx, py = y0 + t * dy;
          double dist = std::hypot(c - px, r - py);
          double v = std::clamp(1.8 - dist, 0.0, 1.0);
          img[r * 28 + c] = std::max(img[r * 28 + c], v);
        }
    }
    for (int k = 0; k < 784; ++k)
      out[i][k] = static_cast<std::uint8_t>(img[k] * 255.0);
  }
  return out;
}

inline void write_idx(const std::string& path, const std::vector<plm::RawImage>& images,
                      std::uint32_t rows = 28, std::uint32_t cols = 28) {
  std::string bytes;
  auto be32 = [&](std::uint32_t v) {
    bytes.push_back(char(v >> 24));
    bytes.push_back(char((v >> 16) & 0xff));
    bytes.push_back(char((v >> 8) & 0xff));
    bytes.push_back(char(v & 0xff));
  };
  be32(2051);
  be32(static_cast<std::uint32_t>(images.size()));
  be32(rows);
  be32(cols);
  for (const auto& img : images) bytes.append(reinterpret_cast<const char*>(img.data()), 784);
  std::ofstream f(path, std::ios::binary);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

// Fresh scratch directory under the system temp root; unique per call.
inline std::string scratch_dir(const std::string& tag) {
  static int counter = 0;
  auto base = std::filesystem::temp_directory_path() /
              ("plm_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::create_directories(base);
  return base.string();
}

// Writes the standard 75-image fixture and returns the IDX file path.
inline std::string fixture_idx(const std::string& dir) {
  std::string path = dir + "/train-images-idx3-ubyte";
  write_idx(path, make_stroke_images());
  return path;
}

}  // namespace fixtures
