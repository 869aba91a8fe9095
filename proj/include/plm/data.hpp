#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "rng.hpp"

namespace plm {

inline constexpr int kImageDim = 784;
inline constexpr int kClassCount = 75;
inline constexpr int kGroupSize = 25;

using RawImage = std::array<std::uint8_t, kImageDim>;

// IDX3 image container: big-endian header (magic 2051, count, rows, cols),
// then count*rows*cols raw bytes. Only 28x28 payloads are accepted.
inline std::vector<RawImage> load_idx_images(const std::string& path, int count) {
  if (count < 1) throw RangeError("load_idx_images: count must be positive");
  std::string bytes = read_file_bytes(path);
  if (bytes.size() < 16) throw FormatError(path + ": too short for an IDX3 header");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  std::uint32_t magic = get_u32be(p);
  if (magic != 2051) throw FormatError(path + ": bad IDX magic " + std::to_string(magic));
  std::uint32_t n = get_u32be(p + 4);
  std::uint32_t rows = get_u32be(p + 8);
  std::uint32_t cols = get_u32be(p + 12);
  if (rows != 28 || cols != 28)
    throw FormatError(path + ": expected 28x28 images, got " + std::to_string(rows) + "x" +
                      std::to_string(cols));
  if (std::uint32_t(count) > n)
    throw RangeError(path + ": requested " + std::to_string(count) + " images, file has " +
                     std::to_string(n));
  std::size_t need = 16 + std::size_t(count) * kImageDim;
  if (bytes.size() < need) throw IoError(path + ": truncated image payload");
  std::vector<RawImage> out(count);
  for (int i = 0; i < count; ++i)
    std::memcpy(out[i].data(), p + 16 + std::size_t(i) * kImageDim, kImageDim);
  return out;
}

// Row-major flatten, bytes scaled into [0,1].
inline std::vector<double> vectorize(const RawImage& raw) {
  std::vector<double> v(kImageDim);
  for (int i = 0; i < kImageDim; ++i) v[i] = raw[i] / 255.0;
  return v;
}

// Subtracts the vector's own mean. Applied at the storage-net input boundary;
// synthesis targets stay in canonical [0,1].
inline std::vector<double> zero_mean(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - m;
  return out;
}

inline std::vector<double> one_hot(int cls, int width = kClassCount) {
  if (cls < 0 || cls >= width)
    throw RangeError("one_hot: class " + std::to_string(cls) + " outside 0.." +
                     std::to_string(width - 1));
  std::vector<double> v(width, 0.0);
  v[cls] = 1.0;
  return v;
}

// Classes 0..74 shuffled once; first 25 -> group 0, next 25 -> group 1, last
// 25 -> group 2 (reported as groups 1..3).
struct GroupAssignment {
  std::array<int, kClassCount> group_of{};
  std::uint64_t seed = 0;

  std::vector<int> members(int group) const {
    if (group < 0 || group > 2) throw RangeError("GroupAssignment: group outside 0..2");
    std::vector<int> out;
    out.reserve(kGroupSize);
    for (int c = 0; c < kClassCount; ++c)
      if (group_of[c] == group) out.push_back(c);
    return out;
  }
};

inline GroupAssignment split_groups(std::uint64_t seed) {
  std::array<int, kClassCount> perm{};
  for (int i = 0; i < kClassCount; ++i) perm[i] = i;
  Stream st(seed);
  st.shuffle(perm.begin(), perm.end());
  GroupAssignment ga;
  ga.seed = seed;
  for (int i = 0; i < kClassCount; ++i) ga.group_of[perm[i]] = i / kGroupSize;
  return ga;
}

// The 75 training images; class identity of image i is i. `image()` counts
// reads so tests can prove the PSGD loop never touches the originals.
struct Dataset75 {
  std::vector<std::vector<double>> images;
  mutable std::uint64_t reads = 0;

  const std::vector<double>& image(int cls) const {
    if (cls < 0 || cls >= static_cast<int>(images.size()))
      throw RangeError("Dataset75: class " + std::to_string(cls) + " out of range");
    ++reads;
    return images[cls];
  }
};

inline Dataset75 load_dataset(const std::string& idx_path) {
  Dataset75 ds;
  for (const RawImage& raw : load_idx_images(idx_path, kClassCount))
    ds.images.push_back(vectorize(raw));
  return ds;
}

// Binary PGM (P5), 28x28, maxval 255; values clamped to [0,1] then scaled.
inline void export_image_pgm(const std::vector<double>& v, const std::string& path) {
  if (v.size() != kImageDim) throw ShapeError("export_image_pgm: vector must have length 784");
  std::string out = "P5\n28 28\n255\n";
  for (double x : v) {
    double c = x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0))));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  f.flush();
  if (!f) throw IoError("write failed on " + path);
}

}  // namespace plm
