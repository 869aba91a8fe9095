#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace plm {

inline constexpr const char* kVersion = "0.1.0";

// Error taxonomy; the CLI maps these onto distinct exit codes.
struct ConfigError : std::runtime_error { using std::runtime_error::runtime_error; };
struct ShapeError : std::runtime_error { using std::runtime_error::runtime_error; };
struct RangeError : std::runtime_error { using std::runtime_error::runtime_error; };
struct FormatError : std::runtime_error { using std::runtime_error::runtime_error; };
struct IoError : std::runtime_error { using std::runtime_error::runtime_error; };
struct NumericError : std::runtime_error { using std::runtime_error::runtime_error; };

// Ties break toward the lowest index.
template <class T>
int argmax(const std::vector<T>& v) {
  if (v.empty()) throw ShapeError("argmax: empty vector");
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

// Trailing moving average; windows shorter than `window` at the head use all
// rows seen so far. Each mean is summed directly so results do not depend on
// a running-subtraction error term.
inline std::vector<double> moving_average(const std::vector<double>& x, int window) {
  if (window < 1) throw RangeError("moving_average: window must be >= 1");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::size_t lo = i + 1 >= static_cast<std::size_t>(window) ? i + 1 - window : 0;
    double s = 0.0;
    for (std::size_t j = lo; j <= i; ++j) s += x[j];
    out[i] = s / static_cast<double>(i - lo + 1);
  }
  return out;
}

// Locale-independent fixed-point formatting; deterministic bytes everywhere.
inline std::string fmt_fixed(double v, int precision) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
  if (r.ec != std::errc()) throw NumericError("fmt_fixed: value not representable");
  return std::string(buf, r.ptr);
}

// Shortest round-trip decimal form.
inline std::string fmt_shortest(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  if (r.ec != std::errc()) throw NumericError("fmt_shortest: value not representable");
  return std::string(buf, r.ptr);
}

// Little-endian scalar packing for the binary formats.
inline void put_u32le(std::string& out, std::uint32_t v) {
  char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff), char((v >> 24) & 0xff)};
  out.append(b, 4);
}

inline void put_i32le(std::string& out, std::int32_t v) {
  put_u32le(out, static_cast<std::uint32_t>(v));
}

inline void put_f64le(std::string& out, double v) {
  std::uint64_t u = std::bit_cast<std::uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = char((u >> (8 * i)) & 0xff);
  out.append(b, 8);
}

inline std::uint32_t get_u32le(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}

inline std::int32_t get_i32le(const unsigned char* p) {
  return static_cast<std::int32_t>(get_u32le(p));
}

inline double get_f64le(const unsigned char* p) {
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= std::uint64_t(p[i]) << (8 * i);
  return std::bit_cast<double>(u);
}

// Big-endian u32, as used by the IDX header.
inline std::uint32_t get_u32be(const unsigned char* p) {
  return std::uint32_t(p[0]) << 24 | std::uint32_t(p[1]) << 16 | std::uint32_t(p[2]) << 8 |
         std::uint32_t(p[3]);
}

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (f.bad()) throw IoError("read failed on " + path);
  return bytes;
}

// FNV-1a over a byte string; manifest artifact checksums.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string to_hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

}  // namespace plm
