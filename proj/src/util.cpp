#include "pedebate/util.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "pedebate/rng.hpp"

namespace pedebate {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  require(!s.empty(), "parse_double: empty string");
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  require(end == s.c_str() + s.size(), "parse_double: trailing characters in '" + s + "'");
  return v;
}

bool is_bits(const std::string& s) {
  for (char c : s)
    if (c != '0' && c != '1') return false;
  return true;
}

Bits bits_from_u64(std::uint64_t v, int width) {
  Bits out(static_cast<std::size_t>(width), '0');
  for (int i = width - 1; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = (v & 1u) ? '1' : '0';
    v >>= 1;
  }
  return out;
}

std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  h ^= CounterRng::mix(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t hash_str(std::uint64_t h, const char* data, std::size_t len) {
  // FNV-1a folded into the running key.
  std::uint64_t f = 1469598103934665603ULL;
  for (std::size_t i = 0; i < len; ++i) {
    f ^= static_cast<unsigned char>(data[i]);
    f *= 1099511628211ULL;
  }
  return hash_combine(h, f);
}

double unit_from_hash(std::uint64_t h) {
  return static_cast<double>(CounterRng::mix(h) >> 11) * 0x1.0p-53;
}

unsigned worker_count(std::size_t jobs) {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("PEDEBATE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = static_cast<unsigned>(v);
  }
  return std::min<unsigned>(n, static_cast<unsigned>(std::max<std::size_t>(jobs, 1)));
}

}  // namespace pedebate
