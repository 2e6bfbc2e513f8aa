#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pedebate {

// Pairwise summation keeps the exact-mode reductions platform-stable.
double pairwise_sum(std::span<const double> v);

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(std::span<const double>(v.data(), v.size()));
}

std::string format_double(double v);        // shortest round-trip decimal
double parse_double(const std::string& s);  // strict parse, throws on garbage

// Bit-strings are std::string over '0'/'1'.
using Bits = std::string;

bool is_bits(const std::string& s);
Bits bits_from_u64(std::uint64_t v, int width);

struct contract_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Worker count for embarrassingly parallel jobs; PEDEBATE_THREADS caps it.
unsigned worker_count(std::size_t jobs);

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw contract_error(msg);
}

}  // namespace pedebate
