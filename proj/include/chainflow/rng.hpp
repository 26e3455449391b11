#pragma once

#include <cstdint>
#include <random>

namespace chainflow {

// Deterministic RNG wrapper. Distribution helpers are hand-rolled because the
// std <random> distributions are implementation-defined; reproducibility of
// generated instances across standard libraries matters more than speed here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform double in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). Rejection-free modulo bias is negligible for
  // the small ranges used here, but use Lemire's method anyway.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint64_t>(m >> 64);
  }

  int int_in(int lo, int hi_inclusive) {
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi_inclusive - lo + 1)));
  }

  // Derive an independent stream (used to decouple sampling phases so adding
  // a phase does not perturb the others).
  Rng fork(std::uint64_t salt) {
    std::uint64_t s = next_u64() ^ (salt * 0x9e3779b97f4a7c15ull);
    return Rng(s);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace chainflow
