// include/vigas/rng.h
//
// Copyright 2026 The ViGAS Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef VIGAS_RNG_H_
#define VIGAS_RNG_H_

#include <cstdint>
#include <string_view>

namespace vigas {

// Deterministic generator with explicit distributions. std::mt19937 is
// portable but the std:: distributions are not, so everything that must be
// byte-reproducible (dataset generation, init, shuffling) goes through this
// class instead of <random>.
//
// All randomness in the project flows from one root seed through named
// substreams: Rng(seed, "scene", i), Rng(seed, "init"), Rng(seed, "shuffle",
// epoch), so components are independently reproducible.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(splitmix(seed)) {}
  Rng(uint64_t seed, std::string_view stream, uint64_t index = 0);

  // xorshift* core.
  uint64_t next_u64();

  // Uniform on [0, 1).
  double uniform();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer on [0, n); n > 0.
  uint64_t uniform_int(uint64_t n);
  // Standard normal (Box-Muller, cached spare).
  double normal();

  // Fisher-Yates over indices [0, n).
  template <typename RandomIt>
  void shuffle(RandomIt first, RandomIt last) {
    auto n = static_cast<uint64_t>(last - first);
    for (uint64_t i = n; i > 1; --i) {
      uint64_t j = uniform_int(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  static uint64_t splitmix(uint64_t x);

  uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace vigas

#endif  // VIGAS_RNG_H_
