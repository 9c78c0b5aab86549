#pragma once

// Counter-based random numbers: every draw is a pure function of
// (master seed, replicate, stream, counter), so a sample never depends on
// the order in which replicates are scheduled.

#include <cstdint>

#include "sgof/complex.hpp"

namespace sgof {

struct Seed {
  std::uint64_t master = 0;
  std::uint64_t replicate = 0;

  friend bool operator==(const Seed&, const Seed&) = default;
};

// Seed for replicate `rep` of grid point `grid` in a batch run.
inline Seed derive_seed(std::uint64_t master, std::uint64_t grid, std::uint64_t rep) {
  return {detail::mix64(master ^ detail::mix64(grid + 0x632be59bd9b4e019ULL)), rep};
}

class CounterRng {
 public:
  CounterRng(Seed seed, std::uint64_t stream)
      : key_(detail::mix64(detail::mix64(seed.master + 0x9e3779b97f4a7c15ULL) ^
                           detail::mix64(seed.replicate * 0xd1b54a32d192ed03ULL + 1)) ^
             detail::mix64(stream * 0xaef17502108ef2d9ULL + 7)) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return detail::mix64(detail::mix64(key_ + counter * 0x9e3779b97f4a7c15ULL) ^ key_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

}  // namespace sgof
