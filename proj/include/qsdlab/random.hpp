#pragma once

// Counter-based SplitMix64 stream. Output i of (seed, stream) depends only on
// those three numbers, so fixtures reproduce across languages and thread
// schedules.

#include "qsdlab/hilbert.hpp"

#include <cstdint>

namespace qsd {

std::uint64_t splitmix64_mix(std::uint64_t z);

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard normal by Box-Muller; consumes two uniforms.
  double normal();
  Complex complex_normal();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

StateVector random_state(const BasisTag& basis, CounterRng& rng);
/// Haar-distributed unitary (QR of a complex Ginibre matrix, phase-fixed).
UnitaryMatrix random_unitary(Index dim, CounterRng& rng);
/// Hermitian matrix rescaled to unit spectral norm.
HermitianGenerator random_hermitian(Index dim, CounterRng& rng);

}  // namespace qsd
