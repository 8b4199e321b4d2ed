#pragma once

#include <complex>
#include <cstdint>
#include <string_view>

namespace irsrrm {

/// Deterministic 64-bit generator (SplitMix64 stream).
///
/// Substreams are derived by hashing (master seed, trial index, purpose tag),
/// so independent trials and independent purposes within a trial never share
/// a stream. The generator is self-contained to keep output byte-identical
/// across platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  /// Derives the substream for (master, trial, purpose).
  static Rng substream(uint64_t master, uint64_t trial, std::string_view purpose);

  uint64_t next_u64();

  /// Uniform double in [0, 1).
  double uniform();

  /// Standard normal via Box-Muller (pairs cached).
  double normal();

  /// Circularly-symmetric complex Gaussian: real and imaginary parts each
  /// N(0, variance / 2).
  std::complex<double> cnormal(double variance);

 private:
  uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// FNV-1a hash of a byte string.
uint64_t fnv1a(std::string_view s);

/// Order-dependent 64-bit combiner used by the substream derivation.
uint64_t hash_combine(uint64_t a, uint64_t b);

}  // namespace irsrrm
