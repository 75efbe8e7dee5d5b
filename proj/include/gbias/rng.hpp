#pragma once

// Random streams used throughout the library.
//
// Engine: std::mt19937_64, seeded with a SplitMix64-mixed 64-bit value.
// Uniforms: top 53 bits of one engine output, offset by half an ulp so that
// every draw lies strictly inside (0, 1).
// Normals: Box-Muller (trigonometric form), values emitted in pairs.
//
// Sub-streams (bootstrap replicates, simulation paths, pipeline days) get
// their seed from derive_seed(master, keys...), so results do not depend on
// the order in which independent units are evaluated.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gbias {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Folds a list of keys into a master seed. Order of keys matters.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> keys) noexcept;

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;

  /// Standard normal.
  double normal() noexcept;

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gbias
