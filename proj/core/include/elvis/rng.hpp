#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace elvis {

/// Seeded generator with explicit, platform-independent draw routines.
///
/// The standard distributions are implementation-defined, so logs produced
/// with them would differ between standard libraries. Every draw here is
/// computed from raw mt19937_64 output instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  /// Child stream keyed by a label. Streams derived from the same parent seed
  /// with different labels are independent of each other and of draw order.
  [[nodiscard]] Rng derive(std::string_view label) const;
  [[nodiscard]] Rng derive(std::uint64_t key) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  bool bernoulli(double p);
  /// Uniform index in [0, n). n must be positive.
  std::size_t index(std::size_t n);
  double normal(double mean = 0.0, double sd = 1.0);

  std::uint64_t seed() const { return seed_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

/// SplitMix64 finalizer; used to mix labels into seeds.
std::uint64_t mix64(std::uint64_t x);
/// FNV-1a over bytes.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace elvis
