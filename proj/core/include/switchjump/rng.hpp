#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace switchjump {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// The key carries the 64-bit experiment seed and the upper half of the
// counter carries a 64-bit stream identifier, so streams with distinct
// identifiers never overlap. The lower half of the counter is the block
// index inside a stream.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block bijection(Block counter, Key key);
};

// Independent substreams owned by a single sample path.
enum class Substream : std::uint64_t {
  brownian = 0,
  large_jump = 1,
  small_jump = 2,
  switching = 3,
  auxiliary = 4,
};

// Identifier of substream `sub` of path `path_index`. Distinct (path, sub)
// pairs map to distinct identifiers.
constexpr std::uint64_t stream_id(std::uint64_t path_index, Substream sub) {
  return path_index * 16u + static_cast<std::uint64_t>(sub);
}

// A single random stream. Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1).
  double uniform_open();
  double normal();
  double exponential(double rate);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Philox4x32::Block buffer_{};
  int used_ = 4;
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

// SplitMix64 finalizer; used to derive child seeds.
std::uint64_t mix64(std::uint64_t z);

}  // namespace switchjump
