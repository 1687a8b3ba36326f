#pragma once

#include <array>
#include <cstdint>

namespace infsamp {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every output
// block is a pure function of (counter, key), so streams are portable across
// platforms and independent of thread scheduling.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key);
};

// Sequential draws from one substream. The key is the 64-bit master seed
// split into halves; the counter is (block index lo, block index hi,
// stream id lo, stream id hi). Distinct stream ids never share a block.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Standard normal via Box-Muller.
  double normal();
  // Uniform integer in [0, bound), rejection-free for bound = 2^k.
  std::uint64_t below(std::uint64_t bound);
  // Uniform n-bit string in the low bits.
  std::uint64_t bits(int n);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  void refill();

  Philox4x32::Key key_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace infsamp
