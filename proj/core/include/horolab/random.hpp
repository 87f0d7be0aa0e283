#pragma once

// Deterministic random streams. Monte-Carlo work is cut into fixed blocks,
// each with its own stream derived from (seed, block), so results do not
// depend on how many threads run the blocks.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace horolab {

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);
// Stable stream id for a name (FNV-1a), used to fan one seed out to
// independently named experiments.
std::uint64_t stream_id(const std::string& name);

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits; identical on every platform.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Marsaglia polar method, again to stay platform independent.
  double normal();
  // Index drawn from the cumulative weights `cdf` (last entry = total).
  std::size_t categorical(const std::vector<double>& cdf);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline constexpr std::size_t kBlockSize = 4096;

// Runs body(block, stream) for each block of `count` draws on up to `jobs`
// threads. body receives the half-open draw range of its block.
void parallel_blocks(std::size_t count, std::uint64_t seed, int jobs,
                     const std::function<void(std::size_t begin, std::size_t end, Stream& stream)>& body);

}  // namespace horolab
