#include "tag/corpus/batch.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "tag/error.hpp"

namespace tag {

std::vector<Batch> batch_iter(std::size_t corpus_size, std::size_t batch_size, std::size_t epoch,
                              std::uint64_t seed) {
  if (batch_size == 0) throw ConfigError("batch size must be >= 1");
  if (corpus_size == 0) throw ValidationError("cannot batch an empty corpus");
  std::vector<std::size_t> order(corpus_size);
  std::iota(order.begin(), order.end(), 0);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch), static_cast<std::uint32_t>(epoch >> 32)};
  std::mt19937_64 rng(seq);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<Batch> out;
  for (std::size_t start = 0; start < corpus_size; start += batch_size) {
    Batch b;
    b.index = out.size();
    b.epoch_seed = seed ^ (0x9e3779b97f4a7c15ULL * (epoch + 1));
    const std::size_t end = std::min(corpus_size, start + batch_size);
    b.indices.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(end));
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace tag
