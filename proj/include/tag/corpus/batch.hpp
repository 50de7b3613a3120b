#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tag {

struct Batch {
  std::vector<std::size_t> indices;  // positions in the corpus
  std::size_t index = 0;
  std::uint64_t epoch_seed = 0;
};

// Shuffles 0..corpus_size-1 with a generator keyed by (seed, epoch) and cuts
// it into batches of batch_size; the last batch may be short.
std::vector<Batch> batch_iter(std::size_t corpus_size, std::size_t batch_size, std::size_t epoch,
                              std::uint64_t seed);

}  // namespace tag
