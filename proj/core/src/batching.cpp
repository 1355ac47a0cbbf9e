#include <algorithm>
#include <numeric>

#include "dunet/trainer.hpp"

namespace dunet {

std::vector<Batch> make_batches(std::span<const int> lengths, int batch_size,
                                std::uint64_t seed, int epoch, int pad_multiple) {
    if (lengths.empty())
        raise(ErrorCategory::validation, "make_batches: empty dataset");
    if (batch_size < 1)
        raise(ErrorCategory::validation, "make_batches: batch size must be positive");
    if (pad_multiple < 1)
        raise(ErrorCategory::validation, "make_batches: pad multiple must be positive");

    std::vector<int> order(lengths.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng = Rng::derive(seed, 0xBA7C000000ULL + static_cast<std::uint64_t>(epoch));
    rng.shuffle(order);

    std::vector<Batch> batches;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch_size)) {
        Batch b;
        const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(batch_size));
        int max_len = 0;
        for (std::size_t i = start; i < end; ++i) {
            b.indices.push_back(order[i]);
            max_len = std::max(max_len, lengths[static_cast<std::size_t>(order[i])]);
        }
        b.padded_len = (max_len + pad_multiple - 1) / pad_multiple * pad_multiple;
        batches.push_back(std::move(b));
    }
    return batches;
}

}  // namespace dunet
