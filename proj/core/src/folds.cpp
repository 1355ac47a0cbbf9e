#include <algorithm>
#include <array>

#include "dunet/trainer.hpp"

namespace dunet {

namespace {

// Nearest-rank quartile edges; bin(x) in {0..3}.
std::array<double, 3> quartile_edges(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return {values[(n - 1) / 4], values[(n - 1) / 2], values[3 * (n - 1) / 4]};
}

int bin_of(double x, const std::array<double, 3>& e) {
    if (x <= e[0]) return 0;
    if (x <= e[1]) return 1;
    if (x <= e[2]) return 2;
    return 3;
}

double disordered_ratio(const SequenceRecord& rec) {
    if (!rec.labels) return 0.0;
    long long pos = 0, labeled = 0;
    for (Label l : *rec.labels) {
        if (l == Label::unknown) continue;
        ++labeled;
        if (l == Label::disordered) ++pos;
    }
    return labeled > 0 ? static_cast<double>(pos) / static_cast<double>(labeled) : 0.0;
}

}  // namespace

std::vector<int> stratified_folds(const Dataset& ds, int k, std::uint64_t seed) {
    const std::size_t n = ds.size();
    if (k < 2)
        raise(ErrorCategory::validation, "stratified_folds: need at least 2 folds");
    if (static_cast<std::size_t>(k) > n)
        raise(ErrorCategory::validation,
              "stratified_folds: k=" + std::to_string(k) + " exceeds dataset size " +
                  std::to_string(n));

    std::vector<double> lengths(n), ratios(n);
    for (std::size_t i = 0; i < n; ++i) {
        lengths[i] = static_cast<double>(ds.items[i].record.sequence.size());
        ratios[i] = disordered_ratio(ds.items[i].record);
    }
    const auto len_edges = quartile_edges(lengths);
    const auto ratio_edges = quartile_edges(ratios);

    std::array<std::vector<int>, 16> buckets;
    for (std::size_t i = 0; i < n; ++i) {
        const int b = bin_of(lengths[i], len_edges) * 4 + bin_of(ratios[i], ratio_edges);
        buckets[static_cast<std::size_t>(b)].push_back(static_cast<int>(i));
    }

    // One shared rng and one rotating fold cursor keep fold sizes within 1
    // of each other across buckets.
    Rng rng = Rng::derive(seed, 0xF01D5ULL);
    std::vector<int> fold_of(n, -1);
    int cursor = 0;
    for (auto& bucket : buckets) {
        rng.shuffle(bucket);
        for (int idx : bucket) {
            fold_of[static_cast<std::size_t>(idx)] = cursor;
            cursor = (cursor + 1) % k;
        }
    }
    return fold_of;
}

}  // namespace dunet
