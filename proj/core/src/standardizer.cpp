#include <cmath>

#include "dunet/datasets.hpp"

namespace dunet {

Standardizer Standardizer::identity(int dim) {
    Standardizer s;
    s.mean.assign(static_cast<std::size_t>(dim), 0.0);
    s.std_dev.assign(static_cast<std::size_t>(dim), 1.0);
    return s;
}

Standardizer fit_standardizer(std::span<const EmbeddingMatrix> training) {
    if (training.empty())
        raise(ErrorCategory::validation, "fit_standardizer: empty training stream");
    const int dim = training.front().cols;
    for (const auto& e : training)
        if (e.cols != dim)
            raise(ErrorCategory::validation,
                  "fit_standardizer: feature dimension mismatch for " + e.id);

    // Welford per feature across all training residues
    std::vector<double> mean(static_cast<std::size_t>(dim), 0.0);
    std::vector<double> m2(static_cast<std::size_t>(dim), 0.0);
    long long n = 0;
    for (const auto& e : training) {
        for (int i = 0; i < e.rows; ++i) {
            ++n;
            const double inv_n = 1.0 / static_cast<double>(n);
            const double* row = &e.values[static_cast<std::size_t>(i) * dim];
            for (int d = 0; d < dim; ++d) {
                const double delta = row[d] - mean[d];
                mean[d] += delta * inv_n;
                m2[d] += delta * (row[d] - mean[d]);
            }
        }
    }
    if (n < 2)
        raise(ErrorCategory::validation,
              "fit_standardizer: need at least 2 training residues, got " +
                  std::to_string(n));

    Standardizer s;
    s.mean = std::move(mean);
    s.std_dev.resize(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) {
        const double var = m2[d] / static_cast<double>(n);  // population convention
        s.std_dev[d] = std::max(std::sqrt(var), Standardizer::epsilon);
    }
    return s;
}

EmbeddingMatrix apply_standardizer(const Standardizer& s, const EmbeddingMatrix& emb) {
    if (!s.fitted())
        raise(ErrorCategory::validation, "apply_standardizer: standardizer not fitted");
    if (static_cast<int>(s.mean.size()) != emb.cols)
        raise(ErrorCategory::validation,
              "apply_standardizer: dimension mismatch: standardizer has " +
                  std::to_string(s.mean.size()) + " features, embedding " +
                  std::to_string(emb.cols));
    EmbeddingMatrix out = emb;
    for (int i = 0; i < emb.rows; ++i) {
        double* row = &out.values[static_cast<std::size_t>(i) * emb.cols];
        for (int d = 0; d < emb.cols; ++d) row[d] = (row[d] - s.mean[d]) / s.std_dev[d];
    }
    return out;
}

}  // namespace dunet
