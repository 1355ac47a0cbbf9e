#include <algorithm>
#include <cstring>

#include "dunet/trainer.hpp"

namespace dunet {

PredictionProfile ensemble_predict(std::span<const Checkpoint> members,
                                   const EmbeddingMatrix& raw_emb,
                                   const std::string& sequence) {
    if (members.empty())
        raise(ErrorCategory::validation, "ensemble_predict: empty model list");
    const int dim = members.front().config.input_dim;
    for (const auto& m : members)
        if (m.config.input_dim != dim)
            raise(ErrorCategory::validation,
                  "ensemble_predict: members disagree on input_dim");
    if (static_cast<int>(sequence.size()) != raw_emb.rows)
        raise(ErrorCategory::validation,
              "ensemble_predict: sequence/embedding length mismatch for " + raw_emb.id);

    const int L = raw_emb.rows;
    std::vector<std::vector<double>> profiles;
    profiles.reserve(members.size());
    Rng rng(0);  // inference only
    for (const auto& m : members) {
        const EmbeddingMatrix std_emb = apply_standardizer(
            m.standardizer.fitted() ? m.standardizer : Standardizer::identity(dim), raw_emb);
        Tensor2 emb(L, dim);
        std::copy(std_emb.values.begin(), std_emb.values.end(), emb.data.begin());
        Tensor2 oh;
        if (m.config.use_onehot_input) oh = onehot_encode(sequence);
        const ResidueMask mask = prefix_mask(L, L);
        const Tensor2 probs = forward(m.config, m.params, emb,
                                      m.config.use_onehot_input ? &oh : nullptr, mask,
                                      RunMode::infer, rng);
        std::vector<double> prof(static_cast<std::size_t>(L));
        for (int i = 0; i < L; ++i) prof[static_cast<std::size_t>(i)] = probs.at(i, 1);
        profiles.push_back(std::move(prof));
    }

    return ensemble_mean(profiles);
}

PredictionProfile ensemble_mean(std::span<const std::vector<double>> profiles) {
    if (profiles.empty())
        raise(ErrorCategory::validation, "ensemble_mean: empty profile list");
    const std::size_t L = profiles.front().size();
    for (const auto& p : profiles)
        if (p.size() != L)
            raise(ErrorCategory::validation, "ensemble_mean: profile length mismatch");

    // Canonical summation order makes the mean bitwise invariant under
    // permutations of the member list.
    std::vector<std::vector<double>> sorted(profiles.begin(), profiles.end());
    std::sort(sorted.begin(), sorted.end());

    PredictionProfile out;
    out.scores.assign(L, 0.0);
    for (const auto& prof : sorted)
        for (std::size_t i = 0; i < L; ++i) out.scores[i] += prof[i];
    const double inv = 1.0 / static_cast<double>(sorted.size());
    out.classes.resize(L);
    for (std::size_t i = 0; i < L; ++i) {
        out.scores[i] *= inv;
        out.classes[i] = out.scores[i] > 0.5 ? 1 : 0;
    }
    return out;
}

}  // namespace dunet
