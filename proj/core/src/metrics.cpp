#include "dunet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dunet/common.hpp"

namespace dunet {

int binarize(double score, double threshold) {
    if (!(score >= 0.0 && score <= 1.0))
        raise(ErrorCategory::validation,
              "binarize: score outside [0,1]: " + std::to_string(score));
    return score > threshold ? 1 : 0;
}

Confusion confusion(const ScoredResidues& scored, double threshold) {
    if (scored.scores.size() != scored.labels.size())
        raise(ErrorCategory::validation,
              "confusion: score/label length mismatch for " + scored.id);
    Confusion c;
    for (std::size_t i = 0; i < scored.scores.size(); ++i) {
        if (scored.labels[i] == Label::unknown) continue;
        const int pred = binarize(scored.scores[i], threshold);
        const int truth = scored.labels[i] == Label::disordered ? 1 : 0;
        if (truth == 1) (pred == 1 ? c.tp : c.fn)++;
        else (pred == 1 ? c.fp : c.tn)++;
    }
    if (c.total() == 0)
        raise(ErrorCategory::validation,
              "confusion: no labeled residues in " + scored.id);
    return c;
}

BinaryMetric mcc_binary(const Confusion& c) {
    const double s1 = static_cast<double>(c.tp + c.fp);
    const double s2 = static_cast<double>(c.tp + c.fn);
    const double s3 = static_cast<double>(c.tn + c.fp);
    const double s4 = static_cast<double>(c.tn + c.fn);
    const double denom = s1 * s2 * s3 * s4;
    if (denom == 0.0) return {0.0, true};
    const double num = static_cast<double>(c.tp) * static_cast<double>(c.tn) -
                       static_cast<double>(c.fp) * static_cast<double>(c.fn);
    return {num / std::sqrt(denom), false};
}

BinaryMetric f1(const Confusion& c) {
    const double denom = static_cast<double>(2 * c.tp + c.fp + c.fn);
    if (denom == 0.0) return {0.0, true};
    return {2.0 * static_cast<double>(c.tp) / denom, false};
}

std::optional<double> try_roc_auc(std::span<const double> scores,
                                  std::span<const Label> labels) {
    if (scores.size() != labels.size())
        raise(ErrorCategory::validation, "roc_auc: score/label length mismatch");
    std::vector<std::size_t> idx;
    idx.reserve(scores.size());
    long long npos = 0, nneg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] == Label::unknown) continue;
        if (std::isnan(scores[i]))
            raise(ErrorCategory::validation, "roc_auc: NaN score");
        idx.push_back(i);
        if (labels[i] == Label::disordered) ++npos;
        else ++nneg;
    }
    if (npos == 0 || nneg == 0) return std::nullopt;

    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] < scores[b];
        return a < b;
    });

    // Rank sum of positives with average ranks over tie groups. Rank sums
    // are half-integers well below 2^53, so all arithmetic below is exact.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
        const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k)
            if (labels[idx[k]] == Label::disordered) rank_sum_pos += avg_rank;
        i = j;
    }
    const double np = static_cast<double>(npos);
    const double w = rank_sum_pos - np * (np + 1.0) * 0.5;
    const double d = np * static_cast<double>(nneg);
    // Canonical rounding: divide the smaller of (w, d-w) so that
    // roc_auc(s) + roc_auc(1-s) == 1 holds bitwise.
    const double wc = d - w;
    if (w <= wc) return w / d;
    return 1.0 - wc / d;
}

double roc_auc(const ScoredResidues& scored) {
    auto v = try_roc_auc(scored.scores, scored.labels);
    if (!v)
        raise(ErrorCategory::validation,
              "roc_auc: undefined AUC (single-class input) for " + scored.id);
    return *v;
}

MetricReport score_target(const ScoredResidues& scored, double threshold) {
    MetricReport r;
    const Confusion c = confusion(scored, threshold);
    r.n_labeled = c.total();
    r.n_positive = c.tp + c.fn;
    r.n_negative = c.tn + c.fp;
    const BinaryMetric m = mcc_binary(c);
    const BinaryMetric f = f1(c);
    r.mcc = m.value;
    r.mcc_degenerate = m.degenerate;
    r.f1 = f.value;
    r.f1_degenerate = f.degenerate;
    r.roc_auc = try_roc_auc(scored.scores, scored.labels);
    return r;
}

AggregateReport aggregate(std::span<const ScoredResidues> targets, double threshold) {
    if (targets.empty())
        raise(ErrorCategory::validation, "aggregate: empty target list");
    AggregateReport rep;
    rep.n_targets = static_cast<int>(targets.size());

    ScoredResidues pooled;
    pooled.id = "<pooled>";
    double sum_auc = 0.0, sum_mcc = 0.0, sum_f1 = 0.0;
    for (const auto& t : targets) {
        pooled.scores.insert(pooled.scores.end(), t.scores.begin(), t.scores.end());
        pooled.labels.insert(pooled.labels.end(), t.labels.begin(), t.labels.end());
        const MetricReport r = score_target(t, threshold);
        if (r.roc_auc) {
            sum_auc += *r.roc_auc;
            ++rep.roc_auc_targets;
        }
        sum_mcc += r.mcc;
        sum_f1 += r.f1;
    }
    rep.pooled = score_target(pooled, threshold);
    if (rep.roc_auc_targets > 0) rep.mean_roc_auc = sum_auc / rep.roc_auc_targets;
    rep.mean_mcc = sum_mcc / rep.n_targets;
    rep.mean_f1 = sum_f1 / rep.n_targets;
    return rep;
}

}  // namespace dunet
