#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dunet {

// Ternary per-residue annotation. Unknown residues carry scores but are
// excluded from every metric.
enum class Label : std::uint8_t { ordered = 0, disordered = 1, unknown = 2 };

using LabelTrack = std::vector<Label>;

struct ScoredResidues {
    std::string id;  // provenance: owning sequence
    std::vector<double> scores;
    LabelTrack labels;
};

// Strictly-greater-than threshold: 0.5 itself maps to ordered.
int binarize(double score, double threshold = 0.5);

struct Confusion {
    long long tp = 0, fp = 0, tn = 0, fn = 0;
    long long total() const { return tp + fp + tn + fn; }
};

Confusion confusion(const ScoredResidues& scored, double threshold = 0.5);

struct BinaryMetric {
    double value = 0.0;
    bool degenerate = false;  // a zero denominator was replaced by 0
};

BinaryMetric mcc_binary(const Confusion& c);
BinaryMetric f1(const Confusion& c);

// Mann-Whitney AUC, ties counted 1/2, exact average-rank computation.
// nullopt when only one class is present among non-unknown residues.
std::optional<double> try_roc_auc(std::span<const double> scores,
                                  std::span<const Label> labels);
// Throwing variant; rejects single-class input with an "undefined AUC" error.
double roc_auc(const ScoredResidues& scored);

enum class AggregationMode { pooled, per_target_mean };

struct MetricReport {
    std::optional<double> roc_auc;
    double mcc = 0.0;
    double f1 = 0.0;
    bool mcc_degenerate = false;
    bool f1_degenerate = false;
    long long n_labeled = 0;
    long long n_positive = 0;
    long long n_negative = 0;
};

MetricReport score_target(const ScoredResidues& scored, double threshold = 0.5);

struct AggregateReport {
    MetricReport pooled;
    double mean_roc_auc = 0.0;     // over targets where AUC is defined
    int roc_auc_targets = 0;
    double mean_mcc = 0.0;         // degenerate targets contribute 0 by convention
    double mean_f1 = 0.0;
    int n_targets = 0;
};

AggregateReport aggregate(std::span<const ScoredResidues> targets,
                          double threshold = 0.5);

}  // namespace dunet
