#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dunet/datasets.hpp"
#include "dunet/model.hpp"
#include "dunet/objective.hpp"

namespace dunet {

struct TrainConfig {
    int batch_size = 8;
    double lr0 = 0.001;
    double lr_decay_factor = 10.0;
    int plateau_patience = 1;     // epochs without improvement before an LR drop
    int early_stop_patience = 5;  // epochs without improvement before stopping
    double min_delta = 1e-6;      // improvement threshold on validation loss
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    int max_epochs = 100;
    std::uint64_t seed = 1;
};

void validate_train_config(const TrainConfig& tc);

struct AdamState {
    ParamMirror m;
    ParamMirror v;
    long long t = 0;
    static AdamState zeros_like(const ModelParams& p);
};

// Bias-corrected Adam update, in place.
void adam_step(ModelParams& params, const ParamMirror& grads, AdamState& state,
               double lr, const TrainConfig& tc = {});

struct Batch {
    std::vector<int> indices;
    int padded_len = 0;
};

// Deterministic per (seed, epoch); each batch pads to its longest member
// rounded up to a multiple of pad_multiple.
std::vector<Batch> make_batches(std::span<const int> lengths, int batch_size,
                                std::uint64_t seed, int epoch, int pad_multiple);

// Stratified fold assignment over joint 4x4 quantile bins of
// (sequence length, disordered ratio), dealt round-robin.
std::vector<int> stratified_folds(const Dataset& ds, int k, std::uint64_t seed);

// LR-plateau plus early-stop bookkeeping. An epoch improves when its
// validation loss undercuts the best so far by at least min_delta; the
// learning rate divides by decay_factor after plateau_patience
// non-improving epochs, training stops after early_stop_patience of them.
class PlateauSchedule {
public:
    PlateauSchedule(const TrainConfig& tc)
        : lr_(tc.lr0), decay_(tc.lr_decay_factor), min_delta_(tc.min_delta),
          plateau_patience_(tc.plateau_patience), stop_patience_(tc.early_stop_patience) {}

    struct Outcome {
        bool improved = false;
        bool stop = false;
    };
    Outcome observe(double val_loss);

    double lr() const { return lr_; }
    double best_val_loss() const { return best_; }
    int best_epoch() const { return best_epoch_; }  // 1-based, 0 if none
    int epochs_seen() const { return epoch_; }

private:
    double lr_;
    double decay_;
    double min_delta_;
    int plateau_patience_;
    int stop_patience_;
    double best_ = std::numeric_limits<double>::infinity();
    int best_epoch_ = 0;
    int epoch_ = 0;
    int wait_lr_ = 0;
    int wait_stop_ = 0;
};

struct EpochStats {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double lr = 0.0;  // rate in effect during this epoch
    bool is_best = false;
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
    int best_epoch = 0;  // 1-based
    double best_val_loss = 0.0;
};

void write_history_csv(const TrainHistory& h, const std::filesystem::path& path);

struct TrainResult {
    ModelParams best_params;
    TrainHistory history;
};

// Both datasets must already be standardized (fit on the training split
// only). Validation loss is evaluated in inference mode.
TrainResult train(const ModelConfig& mc, const TrainConfig& tc, const Dataset& train_set,
                  const Dataset& val_set, const ObjectiveOptions& obj = {});

struct PredictionProfile {
    std::vector<double> scores;      // per-residue disorder probability
    std::vector<int> classes;        // strict >0.5 binarization
};

// Arithmetic mean of equally-long probability profiles, binarized with the
// strict >0.5 rule. Profiles are summed in a canonical (sorted) order so the
// result is bitwise invariant under permutations of the input list.
PredictionProfile ensemble_mean(std::span<const std::vector<double>> profiles);

// Averages per-residue disorder probabilities across members; each member
// applies its own standardizer to the raw embedding.
PredictionProfile ensemble_predict(std::span<const Checkpoint> members,
                                   const EmbeddingMatrix& raw_emb,
                                   const std::string& sequence);

// --- Synthetic data -------------------------------------------------------
// Separable toy task: the label is a thresholded moving average of feature
// channel 0, planted in otherwise random embeddings.

struct SynthOptions {
    int n_sequences = 200;
    int length = 64;
    int dim = 16;
    std::uint64_t seed = 7;
    std::string id_prefix = "SYN";
};

Dataset make_synthetic_dataset(const SynthOptions& opt);

}  // namespace dunet
