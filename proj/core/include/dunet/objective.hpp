#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dunet {

struct ObjectiveOptions {
    double mcc_epsilon = 1e-7;   // the small e under Eq.-style MCC square root
    double prob_clip = 1e-7;     // probabilities clipped to [clip, 1-clip] before logs
    bool mcc_per_sequence = false;  // default: soft counts pooled over the whole batch
};

// All functions reduce over mask!=0 positions only. y is binary {0,1}
// (1 = disordered), yhat a predicted probability.

double bce(std::span<const double> y, std::span<const double> yhat,
           std::span<const std::uint8_t> mask, const ObjectiveOptions& opt = {});
// Adds d(bce)/d(yhat_i) into grad (grad must be pre-sized, caller zeroes).
void bce_grad(std::span<const double> y, std::span<const double> yhat,
              std::span<const std::uint8_t> mask, std::span<double> grad,
              const ObjectiveOptions& opt = {});

double soft_mcc(std::span<const double> y, std::span<const double> yhat,
                std::span<const std::uint8_t> mask, const ObjectiveOptions& opt = {});
void soft_mcc_grad(std::span<const double> y, std::span<const double> yhat,
                   std::span<const std::uint8_t> mask, std::span<double> grad,
                   const ObjectiveOptions& opt = {});

struct LossValue {
    double bce = 0.0;
    double soft_mcc = 0.0;
    double composite = 0.0;  // bce - soft_mcc
};

LossValue composite_loss(std::span<const double> y, std::span<const double> yhat,
                         std::span<const std::uint8_t> mask,
                         const ObjectiveOptions& opt = {});
// Writes d(composite)/d(yhat_i) into grad (overwrites).
LossValue composite_loss_grad(std::span<const double> y, std::span<const double> yhat,
                              std::span<const std::uint8_t> mask, std::span<double> grad,
                              const ObjectiveOptions& opt = {});

// Batch variant over per-sequence slices of one flat array. offsets has one
// entry per sequence (start index); the last slice ends at y.size(). With
// mcc_per_sequence the composite is averaged over sequences, otherwise the
// flat arrays are treated as one pooled reduction.
LossValue composite_loss_batch(std::span<const double> y, std::span<const double> yhat,
                               std::span<const std::uint8_t> mask,
                               std::span<const std::size_t> offsets,
                               std::span<double> grad_or_empty,
                               const ObjectiveOptions& opt = {});

}  // namespace dunet
