#include <cmath>

#include "dunet/trainer.hpp"

namespace dunet {

void validate_train_config(const TrainConfig& tc) {
    auto bad = [](const std::string& m) { raise(ErrorCategory::validation, "TrainConfig: " + m); };
    if (tc.batch_size < 1) bad("batch_size must be positive");
    if (!(tc.lr0 > 0.0)) bad("lr0 must be positive");
    if (!(tc.lr_decay_factor > 1.0)) bad("lr_decay_factor must exceed 1");
    if (tc.plateau_patience < 1) bad("plateau_patience must be at least 1");
    if (tc.early_stop_patience < 1) bad("early_stop_patience must be at least 1");
    if (!(tc.adam_beta1 > 0.0 && tc.adam_beta1 < 1.0)) bad("beta1 must lie in (0,1)");
    if (!(tc.adam_beta2 > 0.0 && tc.adam_beta2 < 1.0)) bad("beta2 must lie in (0,1)");
    if (!(tc.adam_epsilon > 0.0)) bad("adam_epsilon must be positive");
    if (tc.max_epochs < 1) bad("max_epochs must be positive");
}

PlateauSchedule::Outcome PlateauSchedule::observe(double val_loss) {
    ++epoch_;
    Outcome out;
    if (best_ - val_loss >= min_delta_) {
        best_ = val_loss;
        best_epoch_ = epoch_;
        wait_lr_ = 0;
        wait_stop_ = 0;
        out.improved = true;
        return out;
    }
    ++wait_lr_;
    ++wait_stop_;
    if (wait_lr_ >= plateau_patience_) {
        lr_ /= decay_;
        wait_lr_ = 0;
    }
    if (wait_stop_ >= stop_patience_) out.stop = true;
    return out;
}

AdamState AdamState::zeros_like(const ModelParams& p) {
    AdamState s;
    s.m = ParamMirror::zeros_like(p);
    s.v = ParamMirror::zeros_like(p);
    s.t = 0;
    return s;
}

void adam_step(ModelParams& params, const ParamMirror& grads, AdamState& state,
               double lr, const TrainConfig& tc) {
    if (grads.values.size() != params.tensors.size() ||
        state.m.values.size() != params.tensors.size())
        raise(ErrorCategory::validation, "adam_step: shape mismatch");
    state.t += 1;
    const double b1 = tc.adam_beta1, b2 = tc.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
    for (std::size_t ti = 0; ti < params.tensors.size(); ++ti) {
        auto& theta = params.tensors[ti].values;
        const auto& g = grads.values[ti];
        auto& m = state.m.values[ti];
        auto& v = state.v.values[ti];
        if (g.size() != theta.size())
            raise(ErrorCategory::validation, "adam_step: tensor size mismatch at index " +
                                                 std::to_string(ti));
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            const double m_hat = m[i] / c1;
            const double v_hat = v[i] / c2;
            theta[i] -= lr * m_hat / (std::sqrt(v_hat) + tc.adam_epsilon);
        }
    }
}

}  // namespace dunet
