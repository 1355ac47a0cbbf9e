#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "dunet/trainer.hpp"

namespace dunet {

namespace {

struct PreparedSeq {
    const DataItem* item = nullptr;
    int len = 0;
    std::vector<double> y;          // per real residue; 0 where unlabeled
    std::vector<std::uint8_t> lab;  // 1 where labeled (mask source)
};

std::vector<PreparedSeq> prepare(const Dataset& ds, const ModelConfig& mc, const char* which) {
    if (ds.empty())
        raise(ErrorCategory::validation,
              std::string("train: ") + which + " set is empty");
    std::vector<PreparedSeq> out;
    out.reserve(ds.size());
    for (const auto& item : ds.items) {
        const auto& rec = item.record;
        if (!rec.labels)
            raise(ErrorCategory::validation,
                  std::string("train: record ") + rec.id + " has no label track");
        if (static_cast<int>(rec.sequence.size()) > mc.max_len)
            raise(ErrorCategory::validation,
                  "train: sequence " + rec.id + " length " +
                      std::to_string(rec.sequence.size()) + " exceeds the model limit of " +
                      std::to_string(mc.max_len));
        if (item.embedding.cols != mc.input_dim)
            raise(ErrorCategory::validation,
                  "train: embedding for " + rec.id + " has " +
                      std::to_string(item.embedding.cols) + " features, config expects " +
                      std::to_string(mc.input_dim));
        PreparedSeq p;
        p.item = &item;
        p.len = static_cast<int>(rec.sequence.size());
        p.y.resize(rec.sequence.size(), 0.0);
        p.lab.resize(rec.sequence.size(), 0);
        bool any = false;
        for (std::size_t i = 0; i < rec.labels->size(); ++i) {
            const Label l = (*rec.labels)[i];
            if (l == Label::unknown) continue;
            p.lab[i] = 1;
            p.y[i] = l == Label::disordered ? 1.0 : 0.0;
            any = true;
        }
        if (!any)
            raise(ErrorCategory::validation,
                  "train: record " + rec.id + " has no labeled residues");
        out.push_back(std::move(p));
    }
    return out;
}

Tensor2 padded_input(const PreparedSeq& p, int padded_len, int dim) {
    Tensor2 t(padded_len, dim);
    std::copy(p.item->embedding.values.begin(), p.item->embedding.values.end(),
              t.data.begin());
    return t;
}

Tensor2 padded_onehot(const PreparedSeq& p, int padded_len) {
    Tensor2 raw = onehot_encode(p.item->record.sequence);
    Tensor2 t(padded_len, 20);
    std::copy(raw.data.begin(), raw.data.end(), t.data.begin());
    return t;
}

// Pooled composite loss over a whole set, inference mode.
LossValue evaluate_loss(const ModelConfig& mc, const ModelParams& params,
                        const std::vector<PreparedSeq>& seqs, const ObjectiveOptions& obj) {
    std::vector<double> y, p;
    std::vector<std::uint8_t> m;
    std::vector<std::size_t> offsets;
    Rng rng(0);  // unused in inference mode
    for (const auto& s : seqs) {
        offsets.push_back(y.size());
        Tensor2 emb(s.len, mc.input_dim);
        std::copy(s.item->embedding.values.begin(), s.item->embedding.values.end(),
                  emb.data.begin());
        Tensor2 oh;
        if (mc.use_onehot_input) oh = onehot_encode(s.item->record.sequence);
        const ResidueMask mask = prefix_mask(s.len, s.len);
        const Tensor2 probs = forward(mc, params, emb, mc.use_onehot_input ? &oh : nullptr,
                                      mask, RunMode::infer, rng);
        for (int i = 0; i < s.len; ++i) {
            y.push_back(s.y[static_cast<std::size_t>(i)]);
            p.push_back(probs.at(i, 1));
            m.push_back(s.lab[static_cast<std::size_t>(i)]);
        }
    }
    return composite_loss_batch(y, p, m, offsets, {}, obj);
}

}  // namespace

TrainResult train(const ModelConfig& mc, const TrainConfig& tc, const Dataset& train_set,
                  const Dataset& val_set, const ObjectiveOptions& obj) {
    validate_config(mc);
    validate_train_config(tc);
    const auto train_seqs = prepare(train_set, mc, "training");
    if (val_set.empty())
        raise(ErrorCategory::validation,
              "train: empty validation set, the schedule is undefined without one");
    const auto val_seqs = prepare(val_set, mc, "validation");

    ModelParams params = init_model(mc, tc.seed);
    AdamState adam = AdamState::zeros_like(params);
    ParamMirror grads = ParamMirror::zeros_like(params);
    Rng dropout_rng = Rng::derive(tc.seed, 0xD0);

    std::vector<int> lengths;
    lengths.reserve(train_seqs.size());
    for (const auto& s : train_seqs) lengths.push_back(s.len);

    TrainHistory history;
    ModelParams best_params;
    PlateauSchedule schedule(tc);

    for (int epoch = 1; epoch <= tc.max_epochs; ++epoch) {
        const double epoch_lr = schedule.lr();
        const auto batches =
            make_batches(lengths, tc.batch_size, tc.seed, epoch, mc.pad_multiple());

        double loss_weighted = 0.0;
        long long masked_total = 0;
        for (const Batch& batch : batches) {
            grads.zero();
            std::vector<ForwardResult> results;
            results.reserve(batch.indices.size());
            std::vector<double> y, p;
            std::vector<std::uint8_t> m;
            std::vector<std::size_t> offsets;
            for (int idx : batch.indices) {
                const PreparedSeq& s = train_seqs[static_cast<std::size_t>(idx)];
                offsets.push_back(y.size());
                Tensor2 emb = padded_input(s, batch.padded_len, mc.input_dim);
                Tensor2 oh;
                if (mc.use_onehot_input) oh = padded_onehot(s, batch.padded_len);
                const ResidueMask mask = prefix_mask(s.len, batch.padded_len);
                results.push_back(forward_trace(mc, params, emb,
                                                mc.use_onehot_input ? &oh : nullptr, mask,
                                                RunMode::train, dropout_rng));
                const Tensor2& probs = results.back().probs;
                for (int i = 0; i < batch.padded_len; ++i) {
                    const bool real = i < s.len;
                    y.push_back(real ? s.y[static_cast<std::size_t>(i)] : 0.0);
                    p.push_back(probs.at(i, 1));
                    m.push_back(real && s.lab[static_cast<std::size_t>(i)] ? 1 : 0);
                }
            }
            std::vector<double> dyhat(y.size(), 0.0);
            const LossValue lv = composite_loss_batch(y, p, m, offsets, dyhat, obj);
            long long masked = 0;
            for (auto b : m) masked += b;
            loss_weighted += lv.composite * static_cast<double>(masked);
            masked_total += masked;

            for (std::size_t si = 0; si < batch.indices.size(); ++si) {
                Tensor2 dprobs(batch.padded_len, mc.num_classes);
                const std::size_t base = offsets[si];
                for (int i = 0; i < batch.padded_len; ++i)
                    dprobs.at(i, 1) = dyhat[base + static_cast<std::size_t>(i)];
                backward(mc, params, *results[si].trace, dprobs, grads);
            }
            adam_step(params, grads, adam, epoch_lr, tc);
        }

        const double train_loss = loss_weighted / static_cast<double>(masked_total);
        const double val_loss = evaluate_loss(mc, params, val_seqs, obj).composite;

        EpochStats row;
        row.epoch = epoch;
        row.train_loss = train_loss;
        row.val_loss = val_loss;
        row.lr = epoch_lr;
        history.epochs.push_back(row);

        const auto outcome = schedule.observe(val_loss);
        if (outcome.improved) best_params = params;
        if (outcome.stop) break;
    }

    history.best_epoch = schedule.best_epoch();
    history.best_val_loss = schedule.best_val_loss();
    if (history.best_epoch == 0)
        raise(ErrorCategory::validation, "train: validation loss never became finite");
    history.epochs[static_cast<std::size_t>(history.best_epoch - 1)].is_best = true;

    TrainResult result;
    result.best_params = std::move(best_params);
    result.history = std::move(history);
    return result;
}

void write_history_csv(const TrainHistory& h, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCategory::io, "cannot write " + path.string());
    out << "epoch,train_loss,val_loss,lr,is_best\n";
    char buf[128];
    for (const auto& e : h.epochs) {
        std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.10g,%d\n", e.epoch, e.train_loss,
                      e.val_loss, e.lr, e.is_best ? 1 : 0);
        out << buf;
    }
}

}  // namespace dunet
