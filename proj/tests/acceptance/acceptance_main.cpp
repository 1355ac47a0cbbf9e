// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criteria 5 and 9 drive the real CLI binary through the
// DUNET_CLI environment variable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "dunet/datasets.hpp"
#include "dunet/metrics.hpp"
#include "dunet/model.hpp"
#include "dunet/objective.hpp"
#include "dunet/trainer.hpp"

using namespace dunet;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;
std::vector<std::string> g_notes;

void expect(bool ok, const std::string& what) {
    if (!ok) {
        ++g_failures;
        g_notes.push_back(what);
    }
}

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
}

Tensor2 random_tensor(Rng& rng, int L, int C, double lo = -1.5, double hi = 1.5) {
    Tensor2 t(L, C);
    for (double& v : t.data) v = rng.next_uniform(lo, hi);
    return t;
}

constexpr double kH = 1e-5;
constexpr double kTol = 1e-4;

// --- criterion 1: gradient suite ------------------------------------------

// Central differences at h=1e-5. An entry whose stencil straddles a relu
// kink or a maxpool tie gives an invalid difference quotient there; such
// entries are re-probed at h/4 and must then meet the same tolerance.
template <typename LossFn, typename Vec>
bool fd_entry(LossFn& loss, Vec& values, std::size_t i, double analytic) {
    for (const double h : {kH, kH / 4.0}) {
        const double keep = values[i];
        values[i] = keep + h;
        const double fp = loss();
        values[i] = keep - h;
        const double fm = loss();
        values[i] = keep;
        if (rel_err(analytic, (fp - fm) / (2 * h)) < kTol) return true;
    }
    return false;
}

template <typename LossFn, typename Vec>
bool fd_check(LossFn loss, Vec& values, const std::vector<double>& analytic,
              int probes, Rng& rng, bool all = false) {
    bool ok = true;
    const int n = static_cast<int>(values.size());
    const int count = all ? n : std::min(probes, n);
    for (int pr = 0; pr < count; ++pr) {
        const std::size_t i =
            all ? static_cast<std::size_t>(pr)
                : static_cast<std::size_t>(rng.next_int(n));
        ok &= fd_entry(loss, values, i, analytic[i]);
    }
    return ok;
}

bool criterion1() {
    Rng rng = Rng::derive(1001, 0);
    bool ok = true;

    for (int iter = 0; iter < 20; ++iter) {
        const int L = 3 + rng.next_int(14);
        const int C = 1 + rng.next_int(8);

        // conv1d: dx, dw, db
        {
            const int K = std::vector<int>{1, 3, 7}[static_cast<std::size_t>(rng.next_int(3))];
            const int cout = 1 + rng.next_int(8);
            Tensor2 x = random_tensor(rng, L, C);
            std::vector<double> w(static_cast<std::size_t>(K) * C * cout), b(static_cast<std::size_t>(cout));
            for (double& v : w) v = rng.next_uniform(-1, 1);
            for (double& v : b) v = rng.next_uniform(-1, 1);
            ConvView cv{K, C, cout, w.data(), b.data()};
            Tensor2 dy(L, cout, 1.0);
            Tensor2 dx(L, C);
            std::vector<double> dw(w.size(), 0.0), db(b.size(), 0.0);
            conv1d_backward(x, cv, dy, &dx, dw.data(), db.data());
            auto loss = [&]() {
                const Tensor2 y = conv1d(x, cv);
                double s = 0;
                for (double v : y.data) s += v;
                return s;
            };
            ok &= fd_check(loss, x.data, dx.data, 6, rng);
            ok &= fd_check(loss, w, dw, 6, rng);
            ok &= fd_check(loss, b, db, 3, rng);
        }
        // relu (probed away from 0), sigmoid
        {
            Tensor2 x = random_tensor(rng, L, C);
            for (double& v : x.data)
                if (std::abs(v) < 1e-3) v += v < 0 ? -1e-3 : 1e-3;
            Tensor2 dy(L, C, 1.0);
            const Tensor2 dxr = relu_backward(x, dy);
            auto lr = [&]() {
                const Tensor2 y = relu(x);
                double s = 0;
                for (double v : y.data) s += v;
                return s;
            };
            ok &= fd_check(lr, x.data, dxr.data, 6, rng);

            const Tensor2 ys = sigmoid(x);
            const Tensor2 dxs = sigmoid_backward(ys, dy);
            auto ls = [&]() {
                const Tensor2 y = sigmoid(x);
                double s = 0;
                for (double v : y.data) s += v;
                return s;
            };
            ok &= fd_check(ls, x.data, dxs.data, 6, rng);
        }
        // softmax with a weighted-sum loss
        {
            Tensor2 x = random_tensor(rng, L, 2 + rng.next_int(6));
            Tensor2 wts(x.length, x.channels);
            for (double& v : wts.data) v = rng.next_uniform(-1, 1);
            const Tensor2 y = softmax_channels(x);
            const Tensor2 dx = softmax_channels_backward(y, wts);
            auto loss = [&]() {
                const Tensor2 p = softmax_channels(x);
                double s = 0;
                for (std::size_t i = 0; i < p.data.size(); ++i) s += p.data[i] * wts.data[i];
                return s;
            };
            ok &= fd_check(loss, x.data, dx.data, 8, rng);
        }
        // maxpool (pairs separated), upsample
        {
            const int Le = 2 * (2 + rng.next_int(7));
            Tensor2 x = random_tensor(rng, Le, C);
            for (int i = 0; i < Le / 2; ++i)
                for (int c = 0; c < C; ++c)
                    if (std::abs(x.at(2 * i, c) - x.at(2 * i + 1, c)) < 1e-3)
                        x.at(2 * i, c) += 2e-3;
            Tensor2 dy(Le / 2, C, 1.0);
            const Tensor2 dx = maxpool1d_backward(x, dy);
            auto loss = [&]() {
                const Tensor2 y = maxpool1d(x);
                double s = 0;
                for (double v : y.data) s += v;
                return s;
            };
            ok &= fd_check(loss, x.data, dx.data, 8, rng);

            Tensor2 xu = random_tensor(rng, L, C);
            Tensor2 dyu(2 * L, C);
            for (double& v : dyu.data) v = rng.next_uniform(-1, 1);
            const Tensor2 dxu = upsample_linear1d_backward(dyu, L);
            auto lossu = [&]() {
                const Tensor2 y = upsample_linear1d(xu);
                double s = 0;
                for (std::size_t i = 0; i < y.data.size(); ++i) s += y.data[i] * dyu.data[i];
                return s;
            };
            ok &= fd_check(lossu, xu.data, dxu.data, 8, rng);
        }
        // attention gate: inputs and every gate parameter. The analytic
        // gradients are recomposed here from the tensor primitives,
        // independently of the model module's backward.
        {
            const int Lg = 2 * (2 + rng.next_int(5));
            const int Cx = 1 + rng.next_int(5);
            const int Cg = 1 + rng.next_int(5);
            const int F = 1 + rng.next_int(5);
            Tensor2 x = random_tensor(rng, Lg, Cx);
            Tensor2 g = random_tensor(rng, Lg / 2, Cg);
            std::vector<double> wx(static_cast<std::size_t>(Cx) * F),
                wg(static_cast<std::size_t>(Cg) * F), bg(static_cast<std::size_t>(F)),
                psi(static_cast<std::size_t>(F)), bpsi(1);
            for (auto* v : {&wx, &wg, &bg, &psi, &bpsi})
                for (double& e : *v) e = rng.next_uniform(-1, 1);
            auto gate_view = [&]() {
                GateView gv;
                gv.wx = {1, Cx, F, wx.data(), nullptr};
                gv.wg = {1, Cg, F, wg.data(), bg.data()};
                gv.psi = {1, F, 1, psi.data(), bpsi.data()};
                return gv;
            };
            auto loss = [&]() {
                const Tensor2 y = attention_gate(x, g, gate_view(), nullptr);
                double s = 0;
                for (double v : y.data) s += v;
                return s;
            };

            const GateView gv = gate_view();
            Tensor2 qpre = conv1d(x, gv.wx);
            {
                const Tensor2 gwu = upsample_linear1d(conv1d(g, gv.wg));
                for (std::size_t i = 0; i < qpre.data.size(); ++i)
                    qpre.data[i] += gwu.data[i];
            }
            const Tensor2 q = relu(qpre);
            const Tensor2 alpha = sigmoid(conv1d(q, gv.psi));
            for (int i = 0; i < Lg; ++i) ok &= alpha.at(i, 0) > 0.0 && alpha.at(i, 0) < 1.0;

            Tensor2 dx(Lg, Cx), dg(Lg / 2, Cg), dalpha(Lg, 1);
            for (int i = 0; i < Lg; ++i) {
                double acc = 0.0;
                for (int c = 0; c < Cx; ++c) {
                    acc += x.at(i, c);  // dgated = 1 everywhere
                    dx.at(i, c) += alpha.at(i, 0);
                }
                dalpha.at(i, 0) = acc;
            }
            const Tensor2 dspre = sigmoid_backward(alpha, dalpha);
            Tensor2 dq(Lg, F);
            std::vector<double> dpsi(psi.size(), 0.0), dbpsi(1, 0.0);
            conv1d_backward(q, gv.psi, dspre, &dq, dpsi.data(), dbpsi.data());
            const Tensor2 dqpre = relu_backward(q, dq);
            std::vector<double> dwx(wx.size(), 0.0);
            conv1d_backward(x, gv.wx, dqpre, &dx, dwx.data(), nullptr);
            const Tensor2 dgw = upsample_linear1d_backward(dqpre, Lg / 2);
            std::vector<double> dwg(wg.size(), 0.0), dbg(bg.size(), 0.0);
            conv1d_backward(g, gv.wg, dgw, &dg, dwg.data(), dbg.data());

            ok &= fd_check(loss, x.data, dx.data, 6, rng);
            ok &= fd_check(loss, g.data, dg.data, 6, rng);
            ok &= fd_check(loss, wx, dwx, 4, rng);
            ok &= fd_check(loss, wg, dwg, 4, rng);
            ok &= fd_check(loss, bg, dbg, 2, rng);
            ok &= fd_check(loss, psi, dpsi, 2, rng);
            ok &= fd_check(loss, bpsi, dbpsi, 1, rng);
        }
    }

    // full toy model: d(composite)/d(every parameter), 20 instances
    ModelConfig cfg;
    cfg.input_dim = 16;
    cfg.levels = 3;
    cfg.filters_per_level = {4, 6, 8};
    cfg.kernel_len = 7;
    cfg.up_kernel_len = 2;
    cfg.dropout_rate = 0.0;
    cfg.max_len = 64;

    Rng data_rng = Rng::derive(1002, 0);
    for (int instance = 0; instance < 20; ++instance) {
        const int L = 8 + 4 * (instance % 3);
        ModelParams params = init_model(cfg, 2000 + static_cast<std::uint64_t>(instance));
        const Tensor2 emb = random_tensor(data_rng, L, cfg.input_dim);
        const ResidueMask mask = prefix_mask(L, L);
        std::vector<double> y(static_cast<std::size_t>(L));
        std::vector<std::uint8_t> lmask(static_cast<std::size_t>(L), 1);
        for (auto& v : y) v = data_rng.next_int(2);
        y[0] = 1;
        y[1] = 0;

        auto loss_of = [&]() {
            Rng r(0);
            const Tensor2 probs = forward(cfg, params, emb, nullptr, mask, RunMode::train, r);
            std::vector<double> yhat(static_cast<std::size_t>(L));
            for (int i = 0; i < L; ++i) yhat[static_cast<std::size_t>(i)] = probs.at(i, 1);
            return composite_loss(y, yhat, lmask).composite;
        };

        Rng r(0);
        ForwardResult fr = forward_trace(cfg, params, emb, nullptr, mask, RunMode::train, r);
        std::vector<double> yhat(static_cast<std::size_t>(L));
        for (int i = 0; i < L; ++i) yhat[static_cast<std::size_t>(i)] = fr.probs.at(i, 1);
        std::vector<double> dyhat(static_cast<std::size_t>(L), 0.0);
        composite_loss_grad(y, yhat, lmask, dyhat);
        Tensor2 dprobs(L, 2);
        for (int i = 0; i < L; ++i) dprobs.at(i, 1) = dyhat[static_cast<std::size_t>(i)];
        ParamMirror grads = ParamMirror::zeros_like(params);
        backward(cfg, params, *fr.trace, dprobs, grads);

        for (std::size_t ti = 0; ti < params.tensors.size(); ++ti) {
            auto& vals = params.tensors[ti].values;
            for (std::size_t i = 0; i < vals.size(); ++i)
                ok &= fd_entry(loss_of, vals, i, grads.values[ti][i]);
        }
    }
    return ok;
}

// --- criterion 2: loss identities -----------------------------------------

bool criterion2() {
    bool ok = true;
    Rng rng = Rng::derive(1003, 0);
    for (int iter = 0; iter < 500; ++iter) {
        const std::size_t n = 4 + static_cast<std::size_t>(rng.next_int(80));
        std::vector<double> y(n), p(n);
        ScoredResidues scored;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.next_int(2);
            p[i] = rng.next_int(2);
        }
        y[0] = 1;
        y[1] = 0;
        for (std::size_t i = 0; i < n; ++i) {
            scored.scores.push_back(p[i]);
            scored.labels.push_back(y[i] > 0.5 ? Label::disordered : Label::ordered);
        }
        const std::vector<std::uint8_t> mask(n, 1);
        const BinaryMetric bm = mcc_binary(confusion(scored));
        if (!bm.degenerate)
            ok &= std::abs(soft_mcc(y, p, mask) - bm.value) < 1e-6;

        std::vector<double> pc(n), qc(n);
        for (std::size_t i = 0; i < n; ++i) {
            pc[i] = rng.next_uniform(0.0, 1.0);
            qc[i] = 1.0 - pc[i];
        }
        ok &= std::abs(soft_mcc(y, qc, mask) + soft_mcc(y, pc, mask)) < 1e-9;
    }

    // worked example, evaluated exactly per the soft-count formula with e
    std::vector<double> y = {1, 0, 1, 0}, p = {0.9, 0.1, 0.6, 0.4};
    const std::vector<std::uint8_t> mask(4, 1);
    const double e = ObjectiveOptions{}.mcc_epsilon;
    const double hand = 2.0 / std::sqrt(16.0 + e);
    const double got = soft_mcc(y, p, mask);
    ok &= std::abs(got - hand) < 1e-15;
    ok &= std::abs(got - 0.5) < 1e-7;
    const LossValue comp = composite_loss(y, p, mask);
    ok &= comp.composite == comp.bce - comp.soft_mcc;
    return ok;
}

// --- criterion 3: metric oracle -------------------------------------------

double auc_oracle(const std::vector<double>& scores, const std::vector<Label>& labels) {
    double wins = 0.0;
    long long pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != Label::disordered) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != Label::ordered) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

bool criterion3() {
    bool ok = true;
    Rng rng = Rng::derive(1004, 0);
    for (int iter = 0; iter < 1000; ++iter) {
        const int n = 2 + rng.next_int(199);
        std::vector<double> scores;
        std::vector<Label> labels;
        const bool coarse = rng.next_int(2) == 0;
        for (int i = 0; i < n; ++i) {
            double s = rng.next_uniform(0.0, 1.0);
            if (coarse) s = std::floor(s * 8.0) / 8.0;
            scores.push_back(s);
            labels.push_back(rng.next_int(2) ? Label::disordered : Label::ordered);
        }
        labels[0] = Label::ordered;
        if (n > 1) labels[1] = Label::disordered;
        const auto got = try_roc_auc(scores, labels);
        ok &= got.has_value() && std::abs(*got - auc_oracle(scores, labels)) < 1e-12;
    }

    ScoredResidues worked;
    worked.id = "w";
    worked.scores = {0.1, 0.4, 0.35, 0.8};
    worked.labels = {Label::ordered, Label::ordered, Label::disordered, Label::disordered};
    ok &= roc_auc(worked) == 0.75;

    for (int iter = 0; iter < 100; ++iter) {
        const int n = 4 + rng.next_int(80);
        std::vector<double> scores;
        std::vector<Label> labels;
        for (int i = 0; i < n; ++i) {
            scores.push_back(static_cast<double>(rng.next_int(33)) / 32.0);
            labels.push_back(rng.next_int(2) ? Label::disordered : Label::ordered);
        }
        labels[0] = Label::ordered;
        labels[1] = Label::disordered;
        std::vector<double> cubed(scores), squashed(scores);
        for (double& v : cubed) v = v * v * v;
        for (double& v : squashed) v = 1.0 / (1.0 + std::exp(-(5.0 * v - 2.0)));
        const auto base = try_roc_auc(scores, labels);
        ok &= *try_roc_auc(cubed, labels) == *base;
        ok &= *try_roc_auc(squashed, labels) == *base;
    }
    return ok;
}

// --- criterion 4: overfit + separable end-to-end ---------------------------

bool criterion4() {
    bool ok = true;
    {
        SynthOptions so;
        so.n_sequences = 4;
        so.length = 32;
        so.dim = 16;
        so.seed = 21;
        const Dataset ds = make_synthetic_dataset(so);
        ModelConfig mc;
        mc.input_dim = 16;
        mc.levels = 3;
        mc.filters_per_level = {8, 16, 16};
        mc.dropout_rate = 0.0;
        mc.max_len = 512;
        TrainConfig tc;
        tc.batch_size = 8;
        tc.max_epochs = 200;
        tc.early_stop_patience = 200;
        tc.seed = 5;
        const TrainResult r = train(mc, tc, ds, ds);
        double best = 1e9;
        for (const auto& e : r.history.epochs) best = std::min(best, e.train_loss);
        expect(best < 0.05, "criterion 4: overfit train loss " + std::to_string(best));
        ok &= best < 0.05;
    }
    {
        SynthOptions train_opt;
        train_opt.n_sequences = 200;
        train_opt.length = 64;
        train_opt.dim = 16;
        train_opt.seed = 31;
        train_opt.id_prefix = "TR";
        SynthOptions test_opt = train_opt;
        test_opt.n_sequences = 50;
        test_opt.seed = 32;
        test_opt.id_prefix = "TE";
        const Dataset train_all = make_synthetic_dataset(train_opt);
        const Dataset test_set = make_synthetic_dataset(test_opt);

        Dataset tr, val;
        for (std::size_t i = 0; i < train_all.size(); ++i)
            (i < 180 ? tr : val).items.push_back(train_all.items[i]);

        std::vector<EmbeddingMatrix> tr_embs;
        for (const auto& it : tr.items) tr_embs.push_back(it.embedding);
        const Standardizer std_ = fit_standardizer(tr_embs);
        auto standardize = [&](const Dataset& ds) {
            Dataset out;
            for (const auto& it : ds.items) {
                DataItem copy;
                copy.record = it.record;
                copy.embedding = apply_standardizer(std_, it.embedding);
                out.items.push_back(std::move(copy));
            }
            return out;
        };

        ModelConfig mc;
        mc.input_dim = 16;
        mc.levels = 3;
        mc.filters_per_level = {8, 16, 16};
        mc.dropout_rate = 0.1;
        mc.max_len = 512;
        TrainConfig tc;
        tc.seed = 6;
        tc.max_epochs = 40;
        const TrainResult r = train(mc, tc, standardize(tr), standardize(val));

        ScoredResidues pooled;
        pooled.id = "synthetic-test";
        Rng rr(0);
        for (const auto& it : standardize(test_set).items) {
            Tensor2 emb(it.embedding.rows, it.embedding.cols);
            std::copy(it.embedding.values.begin(), it.embedding.values.end(),
                      emb.data.begin());
            const ResidueMask mask = prefix_mask(emb.length, emb.length);
            const Tensor2 probs =
                forward(mc, r.best_params, emb, nullptr, mask, RunMode::infer, rr);
            for (int i = 0; i < emb.length; ++i) {
                pooled.scores.push_back(probs.at(i, 1));
                pooled.labels.push_back((*it.record.labels)[static_cast<std::size_t>(i)]);
            }
        }
        const double auc = roc_auc(pooled);
        expect(auc > 0.95, "criterion 4: held-out AUC " + std::to_string(auc));
        ok &= auc > 0.95;
    }
    return ok;
}

// --- criterion 5: pipeline determinism -------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

bool criterion5() {
    const char* cli = std::getenv("DUNET_CLI");
    if (!cli || !*cli) {
        g_notes.push_back("criterion 5: DUNET_CLI is not set");
        return false;
    }
    const fs::path root = fs::temp_directory_path() /
                          ("dunet_accept_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    auto run = [&](const std::string& args) {
        const std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str()));
    };

    const std::string data = (root / "data").string();
    if (run("synth --out " + data + " --n 16 --length 24 --dim 16 --seed 13") != 0) return false;

    bool ok = true;
    std::vector<fs::path> outs;
    for (int pass = 0; pass < 2; ++pass) {
        const fs::path out = root / ("pass" + std::to_string(pass));
        fs::create_directories(out);
        ok &= run("folds --reference " + data + "/reference.ref --k 4 --seed 7 --out " +
                  (out / "folds.csv").string()) == 0;
        ok &= run("train --reference " + data + "/reference.ref --embeddings " + data +
                  "/embeddings --input-dim 16 --levels 3 --filters 8,16,16 --max-len 512"
                  " --max-epochs 3 --seed 17 --folds " + (out / "folds.csv").string() +
                  " --fold 0 --out " + (out / "run").string()) == 0;
        ok &= run("predict --checkpoint " + (out / "run" / "checkpoint.dunl").string() +
                  " --fasta " + data + "/sequences.fasta --embeddings " + data +
                  "/embeddings --out " + (out / "preds").string()) == 0;
        ok &= run("evaluate --predictions " + (out / "preds").string() + " --reference " +
                  data + "/reference.ref --mode nox --out " + (out / "eval").string()) == 0;
        outs.push_back(out);
    }
    if (!ok) {
        g_notes.push_back("criterion 5: a pipeline stage failed");
        return false;
    }

    auto same = [&](const fs::path& rel) {
        const bool eq = slurp(outs[0] / rel) == slurp(outs[1] / rel);
        if (!eq) g_notes.push_back("criterion 5: " + rel.string() + " differs across runs");
        return eq;
    };
    ok &= same("folds.csv");
    ok &= same(fs::path("run") / "checkpoint.dunl");
    ok &= same(fs::path("run") / "history.csv");
    for (int i = 0; i < 16; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "SYN%05d.pred", i);
        ok &= same(fs::path("preds") / id);
    }
    ok &= same(fs::path("eval") / "per_target.csv");
    ok &= same(fs::path("eval") / "aggregate.csv");
    ok &= same(fs::path("eval") / "skipped.csv");
    fs::remove_all(root);
    return ok;
}

// --- criterion 6: parameter-count reconciliation ---------------------------

bool criterion6() {
    const auto a = search_architectures(628710);
    const auto b = search_architectures(628710);
    bool ok = a.size() == b.size() && !a.empty();
    for (std::size_t i = 0; ok && i < a.size(); ++i) ok &= a[i].params == b[i].params;

    const ModelConfig ref = reference_config();
    ok &= a.front().config.levels == ref.levels &&
          a.front().config.filters_per_level == ref.filters_per_level &&
          a.front().config.up_kernel_len == ref.up_kernel_len &&
          a.front().config.gate_half_width == ref.gate_half_width &&
          a.front().config.dedicated_bottleneck == ref.dedicated_bottleneck;
    ok &= param_count(ref) == a.front().params;

    std::printf("    search best: %lld parameters (target 628710, distance %lld); "
                "nearest-match discrepancy is documented in README.md\n",
                a.front().params, a.front().distance);
    if (a.front().distance != 0) {
        // nearest configuration adopted; the written discrepancy note must
        // name both counts
        fs::path readme = "README.md";
        if (const char* root = std::getenv("DUNET_REPO_ROOT"))
            readme = fs::path(root) / "README.md";
        std::ifstream in(readme);
        if (!in.good()) {
            g_notes.push_back("criterion 6: README.md not found at " + readme.string());
            return false;
        }
        const std::string text((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
        const bool has_target = text.find("628,710") != std::string::npos ||
                                text.find("628710") != std::string::npos;
        const bool has_actual = text.find("629,029") != std::string::npos ||
                                text.find("629029") != std::string::npos;
        if (!has_target || !has_actual)
            g_notes.push_back("criterion 6: README lacks the parameter-count note");
        ok &= has_target && has_actual;
    }
    return ok;
}

// --- criterion 7: format conformance ---------------------------------------

bool criterion7() {
    bool ok = true;
    const fs::path root = fs::temp_directory_path() /
                          ("dunet_fmt_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);

    auto expect_error = [&](auto fn, const std::string& needle, const std::string& what) {
        try {
            fn();
            g_notes.push_back("criterion 7: " + what + " did not fail");
            return false;
        } catch (const Error& e) {
            const bool hit = std::string(e.what()).find(needle) != std::string::npos;
            if (!hit)
                g_notes.push_back("criterion 7: " + what + " wrong message: " + e.what());
            return hit;
        }
    };

    // FASTA round-trip-ish: parse produces the records the writer emitted
    {
        std::ofstream out(root / "a.fasta");
        out << ">A\nMKVLA\n>B\nWWW\n";
        out.close();
        const auto recs = parse_fasta(root / "a.fasta");
        ok &= recs.size() == 2 && recs[0].sequence == "MKVLA";
    }
    // reference round trip: parse(write(x)) == x
    {
        std::vector<SequenceRecord> recs;
        SequenceRecord r;
        r.id = "R";
        r.sequence = "MKVL";
        r.labels = LabelTrack{Label::ordered, Label::disordered, Label::unknown,
                              Label::disordered};
        recs.push_back(r);
        write_reference(recs, root / "r.ref");
        const auto back = parse_reference(root / "r.ref");
        ok &= back.size() == 1 && back[0].sequence == r.sequence && *back[0].labels == *r.labels;
        write_reference(back, root / "r2.ref");
        ok &= slurp(root / "r.ref") == slurp(root / "r2.ref");
    }
    // embedding round trip + designated fault classes
    {
        EmbeddingMatrix e;
        e.id = "E";
        e.rows = 5;
        e.cols = 3;
        Rng rng(77);
        for (int i = 0; i < 15; ++i)
            e.values.push_back(static_cast<double>(static_cast<float>(rng.next_normal())));
        write_embedding(e, root / "e.plm");
        const EmbeddingMatrix readback = read_embedding(root / "e.plm");
        ok &= readback.values == e.values;
        write_embedding(readback, root / "e2.plm");
        ok &= slurp(root / "e.plm") == slurp(root / "e2.plm");

        std::string good = slurp(root / "e.plm");
        {
            std::string bad = good;
            bad[0] = 'Q';
            std::ofstream(root / "bad_magic.plm", std::ios::binary) << bad;
            ok &= expect_error([&] { read_embedding(root / "bad_magic.plm"); }, "bad magic",
                               "embedding bad magic");
        }
        {
            std::ofstream(root / "trunc.plm", std::ios::binary) << good.substr(0, 7);
            ok &= expect_error([&] { read_embedding(root / "trunc.plm"); }, "truncated",
                               "embedding truncation");
        }
        {
            std::ofstream(root / "size.plm", std::ios::binary)
                << good.substr(0, good.size() - 4);
            ok &= expect_error([&] { read_embedding(root / "size.plm"); },
                               "payload size mismatch", "embedding size mismatch");
        }
    }
    // checkpoint faults
    {
        ModelConfig cfg;
        cfg.input_dim = 8;
        cfg.levels = 3;
        cfg.filters_per_level = {4, 4, 4};
        cfg.max_len = 512;
        Checkpoint ck;
        ck.config = cfg;
        ck.params = init_model(cfg, 1);
        save_params(ck, root / "m.dunl");
        const Checkpoint back = load_params(root / "m.dunl");
        ok &= back.params.tensors.size() == ck.params.tensors.size();
        for (std::size_t i = 0; i < back.params.tensors.size(); ++i)
            ok &= back.params.tensors[i].values == ck.params.tensors[i].values;

        std::string good = slurp(root / "m.dunl");
        {
            std::string bad = good;
            bad[1] = 'X';
            std::ofstream(root / "mm.dunl", std::ios::binary) << bad;
            ok &= expect_error([&] { load_params(root / "mm.dunl"); }, "bad magic",
                               "checkpoint bad magic");
        }
        {
            std::ofstream(root / "mt.dunl", std::ios::binary)
                << good.substr(0, good.size() / 3);
            ok &= expect_error([&] { load_params(root / "mt.dunl"); }, "truncated",
                               "checkpoint truncation");
        }
    }
    // reference length mismatch is its own error class
    {
        std::ofstream out(root / "bad.ref");
        out << ">Z\nMKVL\n01\n";
        out.close();
        ok &= expect_error([&] { parse_reference(root / "bad.ref"); }, "Z",
                           "reference length mismatch");
    }
    // CheZOD binarization boundary
    ok &= binarize_chezod(8.0) == 1;
    ok &= binarize_chezod(8.0000001) == 0;
    {
        std::ofstream out(root / "c.tsv");
        out << "id\tposition\tresidue\tzscore\nQ\t1\tM\t8.0\nQ\t2\tK\t9.0\n";
        out.close();
        const auto recs = parse_chezod(root / "c.tsv");
        ok &= recs.size() == 1 && (*recs[0].labels)[0] == Label::disordered &&
              (*recs[0].labels)[1] == Label::ordered;
    }
    fs::remove_all(root);
    return ok;
}

// --- criterion 8: stratification --------------------------------------------

bool criterion8() {
    SynthOptions so;
    so.n_sequences = 500;
    so.length = 48;
    so.dim = 8;
    so.seed = 99;
    const Dataset ds = make_synthetic_dataset(so);
    const auto folds = stratified_folds(ds, 10, 41);

    std::vector<int> counts(10, 0);
    for (int f : folds) counts[static_cast<std::size_t>(f)]++;
    int min_c = counts[0], max_c = counts[0];
    for (int c : counts) {
        min_c = std::min(min_c, c);
        max_c = std::max(max_c, c);
    }
    bool ok = (max_c - min_c) <= 1;

    auto ratio_of = [](const DataItem& it) {
        long long pos = 0, lab = 0;
        for (Label l : *it.record.labels) {
            if (l == Label::unknown) continue;
            ++lab;
            if (l == Label::disordered) ++pos;
        }
        return static_cast<double>(pos) / static_cast<double>(lab);
    };
    double global = 0.0;
    for (const auto& it : ds.items) global += ratio_of(it);
    global /= static_cast<double>(ds.size());
    for (int f = 0; f < 10; ++f) {
        double mean = 0.0;
        int n = 0;
        for (std::size_t i = 0; i < ds.size(); ++i)
            if (folds[i] == f) {
                mean += ratio_of(ds.items[i]);
                ++n;
            }
        mean /= n;
        if (std::abs(mean - global) >= 0.05) {
            g_notes.push_back("criterion 8: fold " + std::to_string(f) + " ratio " +
                              std::to_string(mean) + " vs global " + std::to_string(global));
            ok = false;
        }
    }
    return ok;
}

// --- criterion 9: documented integration path -------------------------------

bool criterion9() {
    // Not CI-gated: real pLM embeddings cannot ship with the repo. Verify the
    // CLI surface the README walkthrough relies on exists and responds.
    const char* cli = std::getenv("DUNET_CLI");
    if (!cli || !*cli) return false;
    auto ok_cmd = [&](const std::string& sub) {
        const std::string cmd = std::string(cli) + " " + sub + " --help >/dev/null 2>&1";
        return WEXITSTATUS(std::system(cmd.c_str())) == 0;
    };
    const bool ok = ok_cmd("train") && ok_cmd("predict") && ok_cmd("evaluate");
    std::printf("    real-embedding workflow (fIDPnn 445/100/176 vs reported 0.835) is a\n"
                "    documented manual path; see README \"Using real embeddings\"\n");
    return ok;
}

struct Criterion {
    const char* name;
    std::function<bool()> fn;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"criterion-1 gradient-suite", criterion1},
        {"criterion-2 loss-identities", criterion2},
        {"criterion-3 metric-oracle", criterion3},
        {"criterion-4 overfit-end-to-end", criterion4},
        {"criterion-5 pipeline-determinism", criterion5},
        {"criterion-6 parameter-count-search", criterion6},
        {"criterion-7 format-conformance", criterion7},
        {"criterion-8 stratification", criterion8},
        {"criterion-9 integration-path(documented)", criterion9},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = Clock::now();
        bool ok = false;
        try {
            ok = c.fn();
        } catch (const std::exception& e) {
            g_notes.push_back(std::string(c.name) + " threw: " + e.what());
            ok = false;
        }
        const double secs =
            std::chrono::duration<double>(Clock::now() - t0).count();
        std::printf("%s %s (%.1fs)\n", ok ? "PASS" : "FAIL", c.name, secs);
        std::fflush(stdout);
        if (!ok) ++failed;
    }
    for (const auto& n : g_notes) std::printf("note: %s\n", n.c_str());
    if (failed > 0) {
        std::printf("%d criterion(s) failed\n", failed);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
