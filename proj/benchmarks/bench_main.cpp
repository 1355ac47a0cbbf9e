#include <benchmark/benchmark.h>

#include "dunet/metrics.hpp"
#include "dunet/model.hpp"
#include "dunet/objective.hpp"
#include "dunet/trainer.hpp"

using namespace dunet;

namespace {

Tensor2 random_tensor(Rng& rng, int L, int C) {
    Tensor2 t(L, C);
    for (double& v : t.data) v = rng.next_normal();
    return t;
}

void BM_Conv1dForward(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    Rng rng(1);
    const Tensor2 x = random_tensor(rng, L, 64);
    std::vector<double> w(7 * 64 * 64), b(64);
    for (double& v : w) v = rng.next_normal();
    ConvView cv{7, 64, 64, w.data(), b.data()};
    for (auto _ : state) {
        Tensor2 y = conv1d(x, cv);
        benchmark::DoNotOptimize(y.data.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(L));
}
BENCHMARK(BM_Conv1dForward)->Arg(128)->Arg(512)->Arg(2048);

void BM_Conv1dBackward(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    Rng rng(2);
    const Tensor2 x = random_tensor(rng, L, 64);
    std::vector<double> w(7 * 64 * 64), b(64);
    for (double& v : w) v = rng.next_normal();
    ConvView cv{7, 64, 64, w.data(), b.data()};
    const Tensor2 dy = random_tensor(rng, L, 64);
    Tensor2 dx(L, 64);
    std::vector<double> dw(w.size()), db(b.size());
    for (auto _ : state) {
        std::fill(dw.begin(), dw.end(), 0.0);
        std::fill(db.begin(), db.end(), 0.0);
        conv1d_backward(x, cv, dy, &dx, dw.data(), db.data());
        benchmark::DoNotOptimize(dw.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(L));
}
BENCHMARK(BM_Conv1dBackward)->Arg(128)->Arg(512);

void BM_ReferenceForward(benchmark::State& state) {
    const int L = static_cast<int>(state.range(0));
    const ModelConfig cfg = reference_config();
    const ModelParams params = init_model(cfg, 3);
    Rng rng(4);
    const Tensor2 emb = random_tensor(rng, L, cfg.input_dim);
    const ResidueMask mask = prefix_mask(L, L);
    for (auto _ : state) {
        Rng r(0);
        Tensor2 probs = forward(cfg, params, emb, nullptr, mask, RunMode::infer, r);
        benchmark::DoNotOptimize(probs.data.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(L));
}
BENCHMARK(BM_ReferenceForward)->Arg(256)->Arg(1024);

void BM_RocAuc(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(5);
    ScoredResidues s;
    s.id = "bench";
    for (int i = 0; i < n; ++i) {
        s.scores.push_back(rng.next_double());
        s.labels.push_back(rng.next_int(2) ? Label::disordered : Label::ordered);
    }
    s.labels[0] = Label::ordered;
    s.labels[1] = Label::disordered;
    for (auto _ : state) {
        const double auc = roc_auc(s);
        benchmark::DoNotOptimize(auc);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_RocAuc)->Arg(1000)->Arg(100000);

void BM_CompositeLossGrad(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Rng rng(6);
    std::vector<double> y(n), p(n), g(n);
    std::vector<std::uint8_t> m(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = rng.next_int(2);
        p[i] = rng.next_uniform(0.05, 0.95);
    }
    y[0] = 1;
    y[1] = 0;
    for (auto _ : state) {
        const LossValue v = composite_loss_grad(y, p, m, g);
        benchmark::DoNotOptimize(v.composite);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_CompositeLossGrad)->Arg(4096);

void BM_AdamStep(benchmark::State& state) {
    ModelConfig cfg = reference_config();
    ModelParams params = init_model(cfg, 7);
    AdamState st = AdamState::zeros_like(params);
    ParamMirror grads = ParamMirror::zeros_like(params);
    Rng rng(8);
    for (auto& t : grads.values)
        for (double& v : t) v = rng.next_normal() * 1e-3;
    for (auto _ : state) {
        adam_step(params, grads, st, 1e-3);
        benchmark::DoNotOptimize(params.tensors[0].values.data());
    }
}
BENCHMARK(BM_AdamStep);

}  // namespace

BENCHMARK_MAIN();
