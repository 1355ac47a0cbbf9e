#include <doctest.h>

#include <cmath>
#include <vector>

#include "dunet/common.hpp"
#include "dunet/metrics.hpp"

using namespace dunet;

namespace {

// Exhaustive pairwise Mann-Whitney oracle, ties counted 1/2.
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

ScoredResidues make_scored(std::vector<double> scores, std::vector<int> labels) {
    ScoredResidues s;
    s.id = "t";
    s.scores = std::move(scores);
    for (int l : labels)
        s.labels.push_back(l == 0 ? Label::ordered
                                  : (l == 1 ? Label::disordered : Label::unknown));
    return s;
}

}  // namespace

TEST_CASE("binarize is strictly greater-than") {
    CHECK(binarize(0.5) == 0);
    CHECK(binarize(0.500001) == 1);
    CHECK(binarize(0.0) == 0);
    CHECK(binarize(1.0) == 1);
}

TEST_CASE("confusion excludes unknown residues") {
    const auto s = make_scored({0.9, 0.1, 0.9}, {1, 0, 2});
    const Confusion c = confusion(s);
    CHECK(c.tp == 1);
    CHECK(c.tn == 1);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);

    const auto all_unknown = make_scored({0.1, 0.9}, {2, 2});
    CHECK_THROWS_WITH_AS(confusion(all_unknown), doctest::Contains("no labeled"), Error);
}

TEST_CASE("confusion matches a scalar loop oracle") {
    Rng rng = Rng::derive(11, 0);
    std::vector<double> scores(50);
    std::vector<int> labels(50);
    for (std::size_t i = 0; i < 50; ++i) {
        scores[i] = rng.next_uniform(0.0, 1.0);
        labels[i] = rng.next_int(3);
    }
    labels[0] = 0;
    labels[1] = 1;
    const auto s = make_scored(scores, labels);
    const Confusion c = confusion(s);
    long long tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < 50; ++i) {
        if (labels[i] == 2) continue;
        const int pred = scores[i] > 0.5 ? 1 : 0;
        if (labels[i] == 1 && pred == 1) ++tp;
        if (labels[i] == 1 && pred == 0) ++fn;
        if (labels[i] == 0 && pred == 1) ++fp;
        if (labels[i] == 0 && pred == 0) ++tn;
    }
    CHECK(c.tp == tp);
    CHECK(c.fp == fp);
    CHECK(c.tn == tn);
    CHECK(c.fn == fn);
}

TEST_CASE("mcc_binary and f1 worked examples") {
    {
        const Confusion c{2, 0, 2, 0};
        CHECK(mcc_binary(c).value == 1.0);
        CHECK(f1(c).value == 1.0);
    }
    {
        const Confusion c{0, 2, 0, 2};
        CHECK(mcc_binary(c).value == -1.0);
        CHECK(f1(c).value == 0.0);
        CHECK_FALSE(f1(c).degenerate);
    }
    {
        const Confusion c{3, 1, 4, 2};
        CHECK(f1(c).value == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(mcc_binary(c).value ==
              doctest::Approx(10.0 / std::sqrt(600.0)).epsilon(1e-12));
    }
    {
        // degenerate: no predicted positives and no actual positives
        const Confusion c{0, 0, 5, 0};
        CHECK(mcc_binary(c).value == 0.0);
        CHECK(mcc_binary(c).degenerate);
        CHECK(f1(c).value == 0.0);
        CHECK(f1(c).degenerate);
    }
}

TEST_CASE("roc_auc worked examples") {
    const auto s = make_scored({0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1});
    CHECK(roc_auc(s) == 0.75);
    CHECK(auc_oracle(s.scores, s.labels) == 0.75);

    const auto perfect = make_scored({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1});
    CHECK(roc_auc(perfect) == 1.0);

    const auto ties = make_scored({0.5, 0.5, 0.5, 0.5}, {0, 0, 1, 1});
    CHECK(roc_auc(ties) == 0.5);

    const auto single = make_scored({0.5, 0.6}, {1, 1});
    CHECK_THROWS_WITH_AS(roc_auc(single), doctest::Contains("undefined AUC"), Error);
    CHECK_FALSE(try_roc_auc(single.scores, single.labels).has_value());
}

TEST_CASE("roc_auc equals the O(n^2) oracle on 1000 random instances") {
    Rng rng = Rng::derive(12, 0);
    for (int iter = 0; iter < 1000; ++iter) {
        const int n = 2 + rng.next_int(199);
        std::vector<double> scores;
        std::vector<Label> labels;
        const bool coarse = rng.next_int(2) == 0;  // force ties half the time
        for (int i = 0; i < n; ++i) {
            double s = rng.next_uniform(0.0, 1.0);
            if (coarse) s = std::floor(s * 8.0) / 8.0;
            scores.push_back(s);
            labels.push_back(rng.next_int(2) == 0 ? Label::ordered : Label::disordered);
        }
        labels[0] = Label::ordered;
        if (n > 1) labels[1] = Label::disordered;
        const auto got = try_roc_auc(scores, labels);
        REQUIRE(got.has_value());
        CHECK(std::abs(*got - auc_oracle(scores, labels)) < 1e-12);
    }
}

TEST_CASE("roc_auc is bitwise invariant under strictly increasing transforms") {
    Rng rng = Rng::derive(13, 0);
    for (int iter = 0; iter < 50; ++iter) {
        const int n = 4 + rng.next_int(100);
        std::vector<double> scores;
        std::vector<Label> labels;
        for (int i = 0; i < n; ++i) {
            // coarse grid keeps tie groups identical after the transforms
            scores.push_back(static_cast<double>(rng.next_int(65)) / 64.0);
            labels.push_back(rng.next_int(2) == 0 ? Label::ordered : Label::disordered);
        }
        labels[0] = Label::ordered;
        labels[1] = Label::disordered;
        const auto base = try_roc_auc(scores, labels);
        REQUIRE(base.has_value());

        std::vector<double> cubed(scores), squashed(scores);
        for (double& v : cubed) v = v * v * v;
        for (double& v : squashed) v = 1.0 / (1.0 + std::exp(-(5.0 * v - 2.0)));
        CHECK(*try_roc_auc(cubed, labels) == *base);
        CHECK(*try_roc_auc(squashed, labels) == *base);
    }
}

TEST_CASE("roc_auc complement identity holds bitwise") {
    Rng rng = Rng::derive(14, 0);
    for (int iter = 0; iter < 200; ++iter) {
        const int n = 2 + rng.next_int(60);
        std::vector<double> scores;
        std::vector<Label> labels;
        for (int i = 0; i < n; ++i) {
            scores.push_back(rng.next_int(2) == 0
                                 ? rng.next_uniform(0.0, 1.0)
                                 : static_cast<double>(rng.next_int(5)) / 4.0);
            labels.push_back(rng.next_int(2) == 0 ? Label::ordered : Label::disordered);
        }
        labels[0] = Label::ordered;
        if (n > 1) labels[1] = Label::disordered;
        std::vector<double> flipped(scores);
        for (double& v : flipped) v = 1.0 - v;
        const auto a = try_roc_auc(scores, labels);
        const auto b = try_roc_auc(flipped, labels);
        REQUIRE(a.has_value());
        REQUIRE(b.has_value());
        CHECK(*a + *b == 1.0);
    }
}

TEST_CASE("unknown residues never influence any metric") {
    Rng rng = Rng::derive(15, 0);
    auto s = make_scored({0.9, 0.1, 0.7, 0.4, 0.6}, {1, 0, 2, 1, 0});
    const MetricReport before = score_target(s);
    for (int iter = 0; iter < 10; ++iter) {
        s.scores[2] = rng.next_uniform(0.0, 1.0);
        const MetricReport after = score_target(s);
        CHECK(after.mcc == before.mcc);
        CHECK(after.f1 == before.f1);
        CHECK(*after.roc_auc == *before.roc_auc);
    }
}

TEST_CASE("metric ranges") {
    Rng rng = Rng::derive(16, 0);
    for (int iter = 0; iter < 100; ++iter) {
        const int n = 3 + rng.next_int(40);
        Confusion c;
        c.tp = rng.next_int(n);
        c.fp = rng.next_int(n);
        c.tn = rng.next_int(n);
        c.fn = rng.next_int(n);
        if (c.total() == 0) c.tp = 1;
        const double m = mcc_binary(c).value;
        const double f = f1(c).value;
        CHECK(m >= -1.0);
        CHECK(m <= 1.0);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
    }
}

TEST_CASE("aggregate: single-sequence and identical-multiset equivalences") {
    const auto s1 = make_scored({0.9, 0.2, 0.7, 0.1}, {1, 0, 1, 0});
    {
        std::vector<ScoredResidues> one = {s1};
        const AggregateReport rep = aggregate(one);
        const MetricReport direct = score_target(s1);
        CHECK(rep.pooled.mcc == direct.mcc);
        CHECK(*rep.pooled.roc_auc == *direct.roc_auc);
        CHECK(rep.mean_mcc == direct.mcc);
        CHECK(rep.mean_roc_auc == *direct.roc_auc);
    }
    {
        std::vector<ScoredResidues> two = {s1, s1};
        const AggregateReport rep = aggregate(two);
        const MetricReport direct = score_target(s1);
        CHECK(*rep.pooled.roc_auc == *direct.roc_auc);
        CHECK(rep.pooled.mcc == direct.mcc);
    }
}

TEST_CASE("aggregate: pooled differs from per-target mean on a crafted set") {
    // Three targets with very different sizes and score scales; each
    // target's own metrics are hand-checkable, and pooling mixes ranks
    // across targets.
    const auto a = make_scored({0.9, 0.1}, {1, 0});            // AUC 1
    const auto b = make_scored({0.6, 0.4}, {0, 1});            // AUC 0
    const auto c = make_scored({0.8, 0.7, 0.2, 0.3}, {1, 1, 0, 0});  // AUC 1
    std::vector<ScoredResidues> targets = {a, b, c};
    const AggregateReport rep = aggregate(targets);
    CHECK(rep.mean_roc_auc == doctest::Approx((1.0 + 0.0 + 1.0) / 3.0));

    std::vector<double> pooled_scores = {0.9, 0.1, 0.6, 0.4, 0.8, 0.7, 0.2, 0.3};
    std::vector<Label> pooled_labels = {
        Label::disordered, Label::ordered, Label::ordered, Label::disordered,
        Label::disordered, Label::disordered, Label::ordered, Label::ordered};
    CHECK(*rep.pooled.roc_auc == auc_oracle(pooled_scores, pooled_labels));
    CHECK(*rep.pooled.roc_auc != rep.mean_roc_auc);
}
