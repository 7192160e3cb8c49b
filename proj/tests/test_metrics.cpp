#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"
#include "trifit/metrics.hpp"

using namespace trifit;

TEST_CASE("auroc hand example") {
    const std::vector<int> labels = {0, 0, 1, 1};
    const std::vector<double> scores = {0.1, 0.4, 0.35, 0.8};
    CHECK(auroc(scores, labels) == Catch::Approx(0.75));
}

TEST_CASE("auroc degenerate cases") {
    CHECK(auroc({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1}) == 1.0);
    CHECK(auroc({0.5, 0.5, 0.5, 0.5}, {0, 1, 0, 1}) == 0.5);
    CHECK_THROWS_WITH(auroc({0.1, 0.2}, {1, 1}),
                      Catch::Matchers::ContainsSubstring("undefined"));
}

TEST_CASE("auroc complement and monotone-transform invariance") {
    Rng rng(101);
    std::vector<double> scores;
    std::vector<int> labels;
    for (int i = 0; i < 60; ++i) {
        scores.push_back(rng.normal());
        labels.push_back(static_cast<int>(rng.next_below(2)));
    }
    labels[0] = 0;
    labels[1] = 1;
    std::vector<double> negated, transformed;
    for (double s : scores) {
        negated.push_back(-s);
        transformed.push_back(std::exp(0.7 * s) + 3.0);
    }
    CHECK(auroc(scores, labels) + auroc(negated, labels) == Catch::Approx(1.0).margin(1e-12));
    CHECK(auroc(scores, labels) == Catch::Approx(auroc(transformed, labels)).margin(1e-12));
}

TEST_CASE("auroc and auprc match brute-force oracles with ties") {
    Rng rng(103);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 4 + static_cast<int>(rng.next_below(47));
        std::vector<double> scores;
        std::vector<int> labels;
        int positives = 0;
        for (int i = 0; i < n; ++i) {
            // coarse grid to generate plenty of exact ties
            scores.push_back(static_cast<double>(rng.next_below(8)) / 4.0);
            labels.push_back(static_cast<int>(rng.next_below(2)));
            positives += labels.back();
        }
        if (positives == 0) labels[0] = 1;
        if (positives == n) labels[0] = 0;
        CHECK(auroc(scores, labels) ==
              Catch::Approx(testutil::auroc_pairwise(scores, labels)).margin(1e-12));
        CHECK(auprc(scores, labels) ==
              Catch::Approx(testutil::auprc_enumeration(scores, labels)).margin(1e-12));
    }
}

TEST_CASE("auprc closed forms") {
    CHECK(auprc({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == 1.0);
    // all scores equal: single PR point at precision = prevalence
    CHECK(auprc({0.4, 0.4, 0.4, 0.4}, {1, 0, 0, 0}) == Catch::Approx(0.25));
    // descending labels (1,0,1,0): area = 1 * 0.5 + (2/3) * 0.5
    CHECK(auprc({0.9, 0.8, 0.7, 0.6}, {1, 0, 1, 0}) ==
          Catch::Approx(0.5 + 0.5 * (2.0 / 3.0)).margin(1e-12));
    CHECK_THROWS(auprc({0.5, 0.4}, {0, 0}));
}

TEST_CASE("classification metrics on a perfect confusion") {
    const auto m = classification_metrics({0.9, 0.8, 0.1, 0.2}, {1, 1, 0, 0});
    CHECK(m.acc == 1.0);
    CHECK(m.macro_f1 == 1.0);
    CHECK(m.macro_recall == 1.0);
    CHECK(m.macro_precision == 1.0);
}

TEST_CASE("classification metrics: all predicted positive") {
    const auto m = classification_metrics({0.9, 0.8, 0.7, 0.6}, {1, 0, 1, 0});
    CHECK(m.acc == Catch::Approx(0.5));
    CHECK(m.macro_recall == Catch::Approx(0.5));
    // class 0 has no predictions: precision 0 by convention
    CHECK(m.macro_precision == Catch::Approx(0.25));
}

TEST_CASE("macro recall equals balanced accuracy") {
    Rng rng(107);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> scores;
        std::vector<int> labels;
        for (int i = 0; i < 40; ++i) {
            scores.push_back(rng.next_double());
            labels.push_back(static_cast<int>(rng.next_below(2)));
        }
        labels[0] = 0;
        labels[1] = 1;
        const auto m = classification_metrics(scores, labels);
        double recall[2] = {0, 0}, total[2] = {0, 0};
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const auto truth = static_cast<std::size_t>(labels[i]);
            total[truth] += 1;
            if ((scores[i] >= 0.5 ? 1 : 0) == labels[i]) recall[truth] += 1;
        }
        const double balanced = 0.5 * (recall[0] / total[0] + recall[1] / total[1]);
        CHECK(m.macro_recall == Catch::Approx(balanced).margin(1e-12));
    }
}

TEST_CASE("metrics are permutation invariant") {
    Rng rng(109);
    std::vector<double> scores;
    std::vector<int> labels;
    for (int i = 0; i < 30; ++i) {
        scores.push_back(rng.next_double());
        labels.push_back(static_cast<int>(rng.next_below(2)));
    }
    labels[0] = 0;
    labels[1] = 1;
    const auto base = metric_report(scores, labels);

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<double> ps;
    std::vector<int> pl;
    for (std::size_t idx : order) {
        ps.push_back(scores[idx]);
        pl.push_back(labels[idx]);
    }
    const auto permuted = metric_report(ps, pl);
    CHECK(base.auroc == Catch::Approx(permuted.auroc).margin(1e-12));
    CHECK(base.auprc == Catch::Approx(permuted.auprc).margin(1e-12));
    CHECK(base.acc == permuted.acc);
    CHECK(base.macro_f1 == Catch::Approx(permuted.macro_f1).margin(1e-12));
}
