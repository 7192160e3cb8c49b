#include <catch2/catch_amalgamated.hpp>

#include <numeric>

#include "trifit/calibration.hpp"
#include "trifit/rng.hpp"

using namespace trifit;

namespace {

// Independent binning implementation: same quantile-chunk definition, coded
// from scratch over (prob, index) sorted pairs.
double ece_oracle(std::vector<double> probs, std::vector<int> labels, int n_bins) {
    const std::size_t n = probs.size();
    std::vector<std::pair<double, std::size_t>> keyed;
    for (std::size_t i = 0; i < n; ++i) keyed.emplace_back(probs[i], i);
    std::sort(keyed.begin(), keyed.end());
    double total = 0.0;
    std::size_t start = 0;
    for (int b = 0; b < n_bins; ++b) {
        std::size_t size = n / static_cast<std::size_t>(n_bins);
        if (static_cast<std::size_t>(b) < n % static_cast<std::size_t>(n_bins)) ++size;
        double sp = 0.0, sy = 0.0;
        for (std::size_t i = start; i < start + size; ++i) {
            sp += keyed[i].first;
            sy += labels[keyed[i].second];
        }
        if (size > 0)
            total += (static_cast<double>(size) / static_cast<double>(n)) *
                     std::abs(sp / static_cast<double>(size) - sy / static_cast<double>(size));
        start += size;
    }
    return total;
}

}  // namespace

TEST_CASE("ece is zero for perfectly confident correct predictions") {
    const std::vector<double> probs(50, 1.0);
    const std::vector<int> labels(50, 1);
    CHECK(ece(probs, labels) == 0.0);
}

TEST_CASE("ece is zero when frequencies match the shared probability") {
    std::vector<double> probs(100, 0.7);
    std::vector<int> labels(100, 0);
    for (int i = 0; i < 70; ++i) labels[static_cast<std::size_t>(i)] = 1;
    CHECK(ece(probs, labels) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("ece matches an independent binning oracle") {
    Rng rng(211);
    std::vector<double> probs;
    std::vector<int> labels;
    for (int i = 0; i < 200; ++i) {
        probs.push_back(rng.next_double());
        labels.push_back(rng.next_double() < probs.back() ? 1 : 0);
    }
    CHECK(ece(probs, labels, 15) == Catch::Approx(ece_oracle(probs, labels, 15)).margin(1e-12));
}

TEST_CASE("quantile bins differ in count by at most one and cover everything") {
    Rng rng(213);
    std::vector<double> probs;
    std::vector<int> labels;
    for (int i = 0; i < 157; ++i) {
        probs.push_back(rng.next_double());
        labels.push_back(static_cast<int>(rng.next_below(2)));
    }
    const auto report = calibration_report(probs, labels, 15);
    REQUIRE(report.bins.size() == 15);
    std::int64_t total = 0, lo = probs.size(), hi = 0;
    for (const auto& bin : report.bins) {
        total += bin.count;
        lo = std::min<std::int64_t>(lo, bin.count);
        hi = std::max<std::int64_t>(hi, bin.count);
    }
    CHECK(total == 157);
    CHECK(hi - lo <= 1);
}

TEST_CASE("confidence tables cover all predictions") {
    Rng rng(217);
    std::vector<double> probs;
    std::vector<int> labels;
    for (int i = 0; i < 300; ++i) {
        probs.push_back(rng.next_double());
        labels.push_back(static_cast<int>(rng.next_below(2)));
    }
    const auto report = calibration_report(probs, labels);
    REQUIRE(report.confidence_accuracy.size() == 10);
    std::int64_t by_label = 0, by_bin = 0;
    for (int label = 0; label < 2; ++label)
        by_label += std::accumulate(report.confidence_histogram[static_cast<std::size_t>(label)]
                                        .begin(),
                                    report.confidence_histogram[static_cast<std::size_t>(label)]
                                        .end(),
                                    std::int64_t{0});
    for (const auto& bin : report.confidence_accuracy) {
        by_bin += bin.count;
        if (bin.count > 0) {
            CHECK(bin.mean_confidence >= bin.lo - 1e-12);
            CHECK(bin.mean_confidence <= bin.hi + 1e-12);
            CHECK(bin.accuracy >= 0.0);
            CHECK(bin.accuracy <= 1.0);
        }
    }
    CHECK(by_label == 300);
    CHECK(by_bin == 300);
}

TEST_CASE("calibration report validates inputs") {
    CHECK_THROWS(calibration_report({1.5}, {1}));
    CHECK_THROWS(calibration_report({0.5, 0.5}, {1}));
    CHECK_THROWS(calibration_report({}, {}));
}

TEST_CASE("reliability svg contains the bins") {
    std::vector<double> probs(60);
    std::vector<int> labels(60);
    Rng rng(219);
    for (int i = 0; i < 60; ++i) {
        probs[static_cast<std::size_t>(i)] = rng.next_double();
        labels[static_cast<std::size_t>(i)] = static_cast<int>(rng.next_below(2));
    }
    const auto svg = reliability_svg(calibration_report(probs, labels));
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("ECE") != std::string::npos);
    CHECK(svg.find("circle") != std::string::npos);
}
