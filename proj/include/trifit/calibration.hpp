#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "trifit/error.hpp"

namespace trifit {

struct CalibrationBin {
    double mean_p = 0.0;    // mean predicted positive probability in the bin
    double pos_rate = 0.0;  // empirical positive rate
    std::int64_t count = 0;
};

struct ConfidenceBin {
    double lo = 0.0;
    double hi = 0.0;
    std::int64_t count = 0;
    double accuracy = 0.0;
    double mean_confidence = 0.0;
};

struct CalibrationReport {
    double ece = 0.0;
    std::vector<CalibrationBin> bins;  // quantile bins over predicted p
    // confidence histogram max(p, 1-p) per true label, 10 equal-width bins
    // over [0.5, 1]
    std::array<std::vector<std::int64_t>, 2> confidence_histogram;
    std::vector<ConfidenceBin> confidence_accuracy;  // same 10 equal-width bins
};

/// Expected calibration error over `n_bins` quantile bins of the predicted
/// probability (bin counts differ by at most one), plus the equal-width
/// confidence/accuracy table.
inline CalibrationReport calibration_report(const std::vector<double>& probs,
                                            const std::vector<int>& labels, int n_bins = 15) {
    if (probs.size() != labels.size()) throw Error("probs/labels size mismatch");
    const std::size_t n = probs.size();
    if (n == 0) throw Error("no data");
    for (double p : probs)
        if (!(p >= 0.0 && p <= 1.0)) throw Error("probabilities must lie in [0,1]");

    CalibrationReport report;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&probs](std::size_t a, std::size_t b) {
        if (probs[a] != probs[b]) return probs[a] < probs[b];
        return a < b;
    });

    const auto bins = static_cast<std::size_t>(n_bins);
    const std::size_t base = n / bins;
    const std::size_t extra = n % bins;
    std::size_t cursor = 0;
    for (std::size_t b = 0; b < bins; ++b) {
        const std::size_t size = base + (b < extra ? 1 : 0);
        CalibrationBin bin;
        bin.count = static_cast<std::int64_t>(size);
        double sum_p = 0.0, sum_y = 0.0;
        for (std::size_t i = 0; i < size; ++i) {
            const std::size_t idx = order[cursor++];
            sum_p += probs[idx];
            sum_y += labels[idx];
        }
        if (size > 0) {
            bin.mean_p = sum_p / static_cast<double>(size);
            bin.pos_rate = sum_y / static_cast<double>(size);
            report.ece += (static_cast<double>(size) / static_cast<double>(n)) *
                          std::abs(bin.mean_p - bin.pos_rate);
        }
        report.bins.push_back(bin);
    }

    // confidence tables: 10 equal-width bins over [0.5, 1]
    const int conf_bins = 10;
    report.confidence_histogram[0].assign(conf_bins, 0);
    report.confidence_histogram[1].assign(conf_bins, 0);
    report.confidence_accuracy.assign(conf_bins, ConfidenceBin{});
    for (int b = 0; b < conf_bins; ++b) {
        report.confidence_accuracy[static_cast<std::size_t>(b)].lo = 0.5 + 0.05 * b;
        report.confidence_accuracy[static_cast<std::size_t>(b)].hi = 0.5 + 0.05 * (b + 1);
    }
    std::vector<double> conf_sum(conf_bins, 0.0);
    std::vector<std::int64_t> correct(conf_bins, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double confidence = std::max(probs[i], 1.0 - probs[i]);
        int bin = static_cast<int>((confidence - 0.5) / 0.05);
        bin = std::clamp(bin, 0, conf_bins - 1);
        const auto b = static_cast<std::size_t>(bin);
        ++report.confidence_histogram[static_cast<std::size_t>(labels[i])][b];
        ++report.confidence_accuracy[b].count;
        conf_sum[b] += confidence;
        const int pred = probs[i] >= 0.5 ? 1 : 0;
        if (pred == labels[i]) ++correct[b];
    }
    for (int b = 0; b < conf_bins; ++b) {
        auto& bin = report.confidence_accuracy[static_cast<std::size_t>(b)];
        if (bin.count > 0) {
            bin.accuracy = static_cast<double>(correct[static_cast<std::size_t>(b)]) /
                           static_cast<double>(bin.count);
            bin.mean_confidence =
                conf_sum[static_cast<std::size_t>(b)] / static_cast<double>(bin.count);
        }
    }
    return report;
}

inline double ece(const std::vector<double>& probs, const std::vector<int>& labels,
                  int n_bins = 15) {
    return calibration_report(probs, labels, n_bins).ece;
}

/// Minimal reliability diagram (predicted probability vs. empirical rate per
/// quantile bin) as standalone SVG text.
inline std::string reliability_svg(const CalibrationReport& report) {
    const double size = 360.0, margin = 40.0, span = size - 2 * margin;
    auto x_of = [&](double v) { return margin + v * span; };
    auto y_of = [&](double v) { return size - margin - v * span; };
    char buf[256];
    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"360\" height=\"360\" "
           "viewBox=\"0 0 360 360\">\n";
    svg += "<rect width=\"360\" height=\"360\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#888\" "
                  "stroke-dasharray=\"4 3\"/>\n",
                  x_of(0.0), y_of(0.0), x_of(1.0), y_of(1.0));
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  x_of(0.0), y_of(0.0), x_of(1.0), y_of(0.0));
    svg += buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  x_of(0.0), y_of(0.0), x_of(0.0), y_of(1.0));
    svg += buf;
    std::string path;
    for (std::size_t b = 0; b < report.bins.size(); ++b) {
        if (report.bins[b].count == 0) continue;
        std::snprintf(buf, sizeof(buf), "%s%.2f %.2f", path.empty() ? "M" : " L",
                      x_of(report.bins[b].mean_p), y_of(report.bins[b].pos_rate));
        path += buf;
        std::snprintf(buf, sizeof(buf),
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"#1f4e9c\"/>\n",
                      x_of(report.bins[b].mean_p), y_of(report.bins[b].pos_rate));
        svg += buf;
    }
    svg += "<path d=\"" + path + "\" fill=\"none\" stroke=\"#1f4e9c\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">ECE = %.4f</text>\n", margin,
                  margin - 10.0, report.ece);
    svg += buf;
    svg += "<text x=\"130\" y=\"350\" font-size=\"11\">mean predicted probability</text>\n";
    svg += "<text x=\"12\" y=\"200\" font-size=\"11\" transform=\"rotate(-90 12 200)\">"
           "empirical positive rate</text>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace trifit
