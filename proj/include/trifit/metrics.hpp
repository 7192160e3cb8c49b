#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "trifit/error.hpp"

namespace trifit {

struct MetricReport {
    double auroc = 0.0;
    double auprc = 0.0;
    double acc = 0.0;
    double macro_f1 = 0.0;
    double macro_recall = 0.0;
    double macro_precision = 0.0;
    std::int64_t n = 0;
};

namespace detail {

inline void check_binary_labels(const std::vector<int>& labels) {
    for (int label : labels)
        if (label != 0 && label != 1) throw Error("labels must be 0 or 1");
}

}  // namespace detail

/// Probability that a random positive outranks a random negative, ties worth
/// one half (Mann-Whitney). Computed via average ranks.
inline double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw Error("scores/labels size mismatch");
    detail::check_binary_labels(labels);
    const std::size_t n = scores.size();
    const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0) throw Error("AUROC undefined for single-class input");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
        for (std::size_t t = i; t < j; ++t)
            if (labels[order[t]] == 1) rank_sum_pos += avg_rank;
        i = j;
    }
    const double p = static_cast<double>(positives);
    const double u = rank_sum_pos - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(negatives));
}

/// Area under the precision-recall step curve, descending-score sweep with
/// tied scores grouped into one threshold.
inline double auprc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw Error("scores/labels size mismatch");
    detail::check_binary_labels(labels);
    const std::size_t n = scores.size();
    const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    if (positives == 0) throw Error("AUPRC undefined without positives");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&scores](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    double area = 0.0;
    double prev_recall = 0.0;
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        for (std::size_t t = i; t < j; ++t) {
            if (labels[order[t]] == 1)
                ++tp;
            else
                ++fp;
        }
        const double recall = static_cast<double>(tp) / static_cast<double>(positives);
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return area;
}

struct ClassificationMetrics {
    double acc = 0.0;
    double macro_f1 = 0.0;
    double macro_recall = 0.0;
    double macro_precision = 0.0;
};

/// Threshold at `threshold` (predict 1 iff score >= threshold), then macro
/// averages over the two classes. A class nobody was assigned to gets
/// precision 0.
inline ClassificationMetrics classification_metrics(const std::vector<double>& scores,
                                                    const std::vector<int>& labels,
                                                    double threshold = 0.5) {
    if (scores.size() != labels.size()) throw Error("scores/labels size mismatch");
    detail::check_binary_labels(labels);
    const std::size_t n = scores.size();
    if (n == 0) throw Error("no data");

    // confusion counts per class c: predicted[c], actual[c], correct[c]
    double predicted[2] = {0, 0};
    double actual[2] = {0, 0};
    double correct[2] = {0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        const int pred = scores[i] >= threshold ? 1 : 0;
        const int truth = labels[i];
        predicted[pred] += 1;
        actual[truth] += 1;
        if (pred == truth) correct[truth] += 1;
    }
    if (actual[0] == 0 || actual[1] == 0)
        throw Error("macro metrics need both classes present");

    ClassificationMetrics out;
    out.acc = (correct[0] + correct[1]) / static_cast<double>(n);
    double f1_sum = 0.0, recall_sum = 0.0, precision_sum = 0.0;
    for (int c = 0; c < 2; ++c) {
        const double precision = predicted[c] > 0 ? correct[c] / predicted[c] : 0.0;
        const double recall = correct[c] / actual[c];
        const double f1 =
            precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        precision_sum += precision;
        recall_sum += recall;
        f1_sum += f1;
    }
    out.macro_precision = precision_sum / 2.0;
    out.macro_recall = recall_sum / 2.0;
    out.macro_f1 = f1_sum / 2.0;
    return out;
}

inline MetricReport metric_report(const std::vector<double>& scores, const std::vector<int>& labels,
                                  double threshold = 0.5) {
    MetricReport report;
    report.auroc = auroc(scores, labels);
    report.auprc = auprc(scores, labels);
    const auto cls = classification_metrics(scores, labels, threshold);
    report.acc = cls.acc;
    report.macro_f1 = cls.macro_f1;
    report.macro_recall = cls.macro_recall;
    report.macro_precision = cls.macro_precision;
    report.n = static_cast<std::int64_t>(scores.size());
    return report;
}

}  // namespace trifit
