#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "trifit/error.hpp"

namespace trifit {

struct PositionRow {
    int position = 0;  // 1-based
    std::int64_t count = 0;
    double accuracy = 0.0;         // fraction of correct predictions at this position
    double functional_rate = 0.0;  // fraction of true label 1
    double sliding_accuracy = std::numeric_limits<double>::quiet_NaN();
};

struct PositionReport {
    int window = 0;
    std::vector<PositionRow> rows;  // one per position 1..length
};

/// Per-variant prediction joined with its position and true label.
struct PositionObservation {
    int position = 0;
    int label = 0;
    double p = 0.0;
};

/// Per-position accuracy plus a centered sliding-window average (window
/// ceil(length/20), truncated at the edges, averaging populated positions).
inline PositionReport per_position_accuracy(const std::vector<PositionObservation>& observations,
                                            int length, double threshold = 0.5,
                                            int window_override = 0) {
    if (length < 1) throw Error("length must be >= 1");
    PositionReport report;
    report.window = window_override > 0
                        ? window_override
                        : static_cast<int>(std::ceil(static_cast<double>(length) / 20.0));
    report.rows.resize(static_cast<std::size_t>(length));
    std::vector<std::int64_t> correct(static_cast<std::size_t>(length), 0);
    std::vector<std::int64_t> positives(static_cast<std::size_t>(length), 0);
    for (int pos = 1; pos <= length; ++pos)
        report.rows[static_cast<std::size_t>(pos - 1)].position = pos;

    for (const auto& obs : observations) {
        if (obs.position < 1 || obs.position > length)
            throw Error("observation position " + std::to_string(obs.position) +
                        " outside [1, " + std::to_string(length) + "]");
        auto& row = report.rows[static_cast<std::size_t>(obs.position - 1)];
        ++row.count;
        const int pred = obs.p >= threshold ? 1 : 0;
        if (pred == obs.label) ++correct[static_cast<std::size_t>(obs.position - 1)];
        if (obs.label == 1) ++positives[static_cast<std::size_t>(obs.position - 1)];
    }
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        if (report.rows[i].count == 0) continue;
        report.rows[i].accuracy =
            static_cast<double>(correct[i]) / static_cast<double>(report.rows[i].count);
        report.rows[i].functional_rate =
            static_cast<double>(positives[i]) / static_cast<double>(report.rows[i].count);
    }

    const int left = (report.window - 1) / 2;
    const int right = report.window - 1 - left;
    for (int pos = 1; pos <= length; ++pos) {
        const int lo = std::max(1, pos - left);
        const int hi = std::min(length, pos + right);
        double sum = 0.0;
        int populated = 0;
        for (int j = lo; j <= hi; ++j) {
            const auto& row = report.rows[static_cast<std::size_t>(j - 1)];
            if (row.count == 0) continue;
            sum += row.accuracy;
            ++populated;
        }
        if (populated > 0)
            report.rows[static_cast<std::size_t>(pos - 1)].sliding_accuracy =
                sum / static_cast<double>(populated);
    }
    return report;
}

struct RouterUtilization {
    // per protein, mean router weight over its variants; ordered by protein id
    std::vector<std::pair<std::string, Eigen::Vector4d>> per_protein;
};

inline RouterUtilization router_utilization(const std::vector<std::string>& protein_ids,
                                            const Eigen::MatrixXd& weights) {
    if (static_cast<Eigen::Index>(protein_ids.size()) != weights.rows())
        throw Error("protein id count does not match weight rows");
    if (weights.cols() != 4) throw Error("router weights must have 4 columns");
    std::map<std::string, std::pair<Eigen::Vector4d, std::int64_t>> sums;
    for (Eigen::Index r = 0; r < weights.rows(); ++r) {
        auto& slot = sums[protein_ids[static_cast<std::size_t>(r)]];
        if (slot.second == 0) slot.first = Eigen::Vector4d::Zero();
        slot.first += weights.row(r).transpose();
        ++slot.second;
    }
    RouterUtilization result;
    for (const auto& [id, sum] : sums)
        result.per_protein.emplace_back(id, sum.first / static_cast<double>(sum.second));
    return result;
}

}  // namespace trifit
