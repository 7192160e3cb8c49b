#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trifit/amino_acid.hpp"
#include "trifit/error.hpp"

namespace trifit {

/// One single-amino-acid variant of a protein, plus its assay measurement.
struct VariantRecord {
    std::string protein_id;
    int position = 0;  // 1-based residue index
    AminoAcid wt = AminoAcid::from_letter('A');
    AminoAcid mut = AminoAcid::from_letter('A');
    double dms_score = 0.0;
    std::optional<int> label;  // set by binarize_labels
    std::optional<int> fold;   // 0..4, read from data
};

struct DatasetSplit {
    std::vector<VariantRecord> train;
    std::vector<VariantRecord> val;
    std::vector<VariantRecord> test;
};

/// Column names for per-assay variant CSVs. Defaults follow the ProteinGym
/// per-assay file shape.
struct ColumnMap {
    std::string mutant = "mutant";
    std::string score = "DMS_score";
    std::string fold = "fold_random_5";
};

/// Official ProteinGym fold_random_5 split sizes (folds 0-2 / 3 / 4),
/// kept for documentation and sanity checks against full-scale runs.
inline constexpr std::int64_t kProteinGymTrainVariants = 417307;
inline constexpr std::int64_t kProteinGymValVariants = 139524;
inline constexpr std::int64_t kProteinGymTestVariants = 139480;

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

inline std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

inline double parse_double_cell(std::string_view cell, int line_no, const std::string& what) {
    try {
        std::size_t consumed = 0;
        const std::string text(cell);
        const double value = std::stod(text, &consumed);
        if (consumed != text.size()) throw Error("");
        return value;
    } catch (...) {
        throw Error("bad " + what + " '" + std::string(cell) + "' at line " +
                    std::to_string(line_no));
    }
}

}  // namespace detail

/// Parse a per-assay variant CSV. Mutation strings look like "A24G"; rows with
/// ":" separators (multi-mutants) are rejected. The fold column is optional;
/// when absent, records carry no fold.
inline std::vector<VariantRecord> parse_variant_csv(std::string_view text,
                                                    const ColumnMap& columns = {},
                                                    const std::string& protein_id = "") {
    std::vector<VariantRecord> records;
    std::size_t offset = 0;
    int line_no = 0;
    int mutant_col = -1, score_col = -1, fold_col = -1;
    std::size_t header_cells = 0;
    while (offset <= text.size()) {
        const std::size_t eol = text.find('\n', offset);
        std::string_view line = text.substr(
            offset, eol == std::string_view::npos ? std::string_view::npos : eol - offset);
        offset = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        line = detail::strip_cr(line);
        ++line_no;
        if (line_no == 1) {
            const auto cells = detail::split_csv_line(line);
            header_cells = cells.size();
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (cells[i] == columns.mutant) mutant_col = static_cast<int>(i);
                if (cells[i] == columns.score) score_col = static_cast<int>(i);
                if (cells[i] == columns.fold) fold_col = static_cast<int>(i);
            }
            if (mutant_col < 0)
                throw Error("missing column '" + columns.mutant + "' in header");
            if (score_col < 0)
                throw Error("missing column '" + columns.score + "' in header");
            continue;
        }
        if (line.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != header_cells)
            throw Error("wrong cell count at line " + std::to_string(line_no));

        const std::string_view token = cells[static_cast<std::size_t>(mutant_col)];
        if (token.find(':') != std::string_view::npos)
            throw Error("multi-mutant '" + std::string(token) + "' at line " +
                        std::to_string(line_no));
        if (token.size() < 3)
            throw Error("malformed mutation '" + std::string(token) + "' at line " +
                        std::to_string(line_no));
        const char wt_letter = token.front();
        const char mut_letter = token.back();
        const std::string_view digits = token.substr(1, token.size() - 2);
        if (digits.empty() ||
            !std::all_of(digits.begin(), digits.end(),
                         [](char c) { return c >= '0' && c <= '9'; }))
            throw Error("malformed mutation '" + std::string(token) + "' at line " +
                        std::to_string(line_no));
        const auto wt = AminoAcid::try_from_letter(wt_letter);
        if (!wt)
            throw Error(std::string("unknown residue ") + wt_letter + " at line " +
                        std::to_string(line_no));
        const auto mut = AminoAcid::try_from_letter(mut_letter);
        if (!mut)
            throw Error(std::string("unknown residue ") + mut_letter + " at line " +
                        std::to_string(line_no));

        VariantRecord rec;
        rec.protein_id = protein_id;
        rec.position = std::stoi(std::string(digits));
        if (rec.position < 1)
            throw Error("position must be >= 1 at line " + std::to_string(line_no));
        rec.wt = *wt;
        rec.mut = *mut;
        rec.dms_score =
            detail::parse_double_cell(cells[static_cast<std::size_t>(score_col)], line_no, "score");
        if (fold_col >= 0) {
            const std::string_view cell = cells[static_cast<std::size_t>(fold_col)];
            const double fold = detail::parse_double_cell(cell, line_no, "fold");
            rec.fold = static_cast<int>(fold);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

/// Binarize one assay's DMS scores by top/bottom quantile thresholding with
/// nearest-rank thresholds. With k = ceil(quantile * n) on the ascending
/// score list s[0..n-1]: label 0 iff score < s[k], label 1 iff score > s[n-1-k].
/// Scores tying a threshold fall in the middle band and are dropped, so the
/// result depends only on score ranks.
inline std::vector<VariantRecord> binarize_labels(const std::vector<VariantRecord>& records,
                                                  double quantile = 0.30) {
    if (!(quantile > 0.0 && quantile <= 0.5)) throw Error("quantile must be in (0, 0.5]");
    const std::size_t n = records.size();
    const auto min_size = static_cast<std::size_t>(std::ceil(1.0 / quantile));
    if (n < min_size) throw Error("assay too small to binarize");

    std::vector<double> sorted;
    sorted.reserve(n);
    for (const auto& rec : records) sorted.push_back(rec.dms_score);
    std::sort(sorted.begin(), sorted.end());

    const auto k = static_cast<std::size_t>(std::ceil(quantile * static_cast<double>(n)));
    const double lo_bound = sorted[k];          // first value above the bottom-k block
    const double hi_bound = sorted[n - 1 - k];  // last value below the top-k block

    std::vector<VariantRecord> labeled;
    for (const auto& rec : records) {
        const bool in_bottom = rec.dms_score < lo_bound;
        const bool in_top = rec.dms_score > hi_bound;
        if (in_bottom == in_top) continue;  // middle band (or degenerate overlap)
        VariantRecord out = rec;
        out.label = in_top ? 1 : 0;
        labeled.push_back(std::move(out));
    }
    return labeled;
}

/// Partition labeled variants by fold: {0,1,2} -> train, {3} -> val, {4} -> test.
inline DatasetSplit split_by_fold(const std::vector<VariantRecord>& records) {
    DatasetSplit split;
    for (const auto& rec : records) {
        if (!rec.fold)
            throw Error("record " + rec.protein_id + " " + std::to_string(rec.position) +
                        " has no fold");
        const int fold = *rec.fold;
        if (fold < 0 || fold > 4)
            throw Error("fold " + std::to_string(fold) + " out of range [0,4]");
        if (fold <= 2)
            split.train.push_back(rec);
        else if (fold == 3)
            split.val.push_back(rec);
        else
            split.test.push_back(rec);
    }
    return split;
}

}  // namespace trifit
