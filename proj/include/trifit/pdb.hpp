#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trifit/amino_acid.hpp"
#include "trifit/error.hpp"

namespace trifit {

struct Residue {
    int residue_index = 0;  // 1-based, strictly increasing in file order
    AminoAcid residue = AminoAcid::from_letter('A');
    Eigen::Vector3d ca = Eigen::Vector3d::Zero();
};

/// Ordered C-alpha trace of one chain of one model.
struct ProteinStructure {
    std::string protein_id;
    std::vector<Residue> residues;

    std::size_t size() const { return residues.size(); }

    /// Array index of the residue with the given 1-based residue_index.
    std::optional<std::size_t> find(int residue_index) const {
        for (std::size_t i = 0; i < residues.size(); ++i)
            if (residues[i].residue_index == residue_index) return i;
        return std::nullopt;
    }

    std::string sequence() const {
        std::string seq;
        seq.reserve(residues.size());
        for (const auto& res : residues) seq.push_back(res.residue.letter());
        return seq;
    }
};

namespace detail {

inline std::string_view pdb_field(std::string_view line, std::size_t col_1based,
                                  std::size_t width) {
    if (line.size() < col_1based - 1) return {};
    return line.substr(col_1based - 1, std::min(width, line.size() - (col_1based - 1)));
}

inline std::string_view trim(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
    return text;
}

inline double parse_coord(std::string_view cell, int line_no) {
    const std::string text(trim(cell));
    try {
        std::size_t consumed = 0;
        const double value = std::stod(text, &consumed);
        if (consumed != text.size() || text.empty()) throw Error("");
        return value;
    } catch (...) {
        throw Error("unparseable coordinate at line " + std::to_string(line_no));
    }
}

}  // namespace detail

/// Parse fixed-column PDB ATOM records into a C-alpha trace.
/// First model only; one chain (the requested one, else the first chain seen);
/// altloc blank or 'A' only.
inline ProteinStructure parse_pdb(std::string_view text, std::optional<char> chain = std::nullopt,
                                  const std::string& protein_id = "") {
    ProteinStructure structure;
    structure.protein_id = protein_id;

    std::optional<char> selected_chain = chain;
    bool in_first_model = true;
    bool saw_model = false;
    std::size_t offset = 0;
    int line_no = 0;

    while (offset <= text.size() && in_first_model) {
        const std::size_t eol = text.find('\n', offset);
        std::string_view line = text.substr(
            offset, eol == std::string_view::npos ? std::string_view::npos : eol - offset);
        offset = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;

        const std::string_view record = detail::pdb_field(line, 1, 6);
        if (record.substr(0, 5) == "MODEL") {
            if (saw_model) in_first_model = false;
            saw_model = true;
            continue;
        }
        if (record.substr(0, 6) == "ENDMDL") {
            in_first_model = false;
            continue;
        }
        if (record != "ATOM  ") continue;

        const std::string_view atom_name = detail::trim(detail::pdb_field(line, 13, 4));
        if (atom_name != "CA") continue;

        const char altloc = line.size() >= 17 ? line[16] : ' ';
        if (altloc != ' ' && altloc != 'A') continue;

        const char chain_id = line.size() >= 22 ? line[21] : ' ';
        if (!selected_chain) selected_chain = chain_id;
        if (chain_id != *selected_chain) continue;

        const std::string_view res_name = detail::trim(detail::pdb_field(line, 18, 3));
        const auto residue = AminoAcid::try_from_three(res_name);
        if (!residue)
            throw Error("unknown residue name '" + std::string(res_name) + "' at line " +
                        std::to_string(line_no));

        const std::string_view res_seq = detail::trim(detail::pdb_field(line, 23, 4));
        int residue_index = 0;
        try {
            residue_index = std::stoi(std::string(res_seq));
        } catch (...) {
            throw Error("unparseable residue number at line " + std::to_string(line_no));
        }

        Residue entry;
        entry.residue_index = residue_index;
        entry.residue = *residue;
        entry.ca.x() = detail::parse_coord(detail::pdb_field(line, 31, 8), line_no);
        entry.ca.y() = detail::parse_coord(detail::pdb_field(line, 39, 8), line_no);
        entry.ca.z() = detail::parse_coord(detail::pdb_field(line, 47, 8), line_no);

        if (!structure.residues.empty()) {
            const int last = structure.residues.back().residue_index;
            if (residue_index == last)
                throw Error("duplicate residue index " + std::to_string(residue_index) +
                            " at line " + std::to_string(line_no));
            if (residue_index < last)
                throw Error("residue index not increasing at line " + std::to_string(line_no));
        }
        structure.residues.push_back(entry);
    }

    if (structure.residues.empty()) throw Error("no CA atoms found");
    if (structure.residues.size() < 2) throw Error("structure has fewer than 2 residues");
    return structure;
}

}  // namespace trifit
