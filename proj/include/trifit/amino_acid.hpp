#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "trifit/error.hpp"

namespace trifit {

/// One of the 20 canonical residues, stored as an index into the alphabet
/// "ACDEFGHIKLMNPQRSTVWY". Anything else fails to parse.
class AminoAcid {
public:
    static constexpr int kAlphabetSize = 20;
    static constexpr std::string_view kLetters = "ACDEFGHIKLMNPQRSTVWY";

    static std::optional<AminoAcid> try_from_letter(char letter) {
        const auto pos = kLetters.find(letter);
        if (pos == std::string_view::npos) return std::nullopt;
        return AminoAcid(static_cast<std::uint8_t>(pos));
    }

    static AminoAcid from_letter(char letter) {
        const auto aa = try_from_letter(letter);
        if (!aa) throw Error(std::string("unknown residue ") + letter);
        return *aa;
    }

    /// PDB-style three-letter code, e.g. "ALA".
    static std::optional<AminoAcid> try_from_three(std::string_view code) {
        static constexpr std::array<std::string_view, kAlphabetSize> kThree = {
            "ALA", "CYS", "ASP", "GLU", "PHE", "GLY", "HIS", "ILE", "LYS", "LEU",
            "MET", "ASN", "PRO", "GLN", "ARG", "SER", "THR", "VAL", "TRP", "TYR"};
        for (int i = 0; i < kAlphabetSize; ++i) {
            if (kThree[static_cast<std::size_t>(i)] == code)
                return AminoAcid(static_cast<std::uint8_t>(i));
        }
        return std::nullopt;
    }

    char letter() const { return kLetters[index_]; }
    int index() const { return index_; }

    friend bool operator==(AminoAcid a, AminoAcid b) { return a.index_ == b.index_; }
    friend bool operator!=(AminoAcid a, AminoAcid b) { return a.index_ != b.index_; }

private:
    explicit AminoAcid(std::uint8_t index) : index_(index) {}
    std::uint8_t index_;
};

}  // namespace trifit
