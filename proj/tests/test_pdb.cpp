#include <catch2/catch_amalgamated.hpp>

#include "trifit/pdb.hpp"

using namespace trifit;

namespace {

std::string atom_line(int serial, const char* res, char chain, int seq, double x, double y,
                      double z, char altloc = ' ', const char* atom = " CA ") {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "ATOM  %5d %-4s%c%3s %c%4d    %8.3f%8.3f%8.3f  1.00  0.00\n",
                  serial, atom, altloc, res, chain, seq, x, y, z);
    return buf;
}

}  // namespace

TEST_CASE("parse_pdb extracts a single CA") {
    const std::string text =
        "ATOM      2  CA  ALA A   1       0.000   0.000   0.000  1.00  0.00           C\n" +
        atom_line(5, "GLY", 'A', 2, 3.8, 0.0, 0.0);
    const auto structure = parse_pdb(text, std::nullopt, "P1");
    REQUIRE(structure.size() == 2);
    CHECK(structure.residues[0].residue_index == 1);
    CHECK(structure.residues[0].residue.letter() == 'A');
    CHECK(structure.residues[0].ca == Eigen::Vector3d(0, 0, 0));
    CHECK(structure.residues[1].residue.letter() == 'G');
    CHECK(structure.residues[1].ca.x() == Catch::Approx(3.8));
}

TEST_CASE("parse_pdb keeps only the first model") {
    const std::string text = "MODEL        1\n" + atom_line(1, "ALA", 'A', 1, 0, 0, 0) +
                             atom_line(2, "GLY", 'A', 2, 3.8, 0, 0) + "ENDMDL\nMODEL        2\n" +
                             atom_line(3, "ALA", 'A', 1, 9, 9, 9) +
                             atom_line(4, "GLY", 'A', 2, 12, 9, 9) + "ENDMDL\n";
    const auto structure = parse_pdb(text);
    REQUIRE(structure.size() == 2);
    CHECK(structure.residues[0].ca == Eigen::Vector3d(0, 0, 0));
}

TEST_CASE("parse_pdb chain selection") {
    const std::string text = atom_line(1, "ALA", 'A', 1, 0, 0, 0) +
                             atom_line(2, "GLY", 'A', 2, 3.8, 0, 0) +
                             atom_line(3, "TRP", 'B', 1, 1, 1, 1) +
                             atom_line(4, "TYR", 'B', 2, 4.8, 1, 1);
    const auto chain_b = parse_pdb(text, 'B');
    REQUIRE(chain_b.size() == 2);
    CHECK(chain_b.residues[0].residue.letter() == 'W');
    // default: first chain encountered
    const auto chain_a = parse_pdb(text);
    CHECK(chain_a.residues[0].residue.letter() == 'A');
}

TEST_CASE("parse_pdb altloc handling") {
    const std::string text = atom_line(1, "ALA", 'A', 1, 0, 0, 0, 'A') +
                             atom_line(2, "ALA", 'A', 1, 0.5, 0, 0, 'B') +
                             atom_line(3, "GLY", 'A', 2, 3.8, 0, 0);
    const auto structure = parse_pdb(text);
    REQUIRE(structure.size() == 2);
    CHECK(structure.residues[0].ca.x() == 0.0);
}

TEST_CASE("parse_pdb errors") {
    CHECK_THROWS_WITH(parse_pdb("HEADER    NOTHING\n"),
                      Catch::Matchers::ContainsSubstring("no CA atoms"));
    // duplicate residue index
    const std::string dup = atom_line(1, "ALA", 'A', 1, 0, 0, 0) +
                            atom_line(2, "GLY", 'A', 1, 3.8, 0, 0);
    CHECK_THROWS_WITH(parse_pdb(dup), Catch::Matchers::ContainsSubstring("duplicate residue"));
    // unparseable coordinates carry the line number
    std::string bad = atom_line(1, "ALA", 'A', 1, 0, 0, 0);
    bad += "ATOM      2  CA  GLY A   2         bad   0.000   0.000  1.00  0.00\n";
    CHECK_THROWS_WITH(parse_pdb(bad), Catch::Matchers::ContainsSubstring("line 2"));
    // unknown residue name
    const std::string unk = atom_line(1, "UNK", 'A', 1, 0, 0, 0) +
                            atom_line(2, "GLY", 'A', 2, 3.8, 0, 0);
    CHECK_THROWS_WITH(parse_pdb(unk), Catch::Matchers::ContainsSubstring("unknown residue"));
    // single residue is not a usable trace
    CHECK_THROWS(parse_pdb(atom_line(1, "ALA", 'A', 1, 0, 0, 0)));
}

TEST_CASE("parse_pdb accepts numbering gaps and ignores non-CA atoms") {
    const std::string text = atom_line(1, "ALA", 'A', 2, 0, 0, 0) +
                             atom_line(2, "ALA", 'A', 2, 1, 1, 1, ' ', " CB ") +
                             atom_line(3, "GLY", 'A', 7, 3.8, 0, 0);
    const auto structure = parse_pdb(text);
    REQUIRE(structure.size() == 2);
    CHECK(structure.residues[0].residue_index == 2);
    CHECK(structure.residues[1].residue_index == 7);
    CHECK(structure.sequence() == "AG");
    CHECK(structure.find(7).value() == 1);
    CHECK_FALSE(structure.find(3).has_value());
}
