#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"
#include "trifit/gnm.hpp"

using namespace trifit;

namespace {

ProteinStructure chain3() {
    ProteinStructure s;
    s.protein_id = "CHAIN3";
    for (int i = 0; i < 3; ++i) {
        Residue r;
        r.residue_index = i + 1;
        r.residue = AminoAcid::from_letter('A');
        r.ca = Eigen::Vector3d(3.8 * i, 0.0, 0.0);
        s.residues.push_back(r);
    }
    return s;
}

}  // namespace

TEST_CASE("build_kirchhoff on the 3-residue chain") {
    Eigen::Matrix3d full;
    full << 2, -1, -1, -1, 2, -1, -1, -1, 2;
    CHECK(build_kirchhoff(chain3(), 10.0).gamma == full);

    Eigen::Matrix3d path;
    path << 1, -1, 0, -1, 2, -1, 0, -1, 1;
    CHECK(build_kirchhoff(chain3(), 5.0).gamma == path);
}

TEST_CASE("build_kirchhoff with no contacts") {
    ProteinStructure s;
    for (int i = 0; i < 2; ++i) {
        Residue r;
        r.residue_index = i + 1;
        r.residue = AminoAcid::from_letter('G');
        r.ca = Eigen::Vector3d(12.0 * i, 0.0, 0.0);
        s.residues.push_back(r);
    }
    const auto k = build_kirchhoff(s, 10.0);
    CHECK(k.gamma == Eigen::MatrixXd::Zero(2, 2));
    CHECK_THROWS_WITH(decompose(k), Catch::Matchers::ContainsSubstring("disconnected"));
}

TEST_CASE("build_kirchhoff row sums are exactly zero") {
    Rng rng(3);
    const auto structure = testutil::random_structure(40, rng);
    const auto k = build_kirchhoff(structure);
    const Eigen::VectorXd row_sums = k.gamma.rowwise().sum();
    CHECK(row_sums == Eigen::VectorXd::Zero(40));
}

TEST_CASE("decompose fully connected 3-chain") {
    const auto modes = decompose(build_kirchhoff(chain3(), 10.0));
    REQUIRE(modes.eigenvalues.size() == 2);
    CHECK(modes.eigenvalues(0) == Catch::Approx(3.0).margin(1e-10));
    CHECK(modes.eigenvalues(1) == Catch::Approx(3.0).margin(1e-10));
}

TEST_CASE("decompose path-graph 3-chain with sign convention") {
    const auto modes = decompose(build_kirchhoff(chain3(), 5.0));
    REQUIRE(modes.eigenvalues.size() == 2);
    CHECK(modes.eigenvalues(0) == Catch::Approx(1.0).margin(1e-10));
    CHECK(modes.eigenvalues(1) == Catch::Approx(3.0).margin(1e-10));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(modes.modes(0, 0) == Catch::Approx(inv_sqrt2).margin(1e-10));
    CHECK(modes.modes(1, 0) == Catch::Approx(0.0).margin(1e-10));
    CHECK(modes.modes(2, 0) == Catch::Approx(-inv_sqrt2).margin(1e-10));
}

TEST_CASE("decompose is deterministic and meets the eigenpair contract") {
    Rng rng(5);
    const auto structure = testutil::random_structure(30, rng);
    const auto kirchhoff = build_kirchhoff(structure);
    const auto a = decompose(kirchhoff, 30);
    const auto b = decompose(kirchhoff, 30);
    CHECK(a.modes == b.modes);
    CHECK(a.eigenvalues == b.eigenvalues);

    const double scale = kirchhoff.gamma.norm();
    for (Eigen::Index k = 0; k < a.eigenvalues.size(); ++k) {
        CHECK(a.eigenvalues(k) > 1e-8);
        if (k > 0) CHECK(a.eigenvalues(k) >= a.eigenvalues(k - 1));
        const double residual =
            (kirchhoff.gamma * a.modes.col(k) - a.eigenvalues(k) * a.modes.col(k)).norm();
        CHECK(residual <= 1e-8 * scale);
    }
    const Eigen::MatrixXd gram = a.modes.transpose() * a.modes;
    CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <
          1e-8);
}

TEST_CASE("reconstruction from all modes recovers the Kirchhoff matrix") {
    Rng rng(7);
    const auto structure = testutil::random_structure(36, rng);
    const auto kirchhoff = build_kirchhoff(structure);
    const auto modes = decompose(kirchhoff, 36);
    Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(36, 36);
    for (Eigen::Index k = 0; k < modes.eigenvalues.size(); ++k)
        rebuilt += modes.eigenvalues(k) * modes.modes.col(k) * modes.modes.col(k).transpose();
    CHECK((rebuilt - kirchhoff.gamma).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("bfactors of the fully connected 3-chain") {
    const auto modes = decompose(build_kirchhoff(chain3(), 10.0));
    const Eigen::VectorXd raw = bfactors_raw(modes);
    for (int i = 0; i < 3; ++i) CHECK(raw(i) == Catch::Approx(2.0 / 9.0).margin(1e-10));
    CHECK(bfactors(modes) == Eigen::VectorXd::Zero(3));
}

TEST_CASE("bfactors of the path-graph 3-chain") {
    const auto modes = decompose(build_kirchhoff(chain3(), 5.0));
    const Eigen::VectorXd raw = bfactors_raw(modes);
    CHECK(raw(0) == Catch::Approx(5.0 / 9.0).margin(1e-10));
    CHECK(raw(1) == Catch::Approx(2.0 / 9.0).margin(1e-10));
    CHECK(raw(2) == Catch::Approx(5.0 / 9.0).margin(1e-10));
    const Eigen::VectorXd b = bfactors(modes);
    CHECK(b(0) == Catch::Approx(std::sqrt(0.5)).margin(1e-4));
    CHECK(b(1) == Catch::Approx(-std::sqrt(2.0)).margin(1e-4));
    CHECK(b(2) == Catch::Approx(std::sqrt(0.5)).margin(1e-4));
}

TEST_CASE("bfactors are positive and match the pseudo-inverse oracle") {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const int length = 8 + static_cast<int>(rng.next_below(43));
        const auto structure = testutil::random_structure(length, rng);
        const auto kirchhoff = build_kirchhoff(structure);
        const auto modes = decompose(kirchhoff, length);
        const Eigen::VectorXd raw = bfactors_raw(modes);
        CHECK(raw.minCoeff() > 0.0);
        const Eigen::VectorXd oracle = testutil::pseudo_inverse_diagonal(kirchhoff.gamma);
        CHECK((raw - oracle).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("cross_correlations falls back for connected graphs") {
    const auto modes = decompose(build_kirchhoff(chain3(), 5.0));
    // every nonzero mode of a connected graph is orthogonal to the ones
    // vector, so the mean-projection formula vanishes and the fallback fires
    for (Eigen::Index k = 0; k < modes.eigenvalues.size(); ++k)
        CHECK(std::abs(modes.modes.col(k).sum()) < 1e-9);
    const Eigen::MatrixXd cross = cross_correlations(modes);
    CHECK(cross(0, 0) == Catch::Approx(0.5).margin(1e-10));
    CHECK(cross(1, 0) == Catch::Approx(0.0).margin(1e-10));
    CHECK(cross(2, 0) == Catch::Approx(0.5).margin(1e-10));
}

TEST_CASE("fallback cross-correlations sum to the raw B-factor") {
    Rng rng(13);
    const auto structure = testutil::random_structure(20, rng);
    const auto modes = decompose(build_kirchhoff(structure), 20);
    const Eigen::MatrixXd cross = cross_correlations(modes);
    const Eigen::VectorXd raw = bfactors_raw(modes);
    CHECK((cross.rowwise().sum() - raw).cwiseAbs().maxCoeff() < 1e-10);

    const Eigen::MatrixXd self = cross_correlations(modes, CrossCorrFormula::self_correlation);
    CHECK(self == cross);
}

TEST_CASE("gnm_features pads and z-normalizes") {
    const auto result = gnm_features(chain3(), 10.0, 20);
    CHECK(result.mode_count == 2);
    CHECK(result.pad_count == 18);
    CHECK(result.modes.cols() == 20);
    CHECK(result.modes.rightCols(18) == Eigen::MatrixXd::Zero(3, 18));
    CHECK(result.cross.rightCols(18) == Eigen::MatrixXd::Zero(3, 18));
    // stiffness diagonal (2,2,2) z-normalizes to zeros
    CHECK(result.stiffness == Eigen::VectorXd::Zero(3));
    CHECK(result.b == Eigen::VectorXd::Zero(3));
}

TEST_CASE("gnm_features b and s are z-normalized") {
    Rng rng(17);
    const auto structure = testutil::random_structure(25, rng);
    const auto result = gnm_features(structure);
    CHECK(std::abs(result.b.mean()) < 1e-9);
    CHECK(std::abs(result.b.squaredNorm() / 25.0 - 1.0) < 1e-9);
    CHECK(std::abs(result.stiffness.mean()) < 1e-9);
    CHECK(std::abs(result.stiffness.squaredNorm() / 25.0 - 1.0) < 1e-9);
}

TEST_CASE("gnm_features is bit-identical under rigid motion") {
    Rng rng(19);
    const auto structure = testutil::random_structure(22, rng);
    const Eigen::Matrix3d rot = testutil::random_rotation(rng);
    ProteinStructure moved = structure;
    for (auto& res : moved.residues) res.ca = rot * res.ca + Eigen::Vector3d(1.0, -2.0, 0.5);

    const auto base = gnm_features(structure);
    const auto after = gnm_features(moved);
    CHECK(base.b == after.b);
    CHECK(base.modes == after.modes);
    CHECK(base.cross == after.cross);
    CHECK(base.stiffness == after.stiffness);
}
