#pragma once

#include <Eigen/Dense>
#include <string>

#include "trifit/constants.hpp"
#include "trifit/error.hpp"
#include "trifit/gnm.hpp"
#include "trifit/knn.hpp"
#include "trifit/pdb.hpp"

namespace trifit {

/// Geometric features of one mutation site: k neighbor distances (ascending),
/// k unit directions site->neighbor, and the unit vector site->centroid.
/// Missing neighbors (L-1 < k) pad with zero distance and zero direction; a
/// site sitting on the centroid gets a zero centroid direction.
/// `site` is the 1-based residue_index of the structure.
inline Eigen::VectorXd structure_features(const ProteinStructure& structure, int site,
                                          int k = kNeighborCount) {
    const auto row = structure.find(site);
    if (!row)
        throw Error("site " + std::to_string(site) + " not in structure " + structure.protein_id);

    const NeighborTable table = knn(structure, k);
    const auto& neighbors = table.neighbors[*row];

    Eigen::VectorXd features = Eigen::VectorXd::Zero(4 * k + 3);
    for (std::size_t n = 0; n < neighbors.size(); ++n) {
        features(static_cast<Eigen::Index>(n)) = neighbors[n].distance;
        features.segment(static_cast<Eigen::Index>(k + 3 * n), 3) = neighbors[n].direction;
    }

    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& res : structure.residues) centroid += res.ca;
    centroid /= static_cast<double>(structure.size());
    const Eigen::Vector3d to_centroid = centroid - structure.residues[*row].ca;
    const double dist = to_centroid.norm();
    if (dist > 1e-9) features.tail(3) = to_centroid / dist;
    return features;
}

/// Dynamics features of one site: [b | mode row | cross-correlation row | s].
/// `row` is the 1-based row into the GNM matrices (positional, not PDB
/// numbering); callers translate residue numbering first.
inline Eigen::VectorXd dynamics_features(const GnmResult& gnm, int row) {
    const Eigen::Index size = gnm.b.size();
    if (row < 1 || row > size)
        throw Error("site row " + std::to_string(row) + " out of range [1, " +
                    std::to_string(size) + "]");
    const Eigen::Index i = row - 1;
    const Eigen::Index k = gnm.modes.cols();
    Eigen::VectorXd features(2 + 2 * k);
    features(0) = gnm.b(i);
    features.segment(1, k) = gnm.modes.row(i);
    features.segment(1 + k, k) = gnm.cross.row(i);
    features(1 + 2 * k) = gnm.stiffness(i);
    return features;
}

}  // namespace trifit
