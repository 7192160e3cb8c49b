#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstddef>
#include <vector>

#include "trifit/error.hpp"
#include "trifit/pdb.hpp"

namespace trifit {

struct Neighbor {
    std::size_t index = 0;  // array index into structure.residues
    double distance = 0.0;  // Angstrom
    Eigen::Vector3d direction = Eigen::Vector3d::Zero();  // unit vector, from i to j
};

/// K-nearest-neighbor table over the C-alpha trace. Each residue gets
/// min(k, L-1) neighbors in ascending distance order; pad_count records how
/// many slots short proteins leave unfilled.
struct NeighborTable {
    int k = 0;
    std::size_t pad_count = 0;  // k - entries per residue, 0 when L-1 >= k
    std::vector<std::vector<Neighbor>> neighbors;
};

/// Euclidean kNN with distance ties broken by lower residue array index.
inline NeighborTable knn(const ProteinStructure& structure, int k) {
    if (k < 1) throw Error("k must be >= 1");
    const std::size_t count = structure.size();
    if (count < 2) throw Error("structure has fewer than 2 residues");

    const auto entries = std::min<std::size_t>(static_cast<std::size_t>(k), count - 1);
    NeighborTable table;
    table.k = k;
    table.pad_count = static_cast<std::size_t>(k) - entries;
    table.neighbors.resize(count);

    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        order.clear();
        for (std::size_t j = 0; j < count; ++j) {
            if (j == i) continue;
            const double dist = (structure.residues[j].ca - structure.residues[i].ca).norm();
            if (dist < 1e-9) throw Error("coincident Calpha");
            order.emplace_back(dist, j);
        }
        std::sort(order.begin(), order.end());
        table.neighbors[i].reserve(entries);
        for (std::size_t n = 0; n < entries; ++n) {
            Neighbor nb;
            nb.index = order[n].second;
            nb.distance = order[n].first;
            nb.direction =
                (structure.residues[nb.index].ca - structure.residues[i].ca) / nb.distance;
            table.neighbors[i].push_back(nb);
        }
    }
    return table;
}

}  // namespace trifit
