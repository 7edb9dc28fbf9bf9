#include "etsmc/topology.hpp"

#include <vector>

namespace etsmc {

TopologyMatrices build_topology(const Matrix& adjacency, const Vector& pinning_diag) {
    if (adjacency.rows() != adjacency.cols()) {
        throw ValidationError("build_topology: adjacency must be square, got " +
                              std::to_string(adjacency.rows()) + "x" +
                              std::to_string(adjacency.cols()));
    }
    const Eigen::Index n = adjacency.rows();
    if (n < 1) {
        throw ValidationError("build_topology: at least one follower required");
    }
    if (pinning_diag.size() != n) {
        throw ValidationError("build_topology: pinning vector length " +
                              std::to_string(pinning_diag.size()) + " does not match " +
                              std::to_string(n) + " followers");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double a = adjacency(i, j);
            if (!std::isfinite(a)) {
                throw ValidationError("build_topology: adjacency(" + std::to_string(i) + "," +
                                      std::to_string(j) + ") is not finite");
            }
            if (i == j && a != 0.0) {
                throw ValidationError("build_topology: adjacency(" + std::to_string(i) + "," +
                                      std::to_string(j) + ") must be zero on the diagonal, got " +
                                      std::to_string(a));
            }
            if (a < 0.0) {
                throw ValidationError("build_topology: adjacency(" + std::to_string(i) + "," +
                                      std::to_string(j) + ") is negative (" + std::to_string(a) +
                                      "); weights must be nonnegative");
            }
        }
        const double b = pinning_diag(i);
        if (b != 0.0 && b != 1.0) {
            throw ValidationError("build_topology: pinning(" + std::to_string(i) +
                                  ") must be 0 or 1, got " + std::to_string(b));
        }
    }

    TopologyMatrices t;
    t.n_followers = static_cast<int>(n);
    t.adjacency = adjacency;
    t.pinning = pinning_diag.asDiagonal();
    t.degree = Vector(adjacency.rowwise().sum()).asDiagonal();
    t.laplacian = t.degree - adjacency;
    t.grounded = t.laplacian + t.pinning;
    return t;
}

bool has_leader_rooted_spanning_tree(const TopologyMatrices& topology) {
    const Eigen::Index n = topology.adjacency.rows();
    std::vector<char> reached(static_cast<std::size_t>(n), 0);
    std::vector<Eigen::Index> frontier;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (topology.pinning(i, i) != 0.0) {
            reached[static_cast<std::size_t>(i)] = 1;
            frontier.push_back(i);
        }
    }
    while (!frontier.empty()) {
        const Eigen::Index j = frontier.back();
        frontier.pop_back();
        // i receives from j: arc j -> i in information-flow direction
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!reached[static_cast<std::size_t>(i)] && topology.adjacency(i, j) > 0.0) {
                reached[static_cast<std::size_t>(i)] = 1;
                frontier.push_back(i);
            }
        }
    }
    for (char r : reached) {
        if (!r) return false;
    }
    return true;
}

bool is_balanced(const TopologyMatrices& topology, double tol) {
    const Matrix& L = topology.laplacian;
    const double row = L.rowwise().sum().cwiseAbs().maxCoeff();
    const double col = L.colwise().sum().cwiseAbs().maxCoeff();
    return row <= tol && col <= tol;
}

}  // namespace etsmc
