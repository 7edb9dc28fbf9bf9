#pragma once

#include "etsmc/linalg.hpp"

namespace etsmc {

/// Communication topology of one leader and N followers. The leader lives
/// outside the N x N matrices; its links appear only on the pinning diagonal.
/// Edge convention: adjacency(i, j) > 0 means follower i receives information
/// from follower j.
struct TopologyMatrices {
    int n_followers = 0;
    Matrix adjacency;  ///< weighted adjacency A, zero diagonal
    Matrix pinning;    ///< diagonal 0/1 matrix B (leader links)
    Matrix degree;     ///< diagonal D, d_i = sum_j A(i, j)
    Matrix laplacian;  ///< L = D - A (every row sums to zero)
    Matrix grounded;   ///< H = L + B, the matrix the control law inverts
};

/// Assemble the topology matrices from an adjacency matrix and a pinning
/// vector. Validates shape, zero diagonal, nonnegative weights and 0/1
/// pinning entries; errors name the offending entry.
TopologyMatrices build_topology(const Matrix& adjacency, const Vector& pinning_diag);

/// True iff every follower is reachable from the leader along the
/// information-flow direction (leader -> pinned followers, then j -> i for
/// every adjacency(i, j) > 0). Equivalent to H = L + B being nonsingular.
bool has_leader_rooted_spanning_tree(const TopologyMatrices& topology);

/// True iff both L * 1 and 1^T * L vanish within `tol` (absolute).
bool is_balanced(const TopologyMatrices& topology, double tol = 1e-12);

}  // namespace etsmc
