#include "etsmc/report.hpp"

#include <sstream>

namespace etsmc {

namespace {

void print_matrix(std::ostringstream& out, const std::string& name, const Matrix& m) {
    out << name << " =\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << "  [";
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out << (j ? " " : "") << m(i, j);
        }
        out << "]\n";
    }
}

}  // namespace

std::string topology_report(const TopologyMatrices& topology) {
    std::ostringstream out;
    out << "followers: " << topology.n_followers << "\n";
    print_matrix(out, "A (adjacency)", topology.adjacency);
    print_matrix(out, "B (pinning)", topology.pinning);
    print_matrix(out, "D (degree)", topology.degree);
    print_matrix(out, "L (laplacian)", topology.laplacian);
    print_matrix(out, "H = L + B", topology.grounded);

    const auto eig = eigenvalues(topology.laplacian);
    out << "eigenvalues of L (ascending): ";
    for (std::size_t k = 0; k < eig.size(); ++k) {
        out << (k ? ", " : "");
        out << eig[k].real();
        if (eig[k].imag() != 0.0) out << (eig[k].imag() > 0 ? "+" : "") << eig[k].imag() << "i";
    }
    out << "\n";
    if (eig.size() > 1) {
        out << "lambda2: " << eig[1].real() << "\n";
    }
    out << "balanced: " << (is_balanced(topology) ? "yes" : "no") << "\n";
    const bool tree = has_leader_rooted_spanning_tree(topology);
    out << "leader-rooted spanning tree: " << (tree ? "yes" : "no") << "\n";
    bool invertible = true;
    try {
        invert(topology.grounded);
    } catch (const SingularMatrixError&) {
        invertible = false;
    }
    out << "H invertible: " << (invertible ? "yes" : "no") << "\n";
    return out.str();
}

}  // namespace etsmc
