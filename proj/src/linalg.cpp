#include "etsmc/linalg.hpp"

#include <algorithm>

#include <Eigen/Eigenvalues>

namespace etsmc {

namespace {

void require_square_finite(const Matrix& m, const char* op) {
    if (m.rows() != m.cols()) {
        throw ValidationError(std::string(op) + ": matrix must be square, got " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    if (!m.allFinite()) {
        throw ValidationError(std::string(op) + ": matrix has non-finite entries");
    }
}

}  // namespace

Matrix invert(const Matrix& m) {
    require_square_finite(m, "invert");
    Eigen::PartialPivLU<Matrix> lu(m);
    const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (m.rows() == 0 || min_pivot < kSingularPivotTol) {
        throw SingularMatrixError("invert: matrix is singular to working precision (pivot " +
                                  std::to_string(min_pivot) + ")");
    }
    return lu.inverse();
}

std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
    require_square_finite(m, "eigenvalues");
    if (m.rows() > kMaxEigenDim) {
        throw ValidationError("eigenvalues: dimension " + std::to_string(m.rows()) +
                              " exceeds kernel limit " + std::to_string(kMaxEigenDim));
    }

    std::vector<std::complex<double>> eig;
    eig.reserve(static_cast<std::size_t>(m.rows()));

    // Isolation pre-pass (the permutation step of standard balancing): peel
    // off rows and columns without off-diagonal coupling in the active
    // window. Reducible matrices, communication Laplacians included, shed
    // those eigenvalues exactly instead of through the iteration.
    Matrix a = m;
    Eigen::Index lo = 0;
    Eigen::Index hi = a.rows();  // active window is [lo, hi)
    auto swap_rc = [&](Eigen::Index p, Eigen::Index q) {
        if (p == q) return;
        a.row(p).swap(a.row(q));
        a.col(p).swap(a.col(q));
    };
    bool changed = true;
    while (changed && hi > lo) {
        changed = false;
        for (Eigen::Index i = lo; i < hi; ++i) {
            bool isolated_row = true;
            for (Eigen::Index j = lo; j < hi; ++j) {
                if (j != i && a(i, j) != 0.0) {
                    isolated_row = false;
                    break;
                }
            }
            if (isolated_row) {
                eig.emplace_back(a(i, i), 0.0);
                swap_rc(i, hi - 1);
                --hi;
                changed = true;
                break;
            }
            bool isolated_col = true;
            for (Eigen::Index j = lo; j < hi; ++j) {
                if (j != i && a(j, i) != 0.0) {
                    isolated_col = false;
                    break;
                }
            }
            if (isolated_col) {
                eig.emplace_back(a(i, i), 0.0);
                swap_rc(i, lo);
                ++lo;
                changed = true;
                break;
            }
        }
    }

    if (hi > lo) {
        Eigen::RealSchur<Matrix> schur;
        schur.setMaxIterations(10000);
        schur.compute(a.block(lo, lo, hi - lo, hi - lo), /*computeU=*/false);
        if (schur.info() != Eigen::Success) {
            throw NumericError("eigenvalues: QR iteration did not converge");
        }

        // Walk the quasi-triangular factor: 1x1 blocks are real eigenvalues,
        // 2x2 blocks carry complex conjugate pairs.
        const Matrix& T = schur.matrixT();
        const Eigen::Index n = T.rows();
        for (Eigen::Index i = 0; i < n;) {
            if (i == n - 1 || T(i + 1, i) == 0.0) {
                eig.emplace_back(T(i, i), 0.0);
                ++i;
            } else {
                const double p = 0.5 * (T(i, i) - T(i + 1, i + 1));
                const double z = std::sqrt(std::abs(p * p + T(i + 1, i) * T(i, i + 1)));
                const double re = T(i + 1, i + 1) + p;
                eig.emplace_back(re, z);
                eig.emplace_back(re, -z);
                i += 2;
            }
        }
    }

    std::sort(eig.begin(), eig.end(), [](const auto& a_, const auto& b_) {
        if (a_.real() != b_.real()) return a_.real() < b_.real();
        return a_.imag() < b_.imag();
    });
    return eig;
}

double infinity_norm(const Matrix& m) {
    if (m.rows() == 0) return 0.0;
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace etsmc
