#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "etsmc/errors.hpp"

namespace etsmc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Pivot magnitude below which an LU factorization is treated as singular.
inline constexpr double kSingularPivotTol = 1e-12;

/// Largest matrix dimension accepted by eigenvalues(). The kernel targets
/// small communication topologies, not general linear algebra.
inline constexpr int kMaxEigenDim = 32;

/// Inverse of a square real matrix via LU with partial pivoting.
/// Throws SingularMatrixError when a pivot falls below kSingularPivotTol,
/// ValidationError for non-square or non-finite input.
Matrix invert(const Matrix& m);

/// Eigenvalues of a square real matrix (dimension <= kMaxEigenDim), sorted
/// ascending by real part, then imaginary part. Real Schur reduction with
/// shifted QR iteration underneath; throws NumericError if the iteration
/// does not converge.
std::vector<std::complex<double>> eigenvalues(const Matrix& m);

/// Induced infinity norm (max absolute row sum).
double infinity_norm(const Matrix& m);

/// One classical 4th-order Runge-Kutta step. `deriv` is evaluated at the
/// stage times; anything held constant over the step (zero-order-hold
/// controls) must be captured inside it. Throws NumericError when a stage
/// derivative is non-finite, ValidationError for dt <= 0.
template <typename F>
Vector rk4_step(F&& deriv, double t, const Vector& x, double dt) {
    if (!(dt > 0.0)) {
        throw ValidationError("rk4_step: dt must be positive, got " + std::to_string(dt));
    }
    auto stage = [&](double ts, const Vector& xs) -> Vector {
        Vector k = deriv(ts, xs);
        if (!k.allFinite()) {
            throw NumericError("rk4_step: non-finite derivative at t = " + std::to_string(ts), ts);
        }
        return k;
    };
    const Vector k1 = stage(t, x);
    const Vector k2 = stage(t + dt / 2.0, x + (dt / 2.0) * k1);
    const Vector k3 = stage(t + dt / 2.0, x + (dt / 2.0) * k2);
    const Vector k4 = stage(t + dt, x + dt * k3);
    return x + (dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4)) / 6.0;
}

}  // namespace etsmc
