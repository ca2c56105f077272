#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "qdelay/matrix.hpp"

namespace qdelay {

struct ResonanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedDimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Matrix exponential by scaling-and-squaring with a diagonal Pade
/// approximant. Scaled so the 1-norm is at most 0.5 before squaring.
Mat expm(const Mat& m);

/// All eigenvalues of a real square matrix, n <= 4. Characteristic
/// polynomial (Faddeev-LeVerrier) + Durand-Kerner simultaneous roots,
/// refined by Rayleigh-quotient inverse iteration. Sorted by real part,
/// then imaginary part.
std::vector<std::complex<double>> eigenvalues(const Mat& m);

/// Solve A P + P A^T + Q = 0 by Kronecker vectorization; result symmetrized.
/// Throws ResonanceError naming the eigenvalue pair when lambda_i + lambda_j = 0.
Mat solve_lyapunov(const Mat& a, const Mat& q);

/// Integral of exp(A tau) W exp(A^T tau) over [0, h], via the exponential of
/// the augmented block matrix [[A, W], [0, -A^T]] scaled by h.
Mat finite_horizon_gramian(const Mat& a, const Mat& w, double h);

/// Adaptive Simpson quadrature of a scalar function on [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-12);

/// True when every eigenvalue has real part < -eps.
bool is_hurwitz(const Mat& a, double eps = 1e-9);

}  // namespace qdelay
