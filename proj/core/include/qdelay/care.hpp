#pragma once

#include "qdelay/matrix.hpp"

namespace qdelay {

struct SynthesisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Continuous-time algebraic Riccati problem with cross weight:
///   X A + A^T X + Q - (X B + S) R^{-1} (B^T X + S^T) = 0,
/// scalar control channel (R is 1x1).
struct CareProblem {
    Mat a;   // n x n
    Mat b;   // n x 1
    Mat q;   // n x n symmetric
    Mat s;   // n x 1 cross weight
    double r = 1.0;
};

/// Associated 2n x 2n Hamiltonian matrix.
Mat care_hamiltonian(const CareProblem& p);

struct CareResult {
    Mat x;     // stabilizing solution, symmetric PSD
    Mat gain;  // K = -R^{-1} (B^T X + S^T), makes A + B K Hurwitz
};

/// Stabilizing solution via the matrix sign function (stable invariant
/// subspace), polished by Newton steps (Lyapunov solves).
CareResult solve_care(const CareProblem& p);

}  // namespace qdelay
