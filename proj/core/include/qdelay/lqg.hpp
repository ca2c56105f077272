#pragma once

#include <utility>

#include "qdelay/care.hpp"
#include "qdelay/plant.hpp"

namespace qdelay {

struct DivergingCostError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Riccati solutions, stabilizing gains and the two reference costs.
struct GainSet {
    Mat x;         // control Riccati solution, 2x2 symmetric PSD
    Mat y;         // filter Riccati solution, 2x2 symmetric PSD
    Mat f;         // state-feedback gain, 1x2; A + B2 F Hurwitz
    Mat l;         // observer gain, 2x1; A + L C2 Hurwitz
    double j0 = 0.0;     // delay-free optimal cost
    double j_unc = 0.0;  // cost with u == 0 (infinity when A is not Hurwitz)
};

/// X A + A^T X + C1^T C1 - F^T E1 F = 0 with F = -E1^{-1}(B2^T X + D12^T C1).
std::pair<Mat, Mat> solve_control_riccati(const SynthesisModel& model);

/// Y A^T + A Y + B1 S B1^T - L E2 L^T = 0 with L = -(Y C2^T + B1 S D21^T)/E2.
std::pair<Mat, Mat> solve_filter_riccati(const SynthesisModel& model);

/// tr(B1 S B1^T X) + tr(F^T E1 F Y).
double delay_free_cost(const SynthesisModel& model, const Mat& x, const Mat& y,
                       const Mat& f);

/// tr(C1 P C1^T) with A P + P A^T + B1 S B1^T = 0; requires A Hurwitz.
double uncontrolled_cost(const SynthesisModel& model);

/// Solve both Riccati equations and fill in the costs.
GainSet synthesize(const SynthesisModel& model);

}  // namespace qdelay
