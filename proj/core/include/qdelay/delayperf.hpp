#pragma once

#include <functional>
#include <vector>

#include "qdelay/lqg.hpp"

namespace qdelay {

struct OptimizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PenaltyMethod { Gramian, Quadrature };

struct PerformanceCurve {
    double phi = 0.0;
    std::vector<double> h_grid;
    std::vector<double> j_values;
    PenaltyMethod method = PenaltyMethod::Gramian;
    GainSet gains;
};

struct FitResult {
    double offset = 0.0;
    double slope_a = 0.0;
    double amplitude_b = 0.0;   // >= 0
    double phase_theta = 0.0;   // in [0, 2 pi)
    double rms_residual = 0.0;
};

/// Additive delay penalty: integral of (F e^{A tau} L)^2 over [0, h].
double delay_penalty(const Mat& f, const Mat& a, const Mat& l, double h,
                     PenaltyMethod method = PenaltyMethod::Gramian);

/// J0 + delay penalty.
double optimal_cost(const SynthesisModel& model, const GainSet& gains, double h,
                    PenaltyMethod method = PenaltyMethod::Gramian);

PerformanceCurve sweep_delay(const SynthesisModel& model, const GainSet& gains,
                             std::vector<double> h_grid, PenaltyMethod method);

struct PhiOptimum {
    double phi = 0.0;
    double j = 0.0;
};

/// Global minimum of phi -> J_{h,phi}: dense 720-point scan over admissible
/// angles, then golden-section refinement to |dphi| <= 1e-6.
PhiOptimum optimize_phi(const PlantSpec& plant, const Mat& c1, const Mat& d12,
                        double h);

/// Least squares on the basis {1, h, sin(omega h), cos(omega h)}.
FitResult fit_linear_sinusoid(const PerformanceCurve& curve, double omega);

/// Ripple frequency of the delay curve for a marginally stable plant:
/// twice the eigenfrequency (the penalty integrand is a squared sinusoid).
/// Throws FitError("plant not marginal") otherwise.
double ripple_frequency(const Mat& a);

/// Golden-section search for the minimum of f on [lo, hi].
double golden_section_minimize(const std::function<double(double)>& f,
                               double lo, double hi, double tol);

/// Inclusive grid lo, lo+step, ..., hi (last point clamped to hi).
std::vector<double> make_grid(double lo, double hi, double step);

}  // namespace qdelay
