#include "qdelay/delayperf.hpp"

#include <cmath>
#include <numbers>

#include "qdelay/linalg.hpp"

namespace qdelay {

double delay_penalty(const Mat& f, const Mat& a, const Mat& l, double h,
                     PenaltyMethod method) {
    if (h < 0.0) throw DomainError("delay_penalty: h must be nonnegative");
    if (h == 0.0) return 0.0;
    if (method == PenaltyMethod::Gramian) {
        Mat g = finite_horizon_gramian(a, l * l.transpose(), h);
        return quad_form(f, g, f.transpose());
    }
    auto integrand = [&](double tau) {
        Mat v = f * expm(a * tau) * l;
        return v(0, 0) * v(0, 0);
    };
    return adaptive_simpson(integrand, 0.0, h, 1e-12);
}

double optimal_cost(const SynthesisModel& model, const GainSet& gains, double h,
                    PenaltyMethod method) {
    return gains.j0 + delay_penalty(gains.f, model.a, gains.l, h, method);
}

PerformanceCurve sweep_delay(const SynthesisModel& model, const GainSet& gains,
                             std::vector<double> h_grid, PenaltyMethod method) {
    if (h_grid.empty()) throw DomainError("sweep_delay: empty h grid");
    for (size_t i = 0; i < h_grid.size(); ++i) {
        if (h_grid[i] < 0.0)
            throw DomainError("sweep_delay: negative delay in grid");
        if (i > 0 && h_grid[i] < h_grid[i - 1])
            throw DomainError("sweep_delay: h grid must be sorted");
    }
    PerformanceCurve curve;
    curve.phi = model.phi;
    curve.h_grid = std::move(h_grid);
    curve.method = method;
    curve.gains = gains;
    curve.j_values.reserve(curve.h_grid.size());
    for (double h : curve.h_grid)
        curve.j_values.push_back(optimal_cost(model, gains, h, method));
    return curve;
}

double golden_section_minimize(const std::function<double(double)>& f,
                               double lo, double hi, double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

PhiOptimum optimize_phi(const PlantSpec& plant, const Mat& c1, const Mat& d12,
                        double h) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (h < 0.0) throw DomainError("optimize_phi: h must be nonnegative");

    auto cost_at = [&](double phi) {
        SynthesisModel m = build_synthesis_model(plant, phi, c1, d12, h);
        GainSet g = synthesize(m);
        return optimal_cost(m, g, h);
    };

    const int n_scan = 720;
    const double step = two_pi / n_scan;
    double best_phi = -1.0, best_j = 0.0;
    int ok = 0;
    for (int k = 0; k < n_scan; ++k) {
        double phi = k * step;
        if (!is_admissible_phi(phi, 1e-3)) continue;
        double j;
        try {
            j = cost_at(phi);
        } catch (const std::exception&) {
            continue;
        }
        ++ok;
        if (best_phi < 0.0 || j < best_j) {
            best_phi = phi;
            best_j = j;
        }
    }
    if (ok == 0)
        throw OptimizationError(
            "optimize_phi: synthesis failed at every scanned angle");

    double lo = best_phi - step, hi = best_phi + step;
    auto guarded = [&](double phi) {
        if (!is_admissible_phi(phi, 1e-6)) return best_j + 1.0;
        try {
            return cost_at(phi);
        } catch (const std::exception&) {
            return best_j + 1.0;
        }
    };
    double phi_opt = golden_section_minimize(guarded, lo, hi, 1e-6);
    double j_opt = guarded(phi_opt);
    if (j_opt > best_j) {
        phi_opt = best_phi;
        j_opt = best_j;
    }
    // The cost has period pi in phi (phi -> phi + pi negates C2 and the
    // filter cross term together, leaving both Riccati equations invariant);
    // report the representative in [0, pi).
    phi_opt = std::fmod(phi_opt, std::numbers::pi);
    if (phi_opt < 0.0) phi_opt += std::numbers::pi;
    return {phi_opt, j_opt};
}

FitResult fit_linear_sinusoid(const PerformanceCurve& curve, double omega) {
    const auto& h = curve.h_grid;
    const auto& j = curve.j_values;
    const int n = static_cast<int>(h.size());
    if (n < 8) throw FitError("fit: need at least 8 grid points");
    if (!(omega > 0.0)) throw FitError("fit: frequency must be positive");
    if ((h.back() - h.front()) * omega < 2.0 * std::numbers::pi)
        throw FitError("fit: grid must span at least one period");

    // Normal equations on {1, h, sin(w h), cos(w h)}.
    Mat ata(4, 4), atb(4, 1);
    for (int i = 0; i < n; ++i) {
        double basis[4] = {1.0, h[i], std::sin(omega * h[i]),
                           std::cos(omega * h[i])};
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) ata(r, c) += basis[r] * basis[c];
            atb(r, 0) += basis[r] * j[i];
        }
    }
    Mat coef;
    try {
        coef = solve(ata, atb);
    } catch (const DomainError&) {
        throw FitError("fit: rank-deficient design matrix");
    }

    FitResult fit;
    fit.offset = coef(0, 0);
    fit.slope_a = coef(1, 0);
    double cs = coef(2, 0), cc = coef(3, 0);
    fit.amplitude_b = std::hypot(cs, cc);
    fit.phase_theta = std::atan2(cc, cs);
    if (fit.phase_theta < 0.0) fit.phase_theta += 2.0 * std::numbers::pi;

    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        double pred = fit.offset + fit.slope_a * h[i] +
                      cs * std::sin(omega * h[i]) + cc * std::cos(omega * h[i]);
        ss += (j[i] - pred) * (j[i] - pred);
    }
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
}

double ripple_frequency(const Mat& a) {
    if (classify_stability(a) != Stability::Marginal)
        throw FitError("plant not marginal");
    double w = 0.0;
    for (auto lam : eigenvalues(a)) w = std::max(w, std::abs(lam.imag()));
    if (!(w > 0.0)) throw FitError("plant not marginal");
    // The penalty integrand is a squared sinusoid at the eigenfrequency, so
    // the curve ripples at twice that frequency.
    return 2.0 * w;
}

std::vector<double> make_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || hi < lo) throw DomainError("make_grid: bad bounds");
    std::vector<double> g;
    int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    for (int i = 0; i <= n; ++i) g.push_back(lo + i * step);
    if (g.back() < hi - 1e-12) g.push_back(hi);
    return g;
}

}  // namespace qdelay
