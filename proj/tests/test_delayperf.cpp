#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qdelay/delayperf.hpp"
#include "qdelay/linalg.hpp"

using namespace qdelay;
constexpr double pi = std::numbers::pi;

namespace {

SynthesisModel cavity_model(double phi = 1.98) {
    return build_synthesis_model(preset_damped_cavity(0.5, 1.0), phi, 0.0);
}

SynthesisModel harmonic_model(double phi = 0.0) {
    return build_synthesis_model(preset_harmonic(1.0, 1.0), phi, 0.0);
}

// Closed-form penalty for diagonal A: expand (f1 l1 e^{a1 t} + f2 l2 e^{a2 t})^2
// and integrate each exponential term.
double diagonal_penalty_oracle(double f1, double f2, double l1, double l2,
                               double a1, double a2, double h) {
    auto iexp = [](double a, double h) {
        return std::abs(a) < 1e-14 ? h : (std::exp(a * h) - 1.0) / a;
    };
    return f1 * f1 * l1 * l1 * iexp(2 * a1, h) +
           2.0 * f1 * f2 * l1 * l2 * iexp(a1 + a2, h) +
           f2 * f2 * l2 * l2 * iexp(2 * a2, h);
}

}  // namespace

TEST_CASE("delay penalty vanishes at h=0 and for L=0") {
    SynthesisModel m = cavity_model();
    GainSet g = synthesize(m);
    CHECK(delay_penalty(g.f, m.a, g.l, 0.0) == 0.0);
    CHECK(delay_penalty(g.f, m.a, Mat(2, 1), 5.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(delay_penalty(g.f, m.a, g.l, -0.1), DomainError);
}

TEST_CASE("delay penalty matches the diagonal-A closed form") {
    SynthesisModel m = cavity_model();  // A = diag(-0.5, -1.5)
    GainSet g = synthesize(m);
    for (double h : {0.3, 1.0, 4.0}) {
        double oracle =
            diagonal_penalty_oracle(g.f(0, 0), g.f(0, 1), g.l(0, 0), g.l(1, 0),
                                    m.a(0, 0), m.a(1, 1), h);
        CHECK(delay_penalty(g.f, m.a, g.l, h) ==
              doctest::Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("gramian and quadrature methods agree") {
    for (auto m : {cavity_model(), harmonic_model()}) {
        GainSet g = synthesize(m);
        for (double h : {0.1, 1.0, 10.0}) {
            double pg = delay_penalty(g.f, m.a, g.l, h, PenaltyMethod::Gramian);
            double pq =
                delay_penalty(g.f, m.a, g.l, h, PenaltyMethod::Quadrature);
            CHECK(pg == doctest::Approx(pq).epsilon(1e-8));
        }
    }
}

TEST_CASE("optimal cost reduces to J0 at h=0 and converges for the stable plant") {
    SynthesisModel m = cavity_model();
    GainSet g = synthesize(m);
    CHECK(optimal_cost(m, g, 0.0) == doctest::Approx(g.j0));
    CHECK(std::abs(optimal_cost(m, g, 40.0) - optimal_cost(m, g, 20.0)) <
          1e-8);
}

TEST_CASE("optimal cost grows without bound for the marginal plant") {
    SynthesisModel m = harmonic_model();
    GainSet g = synthesize(m);
    CHECK(optimal_cost(m, g, 20.0) > optimal_cost(m, g, 10.0));
}

TEST_CASE("sweep is nondecreasing and plateaus for the damped cavity") {
    SynthesisModel m = cavity_model();
    GainSet g = synthesize(m);
    PerformanceCurve c =
        sweep_delay(m, g, make_grid(0.0, 10.0, 0.1), PenaltyMethod::Gramian);
    REQUIRE(c.j_values.size() == 101);
    CHECK(c.j_values.front() == doctest::Approx(g.j0));
    for (size_t i = 1; i < c.j_values.size(); ++i)
        CHECK(c.j_values[i] >= c.j_values[i - 1] - 1e-13);
    // plateau near the end
    CHECK(c.j_values[100] - c.j_values[80] < 1e-3);
}

TEST_CASE("tail increments shrink for the stable plant") {
    SynthesisModel m = cavity_model();
    GainSet g = synthesize(m);
    double prev = optimal_cost(m, g, 1.0) - optimal_cost(m, g, 0.0);
    for (double h = 1.0; h < 8.0; h += 1.0) {
        double inc = optimal_cost(m, g, h + 1.0) - optimal_cost(m, g, h);
        CHECK(inc < prev);
        prev = inc;
    }
}

TEST_CASE("single-point sweep returns J0; empty grid is rejected") {
    SynthesisModel m = cavity_model();
    GainSet g = synthesize(m);
    PerformanceCurve c =
        sweep_delay(m, g, {0.0}, PenaltyMethod::Gramian);
    CHECK(c.j_values.size() == 1);
    CHECK(c.j_values[0] == doctest::Approx(g.j0));
    CHECK_THROWS_AS(sweep_delay(m, g, {}, PenaltyMethod::Gramian), DomainError);
}

TEST_CASE("harmonic sweep ripples at twice the eigenfrequency") {
    SynthesisModel m = harmonic_model();
    GainSet g = synthesize(m);
    PerformanceCurve c =
        sweep_delay(m, g, make_grid(0.0, 10.0, 0.05), PenaltyMethod::Gramian);
    // remove the linear trend, then the residual should be pi-periodic
    FitResult fit = fit_linear_sinusoid(c, ripple_frequency(m.a));
    CHECK(ripple_frequency(m.a) == doctest::Approx(2.0));
    CHECK(fit.amplitude_b > 1e-3);
}

TEST_CASE("optimal detector angle for the damped cavity is near 1.98") {
    PlantSpec plant = preset_damped_cavity(0.5, 1.0);
    PhiOptimum opt = optimize_phi(plant, default_c1(), default_d12(), 0.0);
    CHECK(std::abs(opt.phi - 1.98) <= 0.05);

    // hardly fluctuates with delay
    for (double h : {2.0, 6.0, 10.0}) {
        PhiOptimum at_h = optimize_phi(plant, default_c1(), default_d12(), h);
        CHECK(std::abs(at_h.phi - opt.phi) <= 0.05);
    }
}

TEST_CASE("large-delay optimum matches the delay-free optimum") {
    PlantSpec plant = preset_damped_cavity(0.5, 1.0);
    PhiOptimum p0 = optimize_phi(plant, default_c1(), default_d12(), 0.0);
    PhiOptimum p40 = optimize_phi(plant, default_c1(), default_d12(), 40.0);
    CHECK(std::abs(p40.phi - p0.phi) <= 1e-3);
}

TEST_CASE("phi-derivative halving identity at large delay") {
    // d/dphi J_{h,phi} -> (1/2) d/dphi J_phi as h -> infinity
    PlantSpec plant = preset_damped_cavity(0.5, 1.0);
    double phi = 1.7, eps = 1e-4, h = 40.0;
    auto j_at = [&](double p, double delay) {
        SynthesisModel m = build_synthesis_model(plant, p, delay);
        GainSet g = synthesize(m);
        return optimal_cost(m, g, delay);
    };
    double d_h = (j_at(phi + eps, h) - j_at(phi - eps, h)) / (2.0 * eps);
    double d_0 = (j_at(phi + eps, 0.0) - j_at(phi - eps, 0.0)) / (2.0 * eps);
    CHECK(d_h == doctest::Approx(0.5 * d_0).epsilon(1e-3));
}

TEST_CASE("linear-plus-sinusoid fit is exact for the harmonic curve") {
    SynthesisModel m = harmonic_model();
    GainSet g = synthesize(m);
    PerformanceCurve c =
        sweep_delay(m, g, make_grid(0.0, 10.0, 0.05), PenaltyMethod::Gramian);
    FitResult fit = fit_linear_sinusoid(c, ripple_frequency(m.a));
    double jmax = *std::max_element(c.j_values.begin(), c.j_values.end());
    CHECK(fit.rms_residual <= 1e-8 * jmax);
}

TEST_CASE("fit slope and amplitude are independent of phi") {
    std::vector<FitResult> fits;
    for (double phi : {0.0, 2.0 * pi / 18.0, 3.0 * pi / 18.0}) {
        SynthesisModel m = harmonic_model(phi);
        GainSet g = synthesize(m);
        PerformanceCurve c = sweep_delay(m, g, make_grid(0.0, 10.0, 0.05),
                                         PenaltyMethod::Gramian);
        fits.push_back(fit_linear_sinusoid(c, ripple_frequency(m.a)));
    }
    for (size_t i = 1; i < fits.size(); ++i) {
        CHECK(fits[i].slope_a ==
              doctest::Approx(fits[0].slope_a).epsilon(1e-6));
        CHECK(fits[i].amplitude_b ==
              doctest::Approx(fits[0].amplitude_b).epsilon(1e-6));
    }
}

TEST_CASE("fit on a pure line has zero amplitude") {
    PerformanceCurve c;
    c.h_grid = make_grid(0.0, 10.0, 0.5);
    for (double h : c.h_grid) c.j_values.push_back(1.0 + 2.0 * h);
    FitResult fit = fit_linear_sinusoid(c, 1.0);
    CHECK(fit.slope_a == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fit.amplitude_b == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(fit.offset == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("fit input validation") {
    PerformanceCurve c;
    c.h_grid = {0.0, 1.0, 2.0};
    c.j_values = {0.0, 1.0, 2.0};
    CHECK_THROWS_AS(fit_linear_sinusoid(c, 1.0), FitError);
    CHECK_THROWS_AS(ripple_frequency(cavity_model().a), FitError);
}
