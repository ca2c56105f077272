#include <cmath>
#include <vector>

#include "doctest.h"
#include "qdelay/linalg.hpp"
#include "qdelay/smith.hpp"

using namespace qdelay;

namespace {

SynthesisModel cavity_model() {
    return build_synthesis_model(preset_damped_cavity(0.5, 1.0), 1.98, 0.0);
}

}  // namespace

TEST_CASE("h=0 controller has no FIR block") {
    SynthesisModel m = cavity_model();
    GainSet g = synthesize(m);
    DelayController ctrl(m, g, 0.0, 1e-3);
    CHECK(ctrl.history_length() == 0);
    CHECK(ctrl.snapped_h() == 0.0);
    CHECK_FALSE(ctrl.h_was_snapped());
}

TEST_CASE("kernel endpoints match the closed forms") {
    SynthesisModel m = cavity_model();
    GainSet g = synthesize(m);
    double h = 1.0, dt = 1e-3;
    DelayController ctrl(m, g, h, dt);
    CHECK(ctrl.history_length() == 1000);
    double k0 = (m.c2 * expm(m.a * (-h)) * m.b2)(0, 0);
    double kn = (m.c2 * m.b2)(0, 0);
    CHECK(ctrl.kernel().front() == doctest::Approx(k0).epsilon(1e-12));
    CHECK(ctrl.kernel().back() == doctest::Approx(kn).epsilon(1e-12));
}

TEST_CASE("h snaps to the nearest step multiple") {
    SynthesisModel m = cavity_model();
    GainSet g = synthesize(m);
    DelayController ctrl(m, g, 0.05, 0.02);
    CHECK(ctrl.history_length() == 2);
    CHECK(ctrl.snapped_h() == doctest::Approx(0.04));
    CHECK(ctrl.h_was_snapped());
}

TEST_CASE("dt must be positive and dy finite") {
    SynthesisModel m = cavity_model();
    GainSet g = synthesize(m);
    CHECK_THROWS_AS(DelayController(m, g, 1.0, 0.0), DomainError);
    DelayController ctrl(m, g, 0.0, 1e-3);
    CHECK_THROWS_AS(ctrl.step(std::nan("")), DomainError);
}

TEST_CASE("zero input from rest stays at rest") {
    SynthesisModel m = cavity_model();
    GainSet g = synthesize(m);
    DelayController ctrl(m, g, 0.5, 1e-3);
    for (int k = 0; k < 1000; ++k) CHECK(ctrl.step(0.0) == 0.0);
}

TEST_CASE("controller output is linear in the measurement sequence") {
    SynthesisModel m = cavity_model();
    GainSet g = synthesize(m);
    std::vector<double> dy = {0.1, -0.2, 0.05, 0.3, -0.15, 0.0, 0.07};
    double c = -2.5;

    DelayController c1(m, g, 0.3, 0.05), c2(m, g, 0.3, 0.05),
        c3(m, g, 0.3, 0.05);
    std::vector<double> dy2 = {0.02, 0.2, -0.1, 0.0, 0.4, -0.3, 0.11};
    for (size_t k = 0; k < dy.size(); ++k) {
        double ua = c1.step(dy[k]);
        double ub = c2.step(dy2[k]);
        double uc = c3.step(dy[k] + c * dy2[k]);
        CHECK(uc == doctest::Approx(ua + c * ub).epsilon(1e-12));
    }
}

TEST_CASE("h=0 impulse response matches the continuous observer to O(dt)") {
    SynthesisModel m = cavity_model();
    GainSet g = synthesize(m);
    double dt = 1e-4;
    DelayController ctrl(m, g, 0.0, dt);

    // unit impulse in dy at step 0: x_hat jumps to -L, then decays with
    // A + B2 F + L C2
    ctrl.step(1.0);
    Mat a_cl = m.a + m.b2 * g.f + g.l * m.c2;
    int steps = 2000;
    for (int k = 1; k <= steps; ++k) ctrl.step(0.0);
    Mat expected = expm(a_cl * (steps * dt)) * (-1.0 * g.l);
    Mat got = ctrl.estimator_state();
    CHECK((got - expected).norm() < 50.0 * dt * expected.norm());
}

TEST_CASE("trapezoidal FIR converges to the held-input closed form") {
    SynthesisModel m = cavity_model();
    GainSet g = synthesize(m);
    double h = 0.8, ubar = 1.3;

    // pi for constant held input: ubar * C2 (int_0^h e^{A(s-h)} ds) B2
    double exact = ubar * adaptive_simpson(
                              [&](double s) {
                                  return (m.c2 * expm(m.a * (s - h)) * m.b2)(0, 0);
                              },
                              0.0, h);

    double prev_err = 0.0;
    for (int halving = 0; halving < 3; ++halving) {
        double dt = 0.02 / (1 << halving);
        DelayController ctrl(m, g, h, dt);
        int n = ctrl.history_length();
        // feed a long run of constant u by forcing the estimator to produce
        // it is awkward; instead compute the convolution directly from the
        // published kernel with a constant history.
        double pi_val = 0.0;
        const auto& k = ctrl.kernel();
        for (int j = 0; j <= n; ++j) {
            double w = (j == 0 || j == n) ? 0.5 : 1.0;
            pi_val += w * k[j] * ubar;
        }
        pi_val *= dt;
        double err = std::abs(pi_val - exact);
        if (halving > 0) CHECK(err < 0.3 * prev_err);  // ~O(dt^2)
        prev_err = err;
    }
}

TEST_CASE("h=0 closed loop (plant + controller) is internally stable") {
    SynthesisModel m = cavity_model();
    GainSet g = synthesize(m);
    // 4-state matrix of [x; x_hat] with u = F x_hat, no noise
    Mat cl(4, 4);
    Mat a_obs = m.a + m.b2 * g.f + g.l * m.c2;
    Mat bf = m.b2 * g.f;
    Mat lc = g.l * m.c2;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            cl(i, j) = m.a(i, j);
            cl(i, 2 + j) = bf(i, j);
            cl(2 + i, j) = -lc(i, j);
            cl(2 + i, 2 + j) = a_obs(i, j);
        }
    CHECK(is_hurwitz(cl, 0.0));
}
