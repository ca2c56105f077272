#include "qdelay/smith.hpp"

#include <cmath>

#include "qdelay/linalg.hpp"

namespace qdelay {

DelayController::DelayController(const SynthesisModel& model,
                                 const GainSet& gains, double h, double dt) {
    if (!(dt > 0.0)) throw DomainError("controller: dt must be positive");
    if (h < 0.0) throw DomainError("controller: h must be nonnegative");

    n_ = static_cast<int>(std::nearbyint(h / dt));  // ties to even
    h_ = n_ * dt;
    snapped_ = std::abs(h_ - h) > 1e-12 * std::max(1.0, h);
    dt_ = dt;

    Mat e_ah = expm(model.a * h_);
    Mat e_mah = expm(model.a * (-h_));
    injection_ = e_ah * gains.l;
    a_cl_ = model.a + model.b2 * gains.f + injection_ * (model.c2 * e_mah);
    f_ = gains.f;
    c2_ = model.c2;
    c2_pred_ = model.c2 * e_mah;

    // k_j = C2 e^{A (j dt - h)} B2, j = 0..N, built incrementally.
    kernel_.resize(n_ + 1);
    Mat e_step = expm(model.a * dt_);
    Mat acc = e_mah;
    for (int j = 0; j <= n_; ++j) {
        kernel_[j] = (c2_ * acc * model.b2)(0, 0);
        if (j < n_) acc = e_step * acc;
    }

    xhat_ = Mat(2, 1);
    u_history_.assign(n_ + 1, 0.0);
    head_ = 0;
}

void DelayController::reset() {
    xhat_ = Mat(2, 1);
    u_history_.assign(u_history_.size(), 0.0);
    head_ = 0;
    eta_ = 0.0;
}

double DelayController::convolution() const {
    if (n_ == 0) return 0.0;
    const int len = n_ + 1;
    double s = 0.0;
    for (int j = 0; j <= n_; ++j) {
        double w = (j == 0 || j == n_) ? 0.5 : 1.0;
        s += w * kernel_[j] * u_history_[(head_ + j) % len];
    }
    return s * dt_;
}

double DelayController::step(double dy) {
    if (!std::isfinite(dy))
        throw DomainError("controller: non-finite measurement increment");

    double pi = convolution();
    double drive = dy + pi * dt_;

    xhat_ += dt_ * (a_cl_ * xhat_) - drive * injection_;
    eta_ += -(c2_pred_ * xhat_)(0, 0) * dt_ + drive;

    double u = (f_ * xhat_)(0, 0);
    const int len = n_ + 1;
    head_ = (head_ + len - 1) % len;
    u_history_[head_] = u;
    return u;
}

}  // namespace qdelay
