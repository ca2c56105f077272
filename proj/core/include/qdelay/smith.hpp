#pragma once

#include <vector>

#include "qdelay/lqg.hpp"

namespace qdelay {

/// Discrete-time realization of the optimal delayed-LQG controller:
/// an observer in delay-compensated coordinates plus a finite-time
/// input-convolution (FIR) block.
class DelayController {
public:
    /// h is snapped to the nearest multiple of dt; check snapped_h().
    DelayController(const SynthesisModel& model, const GainSet& gains, double h,
                    double dt);

    /// Advance one step from a measured increment dy, returning the control
    /// value u. Throws DomainError on non-finite input.
    double step(double dy);

    void reset();

    double snapped_h() const { return h_; }
    bool h_was_snapped() const { return snapped_; }
    double dt() const { return dt_; }
    int history_length() const { return n_; }
    const std::vector<double>& kernel() const { return kernel_; }
    const Mat& estimator_state() const { return xhat_; }
    /// Innovation integral eta (diagnostic only, not fed back).
    double innovation() const { return eta_; }

private:
    double convolution() const;

    Mat a_cl_;        // A + B2 F + e^{Ah} L C2 e^{-Ah}
    Mat injection_;   // e^{Ah} L, 2x1
    Mat f_;           // 1x2
    Mat c2_;          // 1x2
    Mat c2_pred_;     // C2 e^{-Ah}, for the innovation diagnostic
    double h_ = 0.0;
    double dt_ = 0.0;
    int n_ = 0;       // history length, h = n dt
    bool snapped_ = false;
    std::vector<double> kernel_;     // k_j = C2 e^{A(j dt - h)} B2
    Mat xhat_;
    std::vector<double> u_history_;  // ring, newest at head_
    int head_ = 0;
    double eta_ = 0.0;
};

}  // namespace qdelay
