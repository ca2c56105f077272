#pragma once

#include <cstdint>

#include "qdelay/smith.hpp"

namespace qdelay {

struct SimConfig {
    double dt = 1e-3;
    double t_burn = 20.0;
    double t_avg = 80.0;
    int n_traj = 64;
    std::uint64_t seed = 0;
};

struct SimEstimate {
    double j_hat = 0.0;
    double stderr_ = 0.0;
    int n_effective = 0;
    int diverged = 0;
};

/// Factor S_phi = M M^T; eigen-factorization so the rank-1 boundary
/// (det S = 0) is handled.
Mat factor_noise(const Mat& s_phi);

/// One closed-loop trajectory (delayed plant + controller) by Euler-Maruyama;
/// returns the time average of z^T z over the averaging window. Deterministic
/// in (cfg.seed, traj_index). Throws DivergingCostError when the state blows
/// up.
double simulate_closed_loop(const SynthesisModel& model, DelayController& ctrl,
                            const SimConfig& cfg, int traj_index);

/// Ensemble estimate over cfg.n_traj independent trajectories.
SimEstimate estimate_cost(const SynthesisModel& model, const GainSet& gains,
                          double h, const SimConfig& cfg);

/// Same loop with the control input forced to zero (uncontrolled reference).
SimEstimate estimate_uncontrolled_cost(const SynthesisModel& model,
                                       const SimConfig& cfg);

}  // namespace qdelay
