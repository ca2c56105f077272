#include "qdelay/mcsim.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <future>
#include <random>
#include <thread>
#include <vector>

#include "qdelay/linalg.hpp"

namespace qdelay {

Mat factor_noise(const Mat& s) {
    if (!s.is_square() || s.rows() != 2)
        throw DimensionError("factor_noise: expected 2x2 covariance");
    double a = s(0, 0), b = 0.5 * (s(0, 1) + s(1, 0)), c = s(1, 1);
    double mean = 0.5 * (a + c);
    double disc = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    double l1 = mean + disc, l2 = mean - disc;
    if (l2 < -1e-12)
        throw DomainError("factor_noise: covariance has a negative eigenvalue");
    l1 = std::max(l1, 0.0);
    l2 = std::max(l2, 0.0);

    // Orthonormal eigenvectors; symmetric square root M = V sqrt(D) V^T.
    double v1x, v1y;
    if (std::abs(b) > 1e-300) {
        v1x = l1 - c;
        v1y = b;
    } else if (a >= c) {
        v1x = 1.0;
        v1y = 0.0;
    } else {
        v1x = 0.0;
        v1y = 1.0;
    }
    double nrm = std::hypot(v1x, v1y);
    v1x /= nrm;
    v1y /= nrm;
    double v2x = -v1y, v2y = v1x;
    double r1 = std::sqrt(l1), r2 = std::sqrt(l2);
    Mat m(2, 2);
    m(0, 0) = r1 * v1x * v1x + r2 * v2x * v2x;
    m(0, 1) = r1 * v1x * v1y + r2 * v2x * v2y;
    m(1, 0) = m(0, 1);
    m(1, 1) = r1 * v1y * v1y + r2 * v2y * v2y;
    return m;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Gaussian stream reproducible from (seed, traj_index) by counter
// composition, independent of platform distribution internals.
class GaussStream {
public:
    GaussStream(std::uint64_t seed, int traj_index)
        : eng_(splitmix64(splitmix64(seed) ^
                          splitmix64(0x51700000ULL + traj_index))) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = (eng_() >> 11) * 0x1.0p-53;
        } while (u1 <= 0.0);
        double u2 = (eng_() >> 11) * 0x1.0p-53;
        double r = std::sqrt(-2.0 * std::log(u1));
        double ang = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(ang);
        have_spare_ = true;
        return r * std::cos(ang);
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace

double simulate_closed_loop(const SynthesisModel& model, DelayController& ctrl,
                            const SimConfig& cfg, int traj_index) {
    ctrl.reset();
    GaussStream rng(cfg.seed, traj_index);
    const double dt = cfg.dt;
    const double sqdt = std::sqrt(dt);

    const Mat noise_gain = factor_noise(model.s_phi);
    const Mat& a = model.a;
    const Mat& b1 = model.b1;
    const Mat& b2 = model.b2;
    const Mat& c1 = model.c1;
    const Mat& c2 = model.c2;
    const Mat& d12 = model.d12;
    const Mat& d21 = model.d21;

    const int delay_steps = ctrl.history_length();
    std::vector<double> u_ring(delay_steps + 1, 0.0);
    int ring_pos = 0;

    const long n_burn = std::lround(cfg.t_burn / dt);
    const long n_total = n_burn + std::lround(cfg.t_avg / dt);

    double x0 = 0.0, x1 = 0.0;
    double acc = 0.0;
    long n_acc = 0;

    for (long k = 0; k < n_total; ++k) {
        double xi0 = rng.next(), xi1 = rng.next();
        double dw0 = (noise_gain(0, 0) * xi0 + noise_gain(0, 1) * xi1) * sqdt;
        double dw1 = (noise_gain(1, 0) * xi0 + noise_gain(1, 1) * xi1) * sqdt;

        // The same noise draw enters the plant and the measurement.
        double dy = (c2(0, 0) * x0 + c2(0, 1) * x1) * dt + d21(0, 0) * dw0 +
                    d21(0, 1) * dw1;

        double u_new = ctrl.step(dy);
        double u_applied = u_ring[ring_pos];  // u_{k-N}

        if (k >= n_burn) {
            double z0 = c1(0, 0) * x0 + c1(0, 1) * x1 + d12(0, 0) * u_applied;
            double z1 = c1(1, 0) * x0 + c1(1, 1) * x1 + d12(1, 0) * u_applied;
            acc += z0 * z0 + z1 * z1;
            ++n_acc;
        }

        double nx0 = x0 + dt * (a(0, 0) * x0 + a(0, 1) * x1 +
                                b2(0, 0) * u_applied) +
                     b1(0, 0) * dw0 + b1(0, 1) * dw1;
        double nx1 = x1 + dt * (a(1, 0) * x0 + a(1, 1) * x1 +
                                b2(1, 0) * u_applied) +
                     b1(1, 0) * dw0 + b1(1, 1) * dw1;
        x0 = nx0;
        x1 = nx1;

        u_ring[ring_pos] = u_new;
        ring_pos = (ring_pos + 1) % (delay_steps + 1);

        if (x0 * x0 + x1 * x1 > 1e12)
            throw DivergingCostError("trajectory diverged");
    }
    return n_acc ? acc / static_cast<double>(n_acc) : 0.0;
}

namespace {

SimEstimate ensemble(const SynthesisModel& model, const GainSet* gains,
                     double h, const SimConfig& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.t_burn > 0.0) || !(cfg.t_avg > 0.0))
        throw DomainError("simulation horizons and dt must be positive");
    if (cfg.n_traj < 1) throw DomainError("n_traj must be >= 1");

    std::vector<double> results(cfg.n_traj);
    std::vector<char> ok(cfg.n_traj, 0);

    auto run_one = [&](int i) {
        // Zero-gain controller stands in for u == 0.
        GainSet zero{Mat(2, 2), Mat(2, 2), Mat(1, 2), Mat(2, 1), 0.0, 0.0};
        DelayController ctrl(model, gains ? *gains : zero, h, cfg.dt);
        try {
            results[i] = simulate_closed_loop(model, ctrl, cfg, i);
            ok[i] = 1;
        } catch (const DivergingCostError&) {
            ok[i] = 0;
        }
    };

    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("QDELAY_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) workers = static_cast<unsigned>(v);
    }
    std::atomic<int> next{0};
    std::vector<std::future<void>> futs;
    for (unsigned w = 0; w < workers; ++w)
        futs.push_back(std::async(std::launch::async, [&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= cfg.n_traj) return;
                run_one(i);
            }
        }));
    for (auto& f : futs) f.get();

    SimEstimate est;
    double sum = 0.0;
    for (int i = 0; i < cfg.n_traj; ++i) {
        if (ok[i]) {
            sum += results[i];
            ++est.n_effective;
        } else {
            ++est.diverged;
        }
    }
    if (est.n_effective == 0)
        throw DivergingCostError("all trajectories diverged");
    est.j_hat = sum / est.n_effective;
    double ss = 0.0;
    for (int i = 0; i < cfg.n_traj; ++i)
        if (ok[i]) ss += (results[i] - est.j_hat) * (results[i] - est.j_hat);
    est.stderr_ =
        est.n_effective > 1
            ? std::sqrt(ss / (est.n_effective - 1.0) / est.n_effective)
            : 0.0;
    return est;
}

}  // namespace

SimEstimate estimate_cost(const SynthesisModel& model, const GainSet& gains,
                          double h, const SimConfig& cfg) {
    return ensemble(model, &gains, h, cfg);
}

SimEstimate estimate_uncontrolled_cost(const SynthesisModel& model,
                                       const SimConfig& cfg) {
    return ensemble(model, nullptr, model.h, cfg);
}

}  // namespace qdelay
