#include "qdelay/lqg.hpp"

#include <cmath>
#include <limits>

#include "qdelay/linalg.hpp"

namespace qdelay {

Mat care_hamiltonian(const CareProblem& p) {
    const int n = p.a.rows();
    const double rinv = 1.0 / p.r;
    Mat abar = p.a - rinv * (p.b * p.s.transpose());
    Mat g = rinv * (p.b * p.b.transpose());
    Mat qbar = p.q - rinv * (p.s * p.s.transpose());
    Mat h(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            h(i, j) = abar(i, j);
            h(i, n + j) = -g(i, j);
            h(n + i, j) = -qbar(i, j);
            h(n + i, n + j) = -abar(j, i);
        }
    return h;
}

namespace {

double determinant(Mat a) {
    const int n = a.rows();
    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (std::abs(a(piv, k)) < 1e-300) return 0.0;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            det = -det;
        }
        det *= a(k, k);
        for (int i = k + 1; i < n; ++i) {
            double f = a(i, k) / a(k, k);
            for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return det;
}

// Matrix sign function by determinant-scaled Newton iteration.
Mat matrix_sign(Mat z) {
    const int m = z.rows();
    for (int it = 0; it < 100; ++it) {
        double d = std::abs(determinant(z));
        double c = (d > 0.0) ? std::pow(d, -1.0 / m) : 1.0;
        Mat zinv = inverse(z);
        Mat next = 0.5 * (c * z + (1.0 / c) * zinv);
        double change = (next - z).norm();
        z = next;
        if (change < 1e-14 * std::max(1.0, z.norm())) break;
    }
    return z;
}

// Orthonormal basis for the column space of a rank-k projector, by
// modified Gram-Schmidt with max-norm column pivoting.
Mat range_basis(const Mat& p, int k) {
    const int m = p.rows();
    Mat work = p;
    Mat u(m, k);
    for (int step = 0; step < k; ++step) {
        int best_j = -1;
        double best = 0.0;
        for (int j = 0; j < m; ++j) {
            double s = 0.0;
            for (int i = 0; i < m; ++i) s += work(i, j) * work(i, j);
            if (s > best) {
                best = s;
                best_j = j;
            }
        }
        if (best_j < 0 || std::sqrt(best) < 1e-12)
            throw SynthesisError("stable subspace has deficient rank");
        double inv = 1.0 / std::sqrt(best);
        for (int i = 0; i < m; ++i) u(i, step) = work(i, best_j) * inv;
        for (int j = 0; j < m; ++j) {
            double dot = 0.0;
            for (int i = 0; i < m; ++i) dot += u(i, step) * work(i, j);
            for (int i = 0; i < m; ++i) work(i, j) -= dot * u(i, step);
        }
    }
    return u;
}

Mat care_residual(const CareProblem& p, const Mat& x) {
    Mat kb = x * p.b + p.s;  // n x 1
    return x * p.a + p.a.transpose() * x + p.q -
           (1.0 / p.r) * (kb * kb.transpose());
}

}  // namespace

CareResult solve_care(const CareProblem& p) {
    const int n = p.a.rows();
    Mat ham = care_hamiltonian(p);
    for (auto lam : eigenvalues(ham))
        if (std::abs(lam.real()) <= 1e-10 * std::max(1.0, ham.max_abs()))
            throw SynthesisError(
                "Hamiltonian has imaginary-axis eigenvalues; no stabilizing "
                "Riccati solution");

    // Stable invariant subspace from the sign function projector.
    Mat proj = 0.5 * (Mat::identity(2 * n) - matrix_sign(ham));
    Mat u = range_basis(proj, n);
    Mat u1(n, n), u2(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            u1(i, j) = u(i, j);
            u2(i, j) = u(n + i, j);
        }
    Mat x = u2 * inverse(u1);
    x = 0.5 * (x + x.transpose());

    // Newton polish.
    for (int it = 0; it < 8; ++it) {
        Mat res = care_residual(p, x);
        if (res.norm() <= 1e-12 * std::max(1.0, x.norm())) break;
        Mat k = (-1.0 / p.r) * (p.b.transpose() * x + p.s.transpose());
        Mat acl = p.a + p.b * k;
        Mat delta = solve_lyapunov(acl.transpose(), res);
        x += delta;
        x = 0.5 * (x + x.transpose());
    }

    CareResult r;
    r.x = x;
    r.gain = (-1.0 / p.r) * (p.b.transpose() * x + p.s.transpose());
    Mat acl = p.a + p.b * r.gain;
    if (!is_hurwitz(acl, 0.0))
        throw SynthesisError("Riccati closed loop is not Hurwitz");
    if (care_residual(p, x).norm() > 1e-9)
        throw SynthesisError("Riccati residual did not converge");
    return r;
}

std::pair<Mat, Mat> solve_control_riccati(const SynthesisModel& model) {
    CareProblem p{model.a, model.b2, model.c1.transpose() * model.c1,
                  model.c1.transpose() * model.d12, model.e1};
    CareResult r = solve_care(p);
    return {r.x, r.gain};
}

std::pair<Mat, Mat> solve_filter_riccati(const SynthesisModel& model) {
    Mat qf = model.b1 * model.s_phi * model.b1.transpose();
    Mat nf = model.b1 * model.s_phi * model.d21.transpose();
    CareProblem p{model.a.transpose(), model.c2.transpose(), qf, nf, model.e2};
    CareResult r = solve_care(p);
    return {r.x, r.gain.transpose()};  // L = K^T so that A + L C2 is Hurwitz
}

double delay_free_cost(const SynthesisModel& model, const Mat& x, const Mat& y,
                       const Mat& f) {
    Mat noise = model.b1 * model.s_phi * model.b1.transpose();
    double j0 = (noise * x).trace() +
                (f.transpose() * (model.e1 * f) * y).trace();
    return j0;
}

double uncontrolled_cost(const SynthesisModel& model) {
    if (!is_hurwitz(model.a))
        throw DivergingCostError(
            "uncontrolled cost diverges: plant matrix is not Hurwitz");
    Mat noise = model.b1 * model.s_phi * model.b1.transpose();
    Mat p = solve_lyapunov(model.a, noise);
    return (model.c1 * p * model.c1.transpose()).trace();
}

GainSet synthesize(const SynthesisModel& model) {
    GainSet g;
    auto [x, f] = solve_control_riccati(model);
    auto [y, l] = solve_filter_riccati(model);
    g.x = x;
    g.f = f;
    g.y = y;
    g.l = l;
    g.j0 = delay_free_cost(model, x, y, f);
    g.j_unc = is_hurwitz(model.a)
                  ? uncontrolled_cost(model)
                  : std::numeric_limits<double>::infinity();
    return g;
}

}  // namespace qdelay
