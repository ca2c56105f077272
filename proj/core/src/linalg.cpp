#include "qdelay/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qdelay {

namespace {

double one_norm(const Mat& m) {
    double best = 0.0;
    for (int j = 0; j < m.cols(); ++j) {
        double s = 0.0;
        for (int i = 0; i < m.rows(); ++i) s += std::abs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

// Pade [13/13] numerator/denominator coefficients (Higham).
constexpr double kPade13[] = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};

Mat pade13(const Mat& a) {
    const int n = a.rows();
    const Mat id = Mat::identity(n);
    const Mat a2 = a * a;
    const Mat a4 = a2 * a2;
    const Mat a6 = a4 * a2;
    const double* b = kPade13;
    Mat u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
                 b[5] * a4 + b[3] * a2 + b[1] * id);
    Mat v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
            b[4] * a4 + b[2] * a2 + b[0] * id;
    return solve(v - u, v + u);
}

}  // namespace

Mat expm(const Mat& m) {
    if (!m.is_square()) throw DimensionError("expm: matrix not square");
    if (!m.all_finite()) throw DomainError("expm: non-finite entry");
    double nrm = one_norm(m);
    int s = 0;
    if (nrm > 0.5) s = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
    Mat e = pade13(m * std::ldexp(1.0, -s));
    for (int i = 0; i < s; ++i) e = e * e;
    return e;
}

std::vector<std::complex<double>> eigenvalues(const Mat& m) {
    using cplx = std::complex<double>;
    if (!m.is_square()) throw DimensionError("eigenvalues: matrix not square");
    const int n = m.rows();
    if (n < 1 || n > 4)
        throw UnsupportedDimensionError("eigenvalues: only n in {1,...,4}");

    // Characteristic polynomial coefficients via Faddeev-LeVerrier:
    // p(x) = x^n + c[0] x^{n-1} + ... + c[n-1].
    std::vector<double> c(n);
    Mat mk = m;
    for (int k = 1; k <= n; ++k) {
        c[k - 1] = -mk.trace() / k;
        if (k < n) mk = m * (mk + c[k - 1] * Mat::identity(n));
    }

    auto poly = [&](cplx z) {
        cplx p = 1.0;
        for (int k = 0; k < n; ++k) p = p * z + c[k];
        return p;
    };

    double radius = 1.0;
    for (double v : c) radius = std::max(radius, std::abs(v));
    radius += 1.0;

    // Durand-Kerner simultaneous iteration.
    std::vector<cplx> z(n);
    const cplx seed(0.4, 0.9);
    cplx zk = 1.0;
    for (int i = 0; i < n; ++i) {
        zk *= seed;
        z[i] = radius * zk;
    }
    for (int it = 0; it < 500; ++it) {
        double step = 0.0;
        for (int i = 0; i < n; ++i) {
            cplx denom = 1.0;
            for (int j = 0; j < n; ++j)
                if (j != i) denom *= z[i] - z[j];
            if (std::abs(denom) < 1e-300) denom = 1e-300;
            cplx d = poly(z[i]) / denom;
            z[i] -= d;
            step = std::max(step, std::abs(d));
        }
        if (step < 1e-15 * radius) break;
    }

    // Rayleigh-quotient inverse iteration polish on the full matrix.
    const CMat mc = CMat::from_real(m);
    for (int i = 0; i < n; ++i) {
        cplx lam = z[i];
        CMat v(n, 1);
        for (int k = 0; k < n; ++k) v(k, 0) = cplx(1.0 / (k + 1.0), 0.3 * k);
        for (int it = 0; it < 4; ++it) {
            CMat shifted = mc;
            for (int k = 0; k < n; ++k)
                shifted(k, k) -= lam + cplx(0.0, 1e-14 * radius);
            CMat w;
            try {
                w = solve(shifted, v);
            } catch (const DomainError&) {
                break;  // shift is (numerically) exact
            }
            double nw = w.norm();
            if (!(nw > 0.0) || !std::isfinite(nw)) break;
            w *= cplx(1.0 / nw, 0.0);
            cplx num = (w.adjoint() * mc * w)(0, 0);
            cplx den = (w.adjoint() * w)(0, 0);
            cplx next = num / den;
            if (!std::isfinite(next.real()) || !std::isfinite(next.imag()))
                break;
            v = w;
            if (std::abs(next - lam) < 1e-15 * radius) {
                lam = next;
                break;
            }
            lam = next;
        }
        if (std::abs(poly(lam)) <= std::abs(poly(z[i]))) z[i] = lam;
    }

    std::sort(z.begin(), z.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return z;
}

Mat solve_lyapunov(const Mat& a, const Mat& q) {
    if (!a.is_square() || !q.is_square() || a.rows() != q.rows())
        throw DimensionError("solve_lyapunov: incompatible shapes");
    const int n = a.rows();

    auto eig = eigenvalues(a);
    double scale = std::max(1.0, a.max_abs());
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            if (std::abs(eig[i] + eig[j]) < 1e-10 * scale) {
                std::ostringstream msg;
                msg << "solve_lyapunov: resonant eigenvalue pair ("
                    << eig[i].real() << (eig[i].imag() < 0 ? "-" : "+")
                    << std::abs(eig[i].imag()) << "i, " << eig[j].real()
                    << (eig[j].imag() < 0 ? "-" : "+") << std::abs(eig[j].imag())
                    << "i) sums to zero";
                throw ResonanceError(msg.str());
            }

    // (I (x) A + A (x) I) vec(P) = -vec(Q), row-major vec.
    Mat k(n * n, n * n), rhs(n * n, 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            for (int l = 0; l < n; ++l) {
                k(i * n + j, l * n + j) += a(i, l);
                k(i * n + j, i * n + l) += a(j, l);
            }
            rhs(i * n + j, 0) = -q(i, j);
        }
    Mat x = solve(k, rhs);
    Mat p(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) p(i, j) = x(i * n + j, 0);
    return 0.5 * (p + p.transpose());
}

Mat finite_horizon_gramian(const Mat& a, const Mat& w, double h) {
    if (!a.is_square() || !w.is_square() || a.rows() != w.rows())
        throw DimensionError("finite_horizon_gramian: incompatible shapes");
    if (!(h >= 0.0) || !std::isfinite(h))
        throw DomainError("finite_horizon_gramian: h must be >= 0 and finite");
    const int n = a.rows();
    Mat block(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            block(i, j) = a(i, j) * h;
            block(i, n + j) = w(i, j) * h;
            block(n + i, n + j) = -a(j, i) * h;
        }
    Mat e = expm(block);
    Mat f11(n, n), f12(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            f11(i, j) = e(i, j);
            f12(i, j) = e(i, n + j);
        }
    Mat g = f12 * f11.transpose();
    return 0.5 * (g + g.transpose());
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
    if (a == b) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

bool is_hurwitz(const Mat& a, double eps) {
    for (auto lam : eigenvalues(a))
        if (lam.real() >= -eps) return false;
    return true;
}

}  // namespace qdelay
