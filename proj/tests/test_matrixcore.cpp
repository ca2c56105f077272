#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "qdelay/linalg.hpp"

using namespace qdelay;

namespace {

// Independent oracle: truncated power series for the matrix exponential.
Mat expm_series(const Mat& m, int terms = 60) {
    Mat sum = Mat::identity(m.rows());
    Mat term = Mat::identity(m.rows());
    for (int k = 1; k <= terms; ++k) {
        term = term * m;
        term *= 1.0 / k;
        sum += term;
    }
    return sum;
}

Mat random_matrix(int n, double scale, std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = dist(rng);
    return m;
}

}  // namespace

TEST_CASE("expm of zero matrix is identity") {
    Mat e = expm(Mat(2, 2));
    CHECK((e - Mat::identity(2)).max_abs() == 0.0);
}

TEST_CASE("expm of diagonal matrix") {
    for (double t : {0.1, 1.0, 3.7}) {
        Mat e = expm(Mat{{-0.5 * t, 0.0}, {0.0, -1.5 * t}});
        CHECK(e(0, 0) == doctest::Approx(std::exp(-0.5 * t)).epsilon(1e-12));
        CHECK(e(1, 1) == doctest::Approx(std::exp(-1.5 * t)).epsilon(1e-12));
        CHECK(std::abs(e(0, 1)) < 1e-15);
        CHECK(std::abs(e(1, 0)) < 1e-15);
    }
}

TEST_CASE("expm of symplectic generator is a rotation") {
    double t = 0.3;
    Mat e = expm(Mat{{0.0, t}, {-t, 0.0}});
    CHECK(e(0, 0) == doctest::Approx(std::cos(t)).epsilon(1e-13));
    CHECK(e(0, 1) == doctest::Approx(std::sin(t)).epsilon(1e-13));
    CHECK(e(1, 0) == doctest::Approx(-std::sin(t)).epsilon(1e-13));
    // cross-check against the series oracle
    Mat s = expm_series(Mat{{0.0, t}, {-t, 0.0}});
    CHECK((e - s).max_abs() < 1e-13);
}

TEST_CASE("expm rejects bad input") {
    CHECK_THROWS_AS(expm(Mat(2, 3)), DimensionError);
    Mat bad(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(expm(bad), DomainError);
}

TEST_CASE("expm(M) expm(-M) = I for random matrices") {
    std::mt19937 rng(42);
    for (int n : {2, 4}) {
        for (int rep = 0; rep < 20; ++rep) {
            Mat m = random_matrix(n, 2.5, rng);
            Mat prod = expm(m) * expm(-m);
            CHECK((prod - Mat::identity(n)).max_abs() < 1e-10);
        }
    }
}

TEST_CASE("d/dt expm(Mt) equals M expm(Mt)") {
    std::mt19937 rng(7);
    Mat m = random_matrix(2, 1.5, rng);
    double t = 0.8, eps = 1e-6;
    Mat fd = (expm(m * (t + eps)) - expm(m * (t - eps))) * (0.5 / eps);
    Mat exact = m * expm(m * t);
    CHECK((fd - exact).norm() < 1e-6 * exact.norm());
}

TEST_CASE("eigenvalues of diagonal matrices") {
    auto e = eigenvalues(Mat{{-0.5, 0.0}, {0.0, -1.5}});
    CHECK(e[0].real() == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(e[1].real() == doctest::Approx(-0.5).epsilon(1e-12));

    auto f = eigenvalues(Mat{{1.0, 0.0}, {0.0, -3.0}});
    CHECK(f[0].real() == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(f[1].real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigenvalues of the symplectic form are +-i") {
    auto e = eigenvalues(Mat{{0.0, 1.0}, {-1.0, 0.0}});
    CHECK(std::abs(e[0] - std::complex<double>(0.0, -1.0)) < 1e-12);
    CHECK(std::abs(e[1] - std::complex<double>(0.0, 1.0)) < 1e-12);
}

TEST_CASE("eigenvalue residuals on random 4x4") {
    std::mt19937 rng(3);
    for (int rep = 0; rep < 10; ++rep) {
        Mat m = random_matrix(4, 3.0, rng);
        // residual |p(lambda)| of the characteristic polynomial is awkward to
        // scale; instead check det(M - lambda I) ~ 0 via the smallest singular
        // direction: rank of the complex pencil drops at each eigenvalue.
        for (auto lam : eigenvalues(m)) {
            CMat pencil = CMat::from_real(m);
            for (int i = 0; i < 4; ++i) pencil(i, i) -= lam;
            CHECK(rank(pencil, 1e-7) < 4);
        }
    }
}

TEST_CASE("eigenvalues rejects n > 4") {
    CHECK_THROWS_AS(eigenvalues(Mat(5, 5)), UnsupportedDimensionError);
}

TEST_CASE("lyapunov solve: diagonal closed form") {
    Mat p = solve_lyapunov(Mat{{-0.5, 0.0}, {0.0, -1.5}}, Mat::identity(2));
    CHECK(p(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(std::abs(p(0, 1)) < 1e-12);
}

TEST_CASE("lyapunov solve: zero forcing gives zero") {
    Mat p = solve_lyapunov(-Mat::identity(2), Mat(2, 2));
    CHECK(p.max_abs() < 1e-14);
}

TEST_CASE("lyapunov solve: resonant spectrum is rejected") {
    Mat sym{{0.0, 1.0}, {-1.0, 0.0}};
    CHECK_THROWS_AS(solve_lyapunov(sym, Mat::identity(2)), ResonanceError);
}

TEST_CASE("lyapunov residual is a fixed point") {
    std::mt19937 rng(11);
    for (int rep = 0; rep < 10; ++rep) {
        Mat a = random_matrix(2, 2.0, rng) - 3.0 * Mat::identity(2);
        Mat q0 = random_matrix(2, 1.0, rng);
        Mat q = q0 + q0.transpose();
        Mat p = solve_lyapunov(a, q);
        Mat res = a * p + p * a.transpose() + q;
        CHECK(res.norm() < 1e-10 * std::max(1.0, q.norm()));
        CHECK((p - p.transpose()).max_abs() < 1e-14);
    }
}

TEST_CASE("gramian at h=0 is zero") {
    Mat g = finite_horizon_gramian(Mat{{0.3, 1.0}, {0.0, -2.0}},
                                   Mat::identity(2), 0.0);
    CHECK(g.max_abs() < 1e-15);
}

TEST_CASE("gramian with A=0 is h W") {
    Mat g = finite_horizon_gramian(Mat(2, 2), Mat::identity(2), 2.0);
    CHECK((g - 2.0 * Mat::identity(2)).max_abs() < 1e-13);
}

TEST_CASE("gramian diagonal closed form and Simpson cross-check") {
    double a1 = -0.5, a2 = -1.5, h = 1.0;
    Mat a{{a1, 0.0}, {0.0, a2}};
    Mat g = finite_horizon_gramian(a, Mat::identity(2), h);
    CHECK(g(0, 0) ==
          doctest::Approx((std::exp(2 * a1 * h) - 1) / (2 * a1)).epsilon(1e-12));
    CHECK(g(1, 1) ==
          doctest::Approx((std::exp(2 * a2 * h) - 1) / (2 * a2)).epsilon(1e-12));

    // entrywise adaptive Simpson of the matrix integrand
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double q = adaptive_simpson(
                [&](double tau) {
                    Mat e = expm(a * tau);
                    Mat w = e * e.transpose();
                    return w(i, j);
                },
                0.0, h);
            CHECK(g(i, j) == doctest::Approx(q).epsilon(1e-8));
        }
}

TEST_CASE("gramian is monotone in h under the PSD order") {
    std::mt19937 rng(5);
    Mat a = random_matrix(2, 1.0, rng);
    Mat w0 = random_matrix(2, 1.0, rng);
    Mat w = w0 * w0.transpose();
    double prev_h = 0.2;
    for (double h : {0.5, 1.0, 2.0, 4.0}) {
        Mat diff = finite_horizon_gramian(a, w, h) -
                   finite_horizon_gramian(a, w, prev_h);
        for (auto lam : eigenvalues(diff)) CHECK(lam.real() >= -1e-12);
        prev_h = h;
    }
}

TEST_CASE("gramian rejects negative horizon") {
    CHECK_THROWS_AS(finite_horizon_gramian(Mat(2, 2), Mat(2, 2), -1.0),
                    DomainError);
}

TEST_CASE("linear solve and inverse round trip") {
    std::mt19937 rng(19);
    Mat a = random_matrix(3, 2.0, rng) + 4.0 * Mat::identity(3);
    Mat x = solve(a, Mat::identity(3));
    CHECK((a * x - Mat::identity(3)).max_abs() < 1e-12);
    CHECK((inverse(a) - x).max_abs() < 1e-14);
}
