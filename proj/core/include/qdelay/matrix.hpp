#pragma once

#include <complex>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdelay {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Small dense real matrix, row-major. Everything in this toolkit is 4x4 or
/// smaller, so no attempt is made at cache blocking or expression templates.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols);
    Mat(std::initializer_list<std::initializer_list<double>> rows);

    static Mat identity(int n);
    static Mat zero(int rows, int cols);
    /// Column vector from entries.
    static Mat col(std::initializer_list<double> entries);
    /// Row vector from entries.
    static Mat row(std::initializer_list<double> entries);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return data_[i * cols_ + j]; }
    double operator()(int i, int j) const { return data_[i * cols_ + j]; }

    Mat transpose() const;
    double trace() const;
    double norm() const;      // Frobenius
    double max_abs() const;
    bool all_finite() const;
    bool is_square() const { return rows_ == cols_; }

    Mat& operator+=(const Mat& o);
    Mat& operator-=(const Mat& o);
    Mat& operator*=(double s);

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(Mat a, double s) { return a *= s; }
    friend Mat operator*(double s, Mat a) { return a *= s; }
    friend Mat operator-(Mat a) { return a *= -1.0; }
    friend Mat operator*(const Mat& a, const Mat& b);

private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

/// Solve A X = B by Gaussian elimination with partial pivoting.
Mat solve(Mat a, Mat b);
Mat inverse(const Mat& a);

/// Scalar result of a 1xN * NxN * Nx1 sandwich; checks shapes.
double quad_form(const Mat& row, const Mat& m, const Mat& col);

/// Complex counterpart, used for coupling rows and synthesis-form algebra.
class CMat {
public:
    using cplx = std::complex<double>;

    CMat() = default;
    CMat(int rows, int cols);
    CMat(std::initializer_list<std::initializer_list<cplx>> rows);

    static CMat from_real(const Mat& m);
    static CMat identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    cplx& operator()(int i, int j) { return data_[i * cols_ + j]; }
    cplx operator()(int i, int j) const { return data_[i * cols_ + j]; }

    CMat adjoint() const;    // conjugate transpose
    CMat conj() const;
    Mat real() const;
    Mat imag() const;
    /// Im(M) in the matrix sense, (M - M*)/2i; equals entrywise imag part.
    Mat imag_part() const { return imag(); }
    double norm() const;

    CMat& operator+=(const CMat& o);
    CMat& operator-=(const CMat& o);
    CMat& operator*=(cplx s);

    friend CMat operator+(CMat a, const CMat& b) { return a += b; }
    friend CMat operator-(CMat a, const CMat& b) { return a -= b; }
    friend CMat operator*(CMat a, cplx s) { return a *= s; }
    friend CMat operator*(cplx s, CMat a) { return a *= s; }
    friend CMat operator*(const CMat& a, const CMat& b);

private:
    int rows_ = 0, cols_ = 0;
    std::vector<cplx> data_;
};

/// Solve A X = B in complex arithmetic.
CMat solve(CMat a, CMat b);

/// Numerical rank by row reduction with relative tolerance.
int rank(CMat m, double tol = 1e-9);

}  // namespace qdelay
