#include "qdelay/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace qdelay {

namespace {

void check_same_shape(int r1, int c1, int r2, int c2, const char* op) {
    if (r1 != r2 || c1 != c2)
        throw DimensionError(std::string("shape mismatch in ") + op);
}

}  // namespace

Mat::Mat(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    if (rows < 0 || cols < 0) throw DimensionError("negative matrix dimension");
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ ? static_cast<int>(rows.begin()->size()) : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != cols_)
            throw DimensionError("ragged initializer list");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::zero(int rows, int cols) { return Mat(rows, cols); }

Mat Mat::col(std::initializer_list<double> entries) {
    Mat m(static_cast<int>(entries.size()), 1);
    int i = 0;
    for (double v : entries) m(i++, 0) = v;
    return m;
}

Mat Mat::row(std::initializer_list<double> entries) {
    Mat m(1, static_cast<int>(entries.size()));
    int j = 0;
    for (double v : entries) m(0, j++) = v;
    return m;
}

Mat Mat::transpose() const {
    Mat t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Mat::trace() const {
    if (!is_square()) throw DimensionError("trace of non-square matrix");
    double s = 0.0;
    for (int i = 0; i < rows_; ++i) s += (*this)(i, i);
    return s;
}

double Mat::norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

double Mat::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

bool Mat::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return std::isfinite(v); });
}

Mat& Mat::operator+=(const Mat& o) {
    check_same_shape(rows_, cols_, o.rows_, o.cols_, "+");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

Mat& Mat::operator-=(const Mat& o) {
    check_same_shape(rows_, cols_, o.rows_, o.cols_, "-");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

Mat& Mat::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols() != b.rows()) throw DimensionError("shape mismatch in *");
    Mat c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            double aik = a(i, k);
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Mat solve(Mat a, Mat b) {
    if (!a.is_square()) throw DimensionError("solve: matrix not square");
    if (a.rows() != b.rows()) throw DimensionError("solve: rhs rows mismatch");
    const int n = a.rows(), m = b.cols();
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (std::abs(a(piv, k)) < 1e-300)
            throw DomainError("solve: singular matrix");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            for (int j = 0; j < m; ++j) std::swap(b(k, j), b(piv, j));
        }
        for (int i = k + 1; i < n; ++i) {
            double f = a(i, k) / a(k, k);
            for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            for (int j = 0; j < m; ++j) b(i, j) -= f * b(k, j);
        }
    }
    for (int k = n - 1; k >= 0; --k)
        for (int j = 0; j < m; ++j) {
            double s = b(k, j);
            for (int i = k + 1; i < n; ++i) s -= a(k, i) * b(i, j);
            b(k, j) = s / a(k, k);
        }
    return b;
}

Mat inverse(const Mat& a) { return solve(a, Mat::identity(a.rows())); }

double quad_form(const Mat& row, const Mat& m, const Mat& col) {
    Mat r = row * m * col;
    if (r.rows() != 1 || r.cols() != 1)
        throw DimensionError("quad_form: result not scalar");
    return r(0, 0);
}

// ---------------------------------------------------------------------------

CMat::CMat(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols) {
    if (rows < 0 || cols < 0) throw DimensionError("negative matrix dimension");
}

CMat::CMat(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ ? static_cast<int>(rows.begin()->size()) : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != cols_)
            throw DimensionError("ragged initializer list");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

CMat CMat::from_real(const Mat& m) {
    CMat c(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) c(i, j) = m(i, j);
    return c;
}

CMat CMat::identity(int n) {
    CMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMat CMat::adjoint() const {
    CMat t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = std::conj((*this)(i, j));
    return t;
}

CMat CMat::conj() const {
    CMat t(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(i, j) = std::conj((*this)(i, j));
    return t;
}

Mat CMat::real() const {
    Mat m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).real();
    return m;
}

Mat CMat::imag() const {
    Mat m(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).imag();
    return m;
}

double CMat::norm() const {
    double s = 0.0;
    for (const cplx& v : data_) s += std::norm(v);
    return std::sqrt(s);
}

CMat& CMat::operator+=(const CMat& o) {
    check_same_shape(rows_, cols_, o.rows_, o.cols_, "+");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
}

CMat& CMat::operator-=(const CMat& o) {
    check_same_shape(rows_, cols_, o.rows_, o.cols_, "-");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
}

CMat& CMat::operator*=(cplx s) {
    for (cplx& v : data_) v *= s;
    return *this;
}

CMat operator*(const CMat& a, const CMat& b) {
    if (a.cols() != b.rows()) throw DimensionError("shape mismatch in *");
    CMat c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            CMat::cplx aik = a(i, k);
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

CMat solve(CMat a, CMat b) {
    if (a.rows() != a.cols()) throw DimensionError("solve: matrix not square");
    if (a.rows() != b.rows()) throw DimensionError("solve: rhs rows mismatch");
    const int n = a.rows(), m = b.cols();
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (std::abs(a(piv, k)) < 1e-300)
            throw DomainError("solve: singular matrix");
        if (piv != k)
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
        if (piv != k)
            for (int j = 0; j < m; ++j) std::swap(b(k, j), b(piv, j));
        for (int i = k + 1; i < n; ++i) {
            CMat::cplx f = a(i, k) / a(k, k);
            for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            for (int j = 0; j < m; ++j) b(i, j) -= f * b(k, j);
        }
    }
    for (int k = n - 1; k >= 0; --k)
        for (int j = 0; j < m; ++j) {
            CMat::cplx s = b(k, j);
            for (int i = k + 1; i < n; ++i) s -= a(k, i) * b(i, j);
            b(k, j) = s / a(k, k);
        }
    return b;
}

int rank(CMat m, double tol) {
    const int r = m.rows(), c = m.cols();
    double scale = m.norm();
    if (scale == 0.0) return 0;
    int rk = 0;
    for (int col = 0; col < c && rk < r; ++col) {
        int piv = rk;
        for (int i = rk + 1; i < r; ++i)
            if (std::abs(m(i, col)) > std::abs(m(piv, col))) piv = i;
        if (std::abs(m(piv, col)) <= tol * scale) continue;
        if (piv != rk)
            for (int j = 0; j < c; ++j) std::swap(m(rk, j), m(piv, j));
        for (int i = rk + 1; i < r; ++i) {
            CMat::cplx f = m(i, col) / m(rk, col);
            for (int j = col; j < c; ++j) m(i, j) -= f * m(rk, j);
        }
        ++rk;
    }
    return rk;
}

}  // namespace qdelay
