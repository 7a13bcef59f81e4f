#include "laprep/dense.hpp"

#include <cmath>

namespace laprep {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, Vector data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
        throw DimensionMismatch("matrix data length " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(rows_) + "x" +
                                std::to_string(cols_));
    check_finite(*this, "matrix");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::diagonal(const Vector& d) {
    DenseMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

void check_finite(const Vector& v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw NotFinite(std::string(what) + " has a non-finite entry");
}

void check_finite(const DenseMatrix& a, const char* what) {
    check_finite(a.data(), what);
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matmul: inner dimensions differ");
    DenseMatrix c(a.rows(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* ci = c.row(i);
        const double* ai = a.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = b.row(k);
            for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) throw DimensionMismatch("matmul_at_b: row counts differ");
    DenseMatrix c(a.cols(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* ak = a.row(k);
        const double* bk = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = ak[i];
            if (aki == 0.0) continue;
            double* ci = c.row(i);
            for (std::size_t j = 0; j < n; ++j) ci[j] += aki * bk[j];
        }
    }
    return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Vector matvec(const DenseMatrix& a, const Vector& x) {
    if (a.cols() != x.size()) throw DimensionMismatch("matvec: dimensions differ");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) acc += ai[j] * x[j];
        y[i] = acc;
    }
    return y;
}

Vector vecmat(const Vector& x, const DenseMatrix& a) {
    if (a.rows() != x.size()) throw DimensionMismatch("vecmat: dimensions differ");
    Vector y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        const double* ai = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += xi * ai[j];
    }
    return y;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw DimensionMismatch("matrix add: shapes differ");
    DenseMatrix c = a;
    for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] += b.data()[i];
    return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw DimensionMismatch("matrix sub: shapes differ");
    DenseMatrix c = a;
    for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] -= b.data()[i];
    return c;
}

DenseMatrix operator*(double s, const DenseMatrix& a) {
    DenseMatrix c = a;
    for (double& x : c.data()) x *= s;
    return c;
}

DenseMatrix scale_rows(const Vector& s, const DenseMatrix& a) {
    if (s.size() != a.rows()) throw DimensionMismatch("scale_rows: dimensions differ");
    DenseMatrix c = a;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* ci = c.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) ci[j] *= s[i];
    }
    return c;
}

DenseMatrix scale_cols(const DenseMatrix& a, const Vector& s) {
    if (s.size() != a.cols()) throw DimensionMismatch("scale_cols: dimensions differ");
    DenseMatrix c = a;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* ci = c.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) ci[j] *= s[j];
    }
    return c;
}

double dot(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw DimensionMismatch("dot: lengths differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
    return acc;
}

double frobenius_norm(const DenseMatrix& a) {
    double acc = 0.0;
    for (double x : a.data()) acc += x * x;
    return std::sqrt(acc);
}

double max_abs(const DenseMatrix& a) {
    double m = 0.0;
    for (double x : a.data()) m = std::max(m, std::abs(x));
    return m;
}

double max_abs_asymmetry(const DenseMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("asymmetry check needs a square matrix");
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            m = std::max(m, std::abs(a(i, j) - a(j, i)));
    return m;
}

double inf_norm(const Vector& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

double gram_identity_error(const DenseMatrix& g) {
    if (g.rows() != g.cols()) throw DimensionMismatch("gram matrix must be square");
    double acc = 0.0;
    for (std::size_t i = 0; i < g.rows(); ++i)
        for (std::size_t j = 0; j < g.cols(); ++j) {
            const double d = g(i, j) - (i == j ? 1.0 : 0.0);
            acc += d * d;
        }
    return std::sqrt(acc);
}

Vector operator-(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw DimensionMismatch("vector sub: lengths differ");
    Vector z = x;
    for (std::size_t i = 0; i < z.size(); ++i) z[i] -= y[i];
    return z;
}

Vector operator+(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw DimensionMismatch("vector add: lengths differ");
    Vector z = x;
    for (std::size_t i = 0; i < z.size(); ++i) z[i] += y[i];
    return z;
}

Vector operator*(double s, const Vector& x) {
    Vector z = x;
    for (double& v : z) v *= s;
    return z;
}

}  // namespace laprep
