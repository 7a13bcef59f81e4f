// Row-major dense matrix and vector types shared by all modules, plus the
// error taxonomy and the handful of kernels everything else is built on.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace laprep {

using Vector = std::vector<double>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define LAPREP_DEFINE_ERROR(Name) \
    struct Name : Error {         \
        using Error::Error;       \
    }

// numlin
LAPREP_DEFINE_ERROR(NotSymmetric);
LAPREP_DEFINE_ERROR(NoConvergence);
LAPREP_DEFINE_ERROR(Singular);
LAPREP_DEFINE_ERROR(DimensionMismatch);
LAPREP_DEFINE_ERROR(NotOrthonormal);
LAPREP_DEFINE_ERROR(NotFinite);
// gridworld
LAPREP_DEFINE_ERROR(InvalidSize);
LAPREP_DEFINE_ERROR(TooManyWalls);
LAPREP_DEFINE_ERROR(Disconnected);
// chain
LAPREP_DEFINE_ERROR(NotStochastic);
LAPREP_DEFINE_ERROR(NotErgodic);
// spectral
LAPREP_DEFINE_ERROR(NotStationary);
LAPREP_DEFINE_ERROR(AsymmetryTooLarge);
LAPREP_DEFINE_ERROR(Degenerate);
LAPREP_DEFINE_ERROR(TooLarge);
// gdo
LAPREP_DEFINE_ERROR(RankDeficient);
LAPREP_DEFINE_ERROR(Diverged);
// bounds
LAPREP_DEFINE_ERROR(NegativeEpsilon);
LAPREP_DEFINE_ERROR(DegenerateGap);
LAPREP_DEFINE_ERROR(InvariantViolated);
// bench
LAPREP_DEFINE_ERROR(SchemaError);
LAPREP_DEFINE_ERROR(IoError);

#undef LAPREP_DEFINE_ERROR

class DenseMatrix {
public:
    DenseMatrix() = default;

    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    // Validates the size and that every entry is finite.
    DenseMatrix(std::size_t rows, std::size_t cols, Vector data);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(const Vector& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    Vector& data() { return data_; }
    const Vector& data() const { return data_; }

    bool same_shape(const DenseMatrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vector data_;
};

void check_finite(const Vector& v, const char* what);
void check_finite(const DenseMatrix& a, const char* what);

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// aᵀ·b without forming the transpose.
DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& a);
Vector matvec(const DenseMatrix& a, const Vector& x);
// xᵀ·a as a vector.
Vector vecmat(const Vector& x, const DenseMatrix& a);

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);

// Rescales row i by s[i] / column j by s[j]; the workhorses for products
// with the diagonal matrix Phi and its powers.
DenseMatrix scale_rows(const Vector& s, const DenseMatrix& a);
DenseMatrix scale_cols(const DenseMatrix& a, const Vector& s);

double dot(const Vector& x, const Vector& y);
double frobenius_norm(const DenseMatrix& a);
double max_abs(const DenseMatrix& a);
double max_abs_asymmetry(const DenseMatrix& a);
double inf_norm(const Vector& x);
// Frobenius distance from the identity.
double gram_identity_error(const DenseMatrix& g);

Vector operator-(const Vector& x, const Vector& y);
Vector operator+(const Vector& x, const Vector& y);
Vector operator*(double s, const Vector& x);

}  // namespace laprep
