#include "laprep/numlin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace laprep::numlin {

namespace {

double off_diagonal_norm(const DenseMatrix& a) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) acc += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(acc);
}

}  // namespace

EigResult sym_eig(const DenseMatrix& a, double tol) {
    if (a.rows() != a.cols()) throw DimensionMismatch("sym_eig: matrix must be square");
    if (tol <= 0.0) throw DimensionMismatch("sym_eig: tol must be positive");
    const std::size_t n = a.rows();

    const double asym = n > 0 ? max_abs_asymmetry(a) : 0.0;
    if (asym > tol)
        throw NotSymmetric("sym_eig: asymmetry " + std::to_string(asym) + " exceeds tol");

    // Work on the symmetrized copy.
    DenseMatrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) = 0.5 * (a(i, j) + a(j, i));
    DenseMatrix q = DenseMatrix::identity(n);

    const double scale = std::max(frobenius_norm(b), 1e-300);
    const double target = 1e-14 * scale;
    const std::size_t max_sweeps = 100;

    std::size_t sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm(b) <= target) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t iq = p + 1; iq < n; ++iq) {
                const double apq = b(p, iq);
                if (apq == 0.0) continue;
                // Stable rotation angle (Golub & Van Loan).
                const double theta = 0.5 * (b(iq, iq) - b(p, p)) / apq;
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                const double h = t * apq;

                b(p, p) -= h;
                b(iq, iq) += h;
                b(p, iq) = 0.0;
                b(iq, p) = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == p || j == iq) continue;
                    const double g = b(j, p);
                    const double f = b(j, iq);
                    b(j, p) = g - s * (f + g * tau);
                    b(p, j) = b(j, p);
                    b(j, iq) = f + s * (g - f * tau);
                    b(iq, j) = b(j, iq);
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const double g = q(j, p);
                    const double f = q(j, iq);
                    q(j, p) = g - s * (f + g * tau);
                    q(j, iq) = f + s * (g - f * tau);
                }
            }
        }
    }
    if (sweep == max_sweeps && off_diagonal_norm(b) > target)
        throw NoConvergence("sym_eig: Jacobi sweeps exhausted");

    // Sort ascending and fix signs.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return b(i, i) < b(j, j); });

    EigResult out;
    out.eigenvalues.resize(n);
    out.eigenvectors = DenseMatrix(n, n);
    for (std::size_t col = 0; col < n; ++col) {
        const std::size_t src = order[col];
        out.eigenvalues[col] = b(src, src);
        double sign = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(q(i, src)) > 1e-12) {
                sign = q(i, src) > 0.0 ? 1.0 : -1.0;
                break;
            }
        }
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, col) = sign * q(i, src);
    }
    return out;
}

Vector solve_linear(const DenseMatrix& a, const Vector& b) {
    if (a.rows() != a.cols()) throw DimensionMismatch("solve_linear: matrix must be square");
    if (a.rows() != b.size()) throw DimensionMismatch("solve_linear: rhs length differs");
    const std::size_t n = a.rows();
    DenseMatrix m = a;
    Vector x = b;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t i = col + 1; i < n; ++i)
            if (std::abs(m(i, col)) > std::abs(m(pivot, col))) pivot = i;
        if (std::abs(m(pivot, col)) < 1e-13)
            throw Singular("solve_linear: pivot below 1e-13 at column " + std::to_string(col));
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(pivot, j), m(col, j));
            std::swap(x[pivot], x[col]);
        }
        const double inv = 1.0 / m(col, col);
        for (std::size_t i = col + 1; i < n; ++i) {
            const double f = m(i, col) * inv;
            if (f == 0.0) continue;
            m(i, col) = 0.0;
            for (std::size_t j = col + 1; j < n; ++j) m(i, j) -= f * m(col, j);
            x[i] -= f * x[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double acc = x[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= m(i, j) * x[j];
        x[i] = acc / m(i, i);
    }
    return x;
}

Vector least_squares(const DenseMatrix& a, const Vector& b) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (m < n) throw DimensionMismatch("least_squares: needs rows >= cols");
    if (b.size() != m) throw DimensionMismatch("least_squares: rhs length differs");

    DenseMatrix r = a;
    Vector y = b;
    // Householder QR, reflectors applied to the rhs on the fly.
    for (std::size_t col = 0; col < n; ++col) {
        double norm = 0.0;
        for (std::size_t i = col; i < m; ++i) norm += r(i, col) * r(i, col);
        norm = std::sqrt(norm);
        if (norm < 1e-13) throw Singular("least_squares: rank-deficient column");
        const double alpha = r(col, col) >= 0.0 ? -norm : norm;
        Vector w(m - col, 0.0);
        w[0] = r(col, col) - alpha;
        for (std::size_t i = col + 1; i < m; ++i) w[i - col] = r(i, col);
        double wnorm2 = 0.0;
        for (double v : w) wnorm2 += v * v;
        if (wnorm2 > 0.0) {
            const double inv = 2.0 / wnorm2;
            for (std::size_t j = col; j < n; ++j) {
                double proj = 0.0;
                for (std::size_t i = col; i < m; ++i) proj += w[i - col] * r(i, j);
                proj *= inv;
                for (std::size_t i = col; i < m; ++i) r(i, j) -= proj * w[i - col];
            }
            double proj = 0.0;
            for (std::size_t i = col; i < m; ++i) proj += w[i - col] * y[i];
            proj *= inv;
            for (std::size_t i = col; i < m; ++i) y[i] -= proj * w[i - col];
        }
        r(col, col) = alpha;
    }
    Vector x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double acc = y[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= r(i, j) * x[j];
        if (std::abs(r(i, i)) < 1e-13) throw Singular("least_squares: zero pivot in R");
        x[i] = acc / r(i, i);
    }
    return x;
}

DenseMatrix cholesky(const DenseMatrix& g) {
    if (g.rows() != g.cols()) throw DimensionMismatch("cholesky: matrix must be square");
    const std::size_t n = g.rows();
    DenseMatrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = g(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
            if (i == j) {
                if (acc <= 0.0) throw RankDeficient("cholesky: non-positive pivot");
                l(i, i) = std::sqrt(acc);
            } else {
                l(i, j) = acc / l(j, j);
            }
        }
    }
    return l;
}

double weighted_norm(const Vector& x, const Vector& phi) {
    if (x.size() != phi.size()) throw DimensionMismatch("weighted_norm: lengths differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (phi[i] <= 0.0) throw DimensionMismatch("weighted_norm: phi must be positive");
        acc += phi[i] * x[i] * x[i];
    }
    return std::sqrt(acc);
}

double weighted_opnorm(const DenseMatrix& a, const Vector& phi) {
    if (a.rows() != a.cols()) throw DimensionMismatch("weighted_opnorm: matrix must be square");
    if (a.rows() != phi.size()) throw DimensionMismatch("weighted_opnorm: phi length differs");
    const std::size_t n = a.rows();
    if (n == 0) return 0.0;
    Vector sqrt_phi(n), inv_sqrt_phi(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (phi[i] <= 0.0) throw DimensionMismatch("weighted_opnorm: phi must be positive");
        sqrt_phi[i] = std::sqrt(phi[i]);
        inv_sqrt_phi[i] = 1.0 / sqrt_phi[i];
    }
    const DenseMatrix b = scale_cols(scale_rows(sqrt_phi, a), inv_sqrt_phi);
    DenseMatrix gram = matmul_at_b(b, b);
    // Kill the last-bit asymmetry from separate dot products.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (gram(i, j) + gram(j, i));
            gram(i, j) = v;
            gram(j, i) = v;
        }
    const EigResult eig = sym_eig(gram, 1e-8 * std::max(1.0, max_abs(gram)));
    const double lambda_max = std::max(0.0, eig.eigenvalues.back());
    return std::sqrt(lambda_max);
}

Vector principal_angles(const DenseMatrix& x, const DenseMatrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw DimensionMismatch("principal_angles: shapes differ");
    const double ex = gram_identity_error(matmul_at_b(x, x));
    const double ey = gram_identity_error(matmul_at_b(y, y));
    if (ex > 1e-8 || ey > 1e-8)
        throw NotOrthonormal("principal_angles: columns are not orthonormal");

    const DenseMatrix m = matmul_at_b(x, y);
    DenseMatrix gram = matmul_at_b(m, m);
    for (std::size_t i = 0; i < gram.rows(); ++i)
        for (std::size_t j = i + 1; j < gram.cols(); ++j) {
            const double v = 0.5 * (gram(i, j) + gram(j, i));
            gram(i, j) = v;
            gram(j, i) = v;
        }
    const EigResult eig = sym_eig(gram, 1e-8);
    Vector angles(gram.rows());
    // Eigenvalues ascend, so cosines ascend and angles descend; flip order.
    for (std::size_t i = 0; i < angles.size(); ++i) {
        const double c = std::clamp(std::sqrt(std::max(0.0, eig.eigenvalues[i])), 0.0, 1.0);
        angles[angles.size() - 1 - i] = std::acos(c);
    }
    return angles;
}

}  // namespace laprep::numlin
