#include "laprep/numlin.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace laprep;
using namespace testsupport;

namespace {

double reconstruction_residual(const DenseMatrix& a, const numlin::EigResult& eig) {
    const DenseMatrix lhs = matmul(a, eig.eigenvectors);
    const DenseMatrix rhs = matmul(eig.eigenvectors, DenseMatrix::diagonal(eig.eigenvalues));
    return frobenius_norm(lhs - rhs);
}

}  // namespace

TEST_CASE("sym_eig on the identity") {
    const DenseMatrix a = DenseMatrix::identity(3);
    const numlin::EigResult eig = numlin::sym_eig(a, 1e-10);
    for (double lam : eig.eigenvalues) CHECK(lam == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gram_identity_error(matmul_at_b(eig.eigenvectors, eig.eigenvectors)) < 1e-12);
    // Sign convention: first significant entry of each column positive.
    for (std::size_t j = 0; j < 3; ++j) {
        for (std::size_t i = 0; i < 3; ++i) {
            if (std::abs(eig.eigenvectors(i, j)) > 1e-12) {
                CHECK(eig.eigenvectors(i, j) > 0.0);
                break;
            }
        }
    }
}

TEST_CASE("sym_eig on a diagonal matrix permutes the canonical basis") {
    DenseMatrix a(3, 3);
    a(0, 0) = 3.0;
    a(1, 1) = 1.0;
    a(2, 2) = 2.0;
    const numlin::EigResult eig = numlin::sym_eig(a, 1e-10);
    CHECK(eig.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(eig.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(eig.eigenvalues[2] == doctest::Approx(3.0).epsilon(1e-15));
    // Columns are e_1, e_2, e_0.
    CHECK(eig.eigenvectors(1, 0) == doctest::Approx(1.0));
    CHECK(eig.eigenvectors(2, 1) == doctest::Approx(1.0));
    CHECK(eig.eigenvectors(0, 2) == doctest::Approx(1.0));
}

TEST_CASE("sym_eig reconstruction on a random 20x20 symmetric matrix") {
    Rng rng(42);
    const DenseMatrix a = random_symmetric(rng, 20);
    const numlin::EigResult eig = numlin::sym_eig(a, 1e-10);
    CHECK(reconstruction_residual(a, eig) < 1e-9 * frobenius_norm(a));
}

TEST_CASE("sym_eig properties across sizes 2..50") {
    Rng rng(7);
    for (std::size_t n = 2; n <= 50; n += (n < 12 ? 1 : 7)) {
        CAPTURE(n);
        const DenseMatrix a = random_symmetric(rng, n);
        const numlin::EigResult eig = numlin::sym_eig(a, 1e-10);
        CHECK(reconstruction_residual(a, eig) <= 1e-9 * frobenius_norm(a));
        CHECK(gram_identity_error(matmul_at_b(eig.eigenvectors, eig.eigenvectors)) <= 1e-10);
        for (std::size_t i = 1; i < n; ++i) CHECK(eig.eigenvalues[i] >= eig.eigenvalues[i - 1]);
    }
}

TEST_CASE("sym_eig rejects asymmetric input") {
    DenseMatrix a(2, 2);
    a(0, 1) = 1.0;
    a(1, 0) = 0.5;
    CHECK_THROWS_AS(numlin::sym_eig(a, 1e-10), NotSymmetric);
    CHECK_NOTHROW(numlin::sym_eig(a, 1.0)); // generous tolerance symmetrizes
}

TEST_CASE("solve_linear identities") {
    SUBCASE("identity system") {
        const Vector b = {1.0, -2.0, 3.0};
        const Vector x = numlin::solve_linear(DenseMatrix::identity(3), b);
        for (std::size_t i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(b[i]).epsilon(1e-15));
    }
    SUBCASE("diagonal system") {
        DenseMatrix a(2, 2);
        a(0, 0) = 2.0;
        a(1, 1) = 4.0;
        const Vector x = numlin::solve_linear(a, {2.0, 4.0});
        CHECK(x[0] == doctest::Approx(1.0));
        CHECK(x[1] == doctest::Approx(1.0));
    }
    SUBCASE("random well-conditioned 15x15 residual") {
        Rng rng(3);
        DenseMatrix a = random_matrix(rng, 15, 15);
        for (std::size_t i = 0; i < 15; ++i) a(i, i) += 8.0; // diagonally dominant
        const Vector b = random_vector(rng, 15);
        const Vector x = numlin::solve_linear(a, b);
        const Vector res = matvec(a, x) - b;
        double a_inf = 0.0;
        for (std::size_t i = 0; i < 15; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < 15; ++j) row += std::abs(a(i, j));
            a_inf = std::max(a_inf, row);
        }
        CHECK(inf_norm(res) <= 1e-10 * (a_inf * inf_norm(x) + inf_norm(b)));
    }
    SUBCASE("singular matrix is rejected") {
        DenseMatrix a(2, 2);
        a(0, 0) = 1.0;
        a(0, 1) = 2.0;
        a(1, 0) = 2.0;
        a(1, 1) = 4.0;
        CHECK_THROWS_AS(numlin::solve_linear(a, {1.0, 1.0}), Singular);
    }
}

TEST_CASE("least_squares solves consistent stacked systems") {
    Rng rng(11);
    const DenseMatrix a = random_matrix(rng, 12, 7);
    const Vector x_true = random_vector(rng, 7);
    const Vector b = matvec(a, x_true);
    const Vector x = numlin::least_squares(a, b);
    for (std::size_t i = 0; i < 7; ++i) CHECK(x[i] == doctest::Approx(x_true[i]).epsilon(1e-10));
}

TEST_CASE("weighted_norm") {
    CHECK(numlin::weighted_norm({0.0, 0.0}, {0.3, 0.7}) == 0.0);
    CHECK(numlin::weighted_norm({1.0, 1.0}, {0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(numlin::weighted_norm({0.5, -0.5}, {0.5, 0.5}) ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(numlin::weighted_norm({1.0}, {0.5, 0.5}), DimensionMismatch);
}

TEST_CASE("weighted_opnorm") {
    const Vector phi = {0.2, 0.8};
    SUBCASE("identity and zero") {
        CHECK(numlin::weighted_opnorm(DenseMatrix::identity(2), phi) ==
              doctest::Approx(1.0).epsilon(1e-12));
        CHECK(numlin::weighted_opnorm(DenseMatrix(2, 2), phi) == doctest::Approx(0.0));
    }
    SUBCASE("diagonal matrices are unchanged by the similarity") {
        DenseMatrix a(2, 2);
        a(0, 0) = 2.0;
        a(1, 1) = 3.0;
        CHECK(numlin::weighted_opnorm(a, phi) == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(numlin::weighted_opnorm(a, {0.9, 0.1}) == doctest::Approx(3.0).epsilon(1e-12));
    }
    SUBCASE("uniform phi gives the plain spectral norm") {
        Rng rng(5);
        for (int t = 0; t < 10; ++t) {
            const std::size_t n = 2 + rng.below(10);
            const DenseMatrix a = random_matrix(rng, n, n);
            const Vector uniform(n, 1.0 / static_cast<double>(n));
            // Oracle: power iteration on AᵀA.
            Vector v = random_vector(rng, n);
            double sigma = 0.0;
            for (int it = 0; it < 3000; ++it) {
                Vector w = matvec(a, v);
                w = vecmat(w, a);
                const double norm = std::sqrt(dot(w, w));
                if (norm == 0.0) break;
                for (double& z : w) z /= norm;
                sigma = std::sqrt(norm);
                v = w;
            }
            CHECK(numlin::weighted_opnorm(a, uniform) ==
                  doctest::Approx(sigma).epsilon(1e-8));
        }
    }
}

TEST_CASE("principal_angles") {
    Rng rng(13);
    SUBCASE("identical subspaces give zero angles") {
        const DenseMatrix x = random_orthonormal(rng, 8, 3);
        for (double a : numlin::principal_angles(x, x)) CHECK(a == doctest::Approx(0.0).epsilon(1e-7));
    }
    SUBCASE("orthogonal coordinate planes in R^4 give right angles") {
        DenseMatrix x(4, 2), y(4, 2);
        x(0, 0) = 1.0;
        x(1, 1) = 1.0;
        y(2, 0) = 1.0;
        y(3, 1) = 1.0;
        for (double a : numlin::principal_angles(x, y))
            CHECK(a == doctest::Approx(std::acos(0.0)).epsilon(1e-12));
    }
    SUBCASE("Frobenius projector identity") {
        for (int t = 0; t < 20; ++t) {
            const std::size_t n = 10;
            const std::size_t k = 2;
            const DenseMatrix x = random_orthonormal(rng, n, k);
            const DenseMatrix y = random_orthonormal(rng, n, k);
            const Vector angles = numlin::principal_angles(x, y);
            double sum_sin2 = 0.0;
            for (double a : angles) sum_sin2 += std::sin(a) * std::sin(a);
            const DenseMatrix diff = matmul(x, transpose(x)) - matmul(y, transpose(y));
            const double fro2 = std::pow(frobenius_norm(diff), 2);
            CHECK(std::abs(fro2 - 2.0 * sum_sin2) < 1e-9);
        }
    }
    SUBCASE("non-orthonormal input is rejected") {
        const DenseMatrix x = random_matrix(rng, 6, 2);
        const DenseMatrix y = random_orthonormal(rng, 6, 2);
        CHECK_THROWS_AS(numlin::principal_angles(x, y), NotOrthonormal);
    }
}

TEST_CASE("inverse-of-symmetric-part dominates symmetric-part-of-inverse") {
    Rng rng(17);
    for (int t = 0; t < 25; ++t) {
        const std::size_t n = 2 + rng.below(9);
        const DenseMatrix b = random_matrix(rng, n, n);
        DenseMatrix a = matmul_at_b(b, b);
        for (std::size_t i = 0; i < n; ++i) a(i, i) += 0.4;
        const DenseMatrix skew = random_matrix(rng, n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a(i, j) += 0.5 * (skew(i, j) - skew(j, i));

        DenseMatrix inv(n, n);
        for (std::size_t col = 0; col < n; ++col) {
            Vector e(n, 0.0);
            e[col] = 1.0;
            const Vector x = numlin::solve_linear(a, e);
            for (std::size_t i = 0; i < n; ++i) inv(i, col) = x[i];
        }
        DenseMatrix sym_a(n, n), sym_inv(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                sym_a(i, j) = 0.5 * (a(i, j) + a(j, i));
                sym_inv(i, j) = 0.5 * (inv(i, j) + inv(j, i));
            }
        DenseMatrix sym_a_inv(n, n);
        for (std::size_t col = 0; col < n; ++col) {
            Vector e(n, 0.0);
            e[col] = 1.0;
            const Vector x = numlin::solve_linear(sym_a, e);
            for (std::size_t i = 0; i < n; ++i) sym_a_inv(i, col) = x[i];
        }
        const numlin::EigResult eig = numlin::sym_eig(sym_a_inv - sym_inv, 1e-8);
        CHECK(eig.eigenvalues.front() >= -1e-10);
    }
}
