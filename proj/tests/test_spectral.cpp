#include "laprep/spectral.hpp"

#include "laprep/chain.hpp"
#include "laprep/numlin.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace laprep;
using namespace testsupport;

namespace {

DenseMatrix mat2(double a, double b, double c, double d) {
    DenseMatrix m(2, 2);
    m(0, 0) = a;
    m(0, 1) = b;
    m(1, 0) = c;
    m(1, 1) = d;
    return m;
}

const DenseMatrix kRev = mat2(0.9, 0.1, 0.5, 0.5);
const Vector kRevPhi = {5.0 / 6.0, 1.0 / 6.0};

}  // namespace

TEST_CASE("build_laplacian") {
    SUBCASE("symmetric kernel with uniform phi gives I - P") {
        const DenseMatrix p = mat2(0.5, 0.5, 0.5, 0.5);
        const DenseMatrix l = spectral::build_laplacian(p, {0.5, 0.5});
        CHECK(max_abs(l - (DenseMatrix::identity(2) - p)) < 1e-15);
    }
    SUBCASE("two-state reversible chain, entrywise hand computation") {
        const DenseMatrix l = spectral::build_laplacian(kRev, kRevPhi);
        CHECK(l(0, 0) == doctest::Approx(0.1).epsilon(1e-14));
        CHECK(l(0, 1) == doctest::Approx(-0.1).epsilon(1e-14));
        CHECK(l(1, 0) == doctest::Approx(-0.5).epsilon(1e-14));
        CHECK(l(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("rows of the mixed kernel sum to one, so L 1 = 0") {
        Rng rng(41);
        for (int t = 0; t < 10; ++t) {
            const std::size_t n = 2 + rng.below(20);
            const DenseMatrix p = random_ergodic_chain(rng, n);
            const Vector phi = chain::stationary_distribution(p);
            const DenseMatrix l = spectral::build_laplacian(p, phi);
            CHECK(inf_norm(matvec(l, Vector(n, 1.0))) <= 1e-12);
            const DenseMatrix phi_l = scale_rows(phi, l);
            CHECK(frobenius_norm(phi_l - transpose(phi_l)) <= 1e-12);
        }
    }
    SUBCASE("non-stationary phi is rejected") {
        CHECK_THROWS_AS(spectral::build_laplacian(kRev, {0.5, 0.5}), NotStationary);
    }
}

TEST_CASE("symmetrize") {
    SUBCASE("uniform phi and symmetric P leave L unchanged") {
        const DenseMatrix p = mat2(0.5, 0.5, 0.5, 0.5);
        const DenseMatrix l = spectral::build_laplacian(p, {0.5, 0.5});
        CHECK(max_abs(spectral::symmetrize(l, {0.5, 0.5}) - l) < 1e-15);
    }
    SUBCASE("two-state reversible chain keeps the (0, 0.6) spectrum") {
        const DenseMatrix l = spectral::build_laplacian(kRev, kRevPhi);
        const DenseMatrix cal = spectral::symmetrize(l, kRevPhi);
        CHECK(max_abs_asymmetry(cal) == 0.0);
        const numlin::EigResult eig = numlin::sym_eig(cal, 1e-10);
        CHECK(eig.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-13));
        CHECK(eig.eigenvalues[1] == doctest::Approx(0.6).epsilon(1e-13));
    }
    SUBCASE("transported null vector") {
        const DenseMatrix l = spectral::build_laplacian(kRev, kRevPhi);
        const DenseMatrix cal = spectral::symmetrize(l, kRevPhi);
        Vector root_phi(2);
        for (int i = 0; i < 2; ++i) root_phi[i] = std::sqrt(kRevPhi[i]);
        CHECK(inf_norm(matvec(cal, root_phi)) <= 1e-14);
    }
    SUBCASE("inconsistent phi is flagged") {
        const DenseMatrix l = spectral::build_laplacian(kRev, kRevPhi);
        CHECK_THROWS_AS(spectral::symmetrize(l, {0.5, 0.5}), AsymmetryTooLarge);
    }
}

TEST_CASE("spectrum") {
    SUBCASE("symmetric two-state chain") {
        const DenseMatrix p = mat2(0.5, 0.5, 0.5, 0.5);
        const Vector phi = {0.5, 0.5};
        const spectral::SpectralBundle b = spectral::spectrum(spectral::build_laplacian(p, phi), phi);
        CHECK(b.lambdas[0] == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(b.lambdas[1] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(b.U(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(b.U(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
        // u_2 proportional to (1, -1), Phi-normalized.
        CHECK(b.U(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(b.U(1, 1) == doctest::Approx(-1.0).epsilon(1e-12));
    }
    SUBCASE("two-state reversible chain") {
        const spectral::SpectralBundle b =
            spectral::spectrum(spectral::build_laplacian(kRev, kRevPhi), kRevPhi);
        CHECK(b.lambdas[0] == doctest::Approx(0.0).epsilon(1e-13));
        CHECK(b.lambdas[1] == doctest::Approx(0.6).epsilon(1e-13));
        // u_2 proportional to (1, -5), Phi-normalized: (1, -5)/sqrt(5).
        CHECK(b.U(0, 1) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
        CHECK(b.U(1, 1) == doctest::Approx(-5.0 / std::sqrt(5.0)).epsilon(1e-12));
    }
    SUBCASE("Phi-orthonormality, eigen relation and constant first mode") {
        Rng rng(43);
        for (int t = 0; t < 8; ++t) {
            const std::size_t n = 2 + rng.below(24);
            const DenseMatrix p = random_ergodic_chain(rng, n);
            const Vector phi = chain::stationary_distribution(p);
            const DenseMatrix l = spectral::build_laplacian(p, phi);
            const spectral::SpectralBundle b = spectral::spectrum(l, phi);
            CHECK(gram_identity_error(matmul_at_b(scale_rows(phi, b.U), b.U)) <= 1e-10);
            const DenseMatrix lhs = matmul(l, b.U);
            const DenseMatrix rhs = matmul(b.U, DenseMatrix::diagonal(b.lambdas));
            CHECK(max_abs(lhs - rhs) <= 1e-8);
            CHECK(std::abs(b.lambdas.front()) <= 1e-9);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(b.U(i, 0) == doctest::Approx(1.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("spectral_gap") {
    SUBCASE("hand values") {
        const DenseMatrix p = mat2(0.5, 0.5, 0.5, 0.5);
        const Vector phi = {0.5, 0.5};
        CHECK(spectral::spectral_gap(spectral::spectrum(
                  spectral::build_laplacian(p, phi), phi)) == doctest::Approx(1.0));
        CHECK(spectral::spectral_gap(spectral::spectrum(
                  spectral::build_laplacian(kRev, kRevPhi), kRevPhi)) ==
              doctest::Approx(0.6).epsilon(1e-13));
    }
    SUBCASE("block-diagonal chain is flagged Degenerate") {
        Rng rng(47);
        const DenseMatrix p1 = random_ergodic_chain(rng, 3);
        const DenseMatrix p2 = random_ergodic_chain(rng, 4);
        const Vector f1 = chain::stationary_distribution(p1);
        const Vector f2 = chain::stationary_distribution(p2);
        DenseMatrix block(7, 7);
        Vector phi(7);
        for (int i = 0; i < 3; ++i) {
            phi[i] = 0.5 * f1[i];
            for (int j = 0; j < 3; ++j) block(i, j) = p1(i, j);
        }
        for (int i = 0; i < 4; ++i) {
            phi[3 + i] = 0.5 * f2[i];
            for (int j = 0; j < 4; ++j) block(3 + i, 3 + j) = p2(i, j);
        }
        const spectral::SpectralBundle b =
            spectral::spectrum(spectral::build_laplacian(block, phi), phi);
        CHECK_THROWS_AS(spectral::spectral_gap(b), Degenerate);
        // Zero-eigenvalue multiplicity equals the number of components.
        CHECK(std::abs(b.lambdas[1]) <= 1e-9);
        CHECK(b.lambdas[2] > 1e-6);
    }
}

TEST_CASE("chung_laplacian") {
    SUBCASE("uniform phi and symmetric P give I - P") {
        const DenseMatrix p = mat2(0.5, 0.5, 0.5, 0.5);
        const DenseMatrix lc = spectral::chung_laplacian(p, {0.5, 0.5});
        CHECK(max_abs(lc - (DenseMatrix::identity(2) - p)) < 1e-15);
    }
    SUBCASE("agrees with the similarity route and shares the spectrum of L") {
        Rng rng(53);
        for (int t = 0; t < 8; ++t) {
            const std::size_t n = 2 + rng.below(16);
            const DenseMatrix p = random_ergodic_chain(rng, n);
            const Vector phi = chain::stationary_distribution(p);
            const DenseMatrix lc = spectral::chung_laplacian(p, phi);
            const DenseMatrix via =
                spectral::symmetrize(spectral::build_laplacian(p, phi), phi);
            CHECK(max_abs(lc - via) <= 1e-12);
            const spectral::SpectralBundle b =
                spectral::spectrum(spectral::build_laplacian(p, phi), phi);
            const numlin::EigResult direct = numlin::sym_eig(lc, 1e-10);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(direct.eigenvalues[i] == doctest::Approx(b.lambdas[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("dirichlet_energy") {
    SUBCASE("constant signals have zero energy") {
        Rng rng(59);
        const DenseMatrix w = random_connected_graph(rng, 6);
        CHECK(spectral::dirichlet_energy(Vector(6, 3.7), w) == doctest::Approx(0.0));
    }
    SUBCASE("two-node hand computation") {
        DenseMatrix w(2, 2);
        w(0, 1) = 0.5;
        w(1, 0) = 0.5;
        CHECK(spectral::dirichlet_energy({1.0, 0.0}, w) == doctest::Approx(1.0));
    }
    SUBCASE("equals twice the quadratic form on random graphs") {
        Rng rng(61);
        for (int t = 0; t < 10; ++t) {
            const std::size_t n = 3 + rng.below(10);
            const DenseMatrix w = random_connected_graph(rng, n);
            const Vector x = random_vector(rng, n);
            // Independent quadratic-form oracle: x^T (D - W) x.
            double quad = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double deg = 0.0, wx = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    deg += w(i, j);
                    wx += w(i, j) * x[j];
                }
                quad += x[i] * (deg * x[i] - wx);
            }
            CHECK(spectral::dirichlet_energy(x, w) == doctest::Approx(2.0 * quad).epsilon(1e-12));
        }
    }
    SUBCASE("asymmetric weights are rejected") {
        DenseMatrix w(2, 2);
        w(0, 1) = 1.0;
        CHECK_THROWS_AS(spectral::dirichlet_energy({1.0, 0.0}, w), NotSymmetric);
    }
}

TEST_CASE("cheeger_constant") {
    SUBCASE("two nodes joined by a unit edge") {
        DenseMatrix w(2, 2);
        w(0, 1) = 1.0;
        w(1, 0) = 1.0;
        CHECK(spectral::cheeger_constant(w) == doctest::Approx(1.0));
    }
    SUBCASE("complete graph K4: the balanced cut wins") {
        DenseMatrix w(4, 4, 1.0);
        for (int i = 0; i < 4; ++i) w(i, i) = 0.0;
        // cut 1|3: 3 / min(3, 9) = 1; cut 2|2: 4 / min(6, 6) = 2/3.
        CHECK(spectral::cheeger_constant(w) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    }
    SUBCASE("path of four nodes: middle edge is the bottleneck") {
        DenseMatrix w(4, 4);
        for (int i = 0; i < 3; ++i) {
            w(i, i + 1) = 1.0;
            w(i + 1, i) = 1.0;
        }
        CHECK(spectral::cheeger_constant(w) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(spectral::cheeger_constant(DenseMatrix(17, 17)), TooLarge);
        CHECK_THROWS_AS(spectral::cheeger_constant(DenseMatrix(4, 4)), Disconnected);
    }
}

TEST_CASE("Cheeger sandwich for lazy uniform walks") {
    Rng rng(67);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 3 + rng.below(10);
        const DenseMatrix w = random_connected_graph(rng, n);
        const double h = spectral::cheeger_constant(w);
        Vector degree(n, 0.0);
        double vol = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) degree[i] += w(i, j);
            vol += degree[i];
        }
        DenseMatrix lazy(n, n);
        Vector phi(n);
        for (std::size_t i = 0; i < n; ++i) {
            phi[i] = degree[i] / vol;
            lazy(i, i) = 0.5;
            for (std::size_t j = 0; j < n; ++j) lazy(i, j) += 0.5 * w(i, j) / degree[i];
        }
        const spectral::SpectralBundle b =
            spectral::spectrum(spectral::build_laplacian(lazy, phi), phi);
        // The lazy walk halves the normalized-Laplacian spectrum.
        const double lambda2 = 2.0 * spectral::spectral_gap(b);
        CHECK(lambda2 >= h * h / 2.0 - 1e-9);
        CHECK(lambda2 <= 2.0 * h + 1e-9);
    }
}
