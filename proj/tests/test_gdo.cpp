#include "laprep/gdo.hpp"

#include "laprep/chain.hpp"
#include "laprep/spectral.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace laprep;
using namespace testsupport;

namespace {

grid::ErgodicChain wrap_chain(const DenseMatrix& p, const Vector& r) {
    grid::ErgodicChain c;
    c.size = p.rows();
    c.P = p;
    c.r = r;
    return c;
}

grid::ErgodicChain symmetric_two_state() {
    DenseMatrix p(2, 2, 0.5);
    return wrap_chain(p, {1.0, 0.0});
}

struct Setup {
    grid::ErgodicChain chain;
    Vector phi;
    DenseMatrix l;
    spectral::SpectralBundle bundle;
};

Setup random_setup(Rng& rng, std::size_t n) {
    Setup s;
    const DenseMatrix p = random_ergodic_chain(rng, n);
    s.chain = wrap_chain(p, random_vector(rng, n));
    s.phi = chain::stationary_distribution(p);
    s.l = spectral::build_laplacian(p, s.phi);
    s.bundle = spectral::spectrum(s.l, s.phi);
    return s;
}

DenseMatrix leading_eigenvectors(const spectral::SpectralBundle& bundle, std::size_t k) {
    DenseMatrix u(bundle.U.rows(), k);
    for (std::size_t i = 0; i < u.rows(); ++i)
        for (std::size_t j = 0; j < k; ++j) u(i, j) = bundle.U(i, j);
    return u;
}

}  // namespace

TEST_CASE("gdo_loss closed form") {
    Rng rng(71);
    const Setup s = random_setup(rng, 7);
    SUBCASE("exact eigenvectors give 2 * sum(lambda) with zero penalty") {
        for (std::size_t k : {1, 3, 5}) {
            const DenseMatrix u = leading_eigenvectors(s.bundle, k);
            double lambda_sum = 0.0;
            for (std::size_t i = 0; i < k; ++i) lambda_sum += s.bundle.lambdas[i];
            CHECK(gdo::gdo_loss(u, s.l, s.phi, 5.0) ==
                  doctest::Approx(2.0 * lambda_sum).epsilon(1e-10));
        }
    }
    SUBCASE("zero features cost exactly beta * k") {
        CHECK(gdo::gdo_loss(DenseMatrix(7, 3), s.l, s.phi, 2.5) == doctest::Approx(2.5 * 3.0));
    }
    SUBCASE("the constant feature is a global minimum for k = 1") {
        CHECK(gdo::gdo_loss(DenseMatrix(7, 1, 1.0), s.l, s.phi, 5.0) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("chain overload agrees with the explicit form") {
        const DenseMatrix x = random_matrix(rng, 7, 2);
        CHECK(gdo::gdo_loss(x, s.chain, 1.5) ==
              doctest::Approx(gdo::gdo_loss(x, s.l, s.phi, 1.5)).epsilon(1e-12));
    }
}

TEST_CASE("analytic gradient matches central differences") {
    Rng rng(73);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 3 + rng.below(13);
        const std::size_t k = 1 + rng.below(std::min<std::size_t>(n - 1, 4));
        const Setup s = random_setup(rng, n);
        const double beta = 0.5 + 4.0 * rng.uniform();
        const DenseMatrix x = random_matrix(rng, n, k);
        const DenseMatrix grad = gdo::gdo_gradient(x, s.l, s.phi, beta);
        DenseMatrix fd(n, k);
        DenseMatrix xp = x;
        const double h = 1e-6;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < k; ++j) {
                const double orig = xp(i, j);
                xp(i, j) = orig + h;
                const double up = gdo::gdo_loss(xp, s.l, s.phi, beta);
                xp(i, j) = orig - h;
                const double down = gdo::gdo_loss(xp, s.l, s.phi, beta);
                xp(i, j) = orig;
                fd(i, j) = (up - down) / (2.0 * h);
            }
        CHECK(frobenius_norm(grad - fd) <= 1e-6 * std::max(frobenius_norm(grad), 1e-9));
    }
}

TEST_CASE("optimize_gdo") {
    SUBCASE("k = 1 converges to the zero-energy constant direction") {
        const grid::ErgodicChain c = symmetric_two_state();
        const Vector phi = chain::stationary_distribution(c.P);
        const DenseMatrix l = spectral::build_laplacian(c.P, phi);
        gdo::GdoConfig cfg;
        cfg.k = 1;
        cfg.iterations = 3000;
        cfg.seed = 5;
        const gdo::OptimizeResult res = gdo::optimize_gdo(c, l, cfg);
        CHECK(res.trace.back().second < 1e-8);
    }
    SUBCASE("two-state chain at k = 2 reaches the known optimal value") {
        const grid::ErgodicChain c = symmetric_two_state();
        const Vector phi = chain::stationary_distribution(c.P);
        const DenseMatrix l = spectral::build_laplacian(c.P, phi);
        // lambda = (0, 1). The beta-regularized optimum is
        // sum_i (2 lambda_i - lambda_i^2 / beta): shrinkage vanishes as
        // beta grows, recovering 2 (lambda_1 + lambda_2).
        gdo::GdoConfig cfg;
        cfg.k = 2;
        cfg.iterations = 6000;
        cfg.seed = 3;
        cfg.beta = 5.0;
        const gdo::OptimizeResult at5 = gdo::optimize_gdo(c, l, cfg);
        CHECK(at5.trace.back().second == doctest::Approx(2.0 - 1.0 / 5.0).epsilon(1e-7));
        cfg.beta = 1e4;
        const gdo::OptimizeResult sharp = gdo::optimize_gdo(c, l, cfg);
        CHECK(std::abs(sharp.trace.back().second - 2.0) < 1e-3);
    }
    SUBCASE("loss is non-increasing under FullGradient") {
        Rng rng(79);
        const Setup s = random_setup(rng, 9);
        gdo::GdoConfig cfg;
        cfg.k = 3;
        cfg.iterations = 400;
        cfg.seed = 11;
        const gdo::OptimizeResult res = gdo::optimize_gdo(s.chain, s.l, cfg);
        for (std::size_t i = 1; i < res.trace.size(); ++i)
            CHECK(res.trace[i].second <= res.trace[i - 1].second + 1e-15);
    }
    SUBCASE("identical seeds give bitwise-identical traces") {
        Rng rng(83);
        const Setup s = random_setup(rng, 8);
        gdo::GdoConfig cfg;
        cfg.k = 2;
        cfg.iterations = 200;
        cfg.seed = 21;
        const gdo::OptimizeResult a = gdo::optimize_gdo(s.chain, s.l, cfg);
        const gdo::OptimizeResult b = gdo::optimize_gdo(s.chain, s.l, cfg);
        REQUIRE(a.trace.size() == b.trace.size());
        for (std::size_t i = 0; i < a.trace.size(); ++i) {
            CHECK(a.trace[i].first == b.trace[i].first);
            CHECK(a.trace[i].second == b.trace[i].second); // bitwise
        }
        CHECK(max_abs(a.x - b.x) == 0.0);
        cfg.seed = 22;
        const gdo::OptimizeResult other = gdo::optimize_gdo(s.chain, s.l, cfg);
        CHECK(other.trace.back().second != a.trace.back().second);
    }
    SUBCASE("stochastic mode decreases the loss and stays deterministic") {
        Rng rng(89);
        const Setup s = random_setup(rng, 10);
        gdo::GdoConfig cfg;
        cfg.k = 2;
        cfg.mode = gdo::Mode::Stochastic;
        cfg.batch = 16;
        cfg.step_size = 0.03;
        cfg.iterations = 4000;
        cfg.seed = 31;
        const gdo::OptimizeResult a = gdo::optimize_gdo(s.chain, s.l, cfg);
        const gdo::OptimizeResult b = gdo::optimize_gdo(s.chain, s.l, cfg);
        CHECK(a.trace.back().second < 0.5 * a.trace.front().second);
        CHECK(a.trace.back().second == b.trace.back().second);
    }
    SUBCASE("a wild stochastic step size is flagged as divergence") {
        Rng rng(97);
        const Setup s = random_setup(rng, 6);
        gdo::GdoConfig cfg;
        cfg.k = 2;
        cfg.mode = gdo::Mode::Stochastic;
        cfg.step_size = 1e5;
        cfg.iterations = 500;
        cfg.seed = 1;
        CHECK_THROWS_AS(gdo::optimize_gdo(s.chain, s.l, cfg), Diverged);
    }
    SUBCASE("invalid configs are rejected") {
        Rng rng(101);
        const Setup s = random_setup(rng, 4);
        gdo::GdoConfig cfg;
        cfg.k = 5; // beyond a full basis
        CHECK_THROWS_AS(gdo::optimize_gdo(s.chain, s.l, cfg), DimensionMismatch);
        cfg.k = 2;
        cfg.beta = -1.0;
        CHECK_THROWS_AS(gdo::optimize_gdo(s.chain, s.l, cfg), DimensionMismatch);
    }
}

TEST_CASE("phi_orthonormalize") {
    Rng rng(103);
    const Setup s = random_setup(rng, 9);
    SUBCASE("idempotent on already-orthonormal input") {
        const DenseMatrix u = leading_eigenvectors(s.bundle, 3);
        const DenseMatrix again = gdo::phi_orthonormalize(u, s.phi);
        CHECK(max_abs(again - u) <= 1e-12);
    }
    SUBCASE("column scaling is removed exactly") {
        const DenseMatrix u = leading_eigenvectors(s.bundle, 3);
        const DenseMatrix doubled = 2.0 * u;
        const DenseMatrix back = gdo::phi_orthonormalize(doubled, s.phi);
        CHECK(max_abs(back - u) <= 1e-12);
    }
    SUBCASE("random full-rank features pass the Gram check") {
        for (int t = 0; t < 10; ++t) {
            const DenseMatrix x = random_matrix(rng, 9, 4);
            const DenseMatrix psi = gdo::phi_orthonormalize(x, s.phi);
            const DenseMatrix gram = matmul_at_b(scale_rows(s.phi, psi), psi);
            CHECK(gram_identity_error(gram) < 1e-12);
        }
    }
    SUBCASE("span is preserved") {
        const DenseMatrix x = random_matrix(rng, 9, 3);
        const DenseMatrix psi = gdo::phi_orthonormalize(x, s.phi);
        // Each column of X projects fully onto span(psi).
        const DenseMatrix proj = matmul(psi, matmul_at_b(scale_rows(s.phi, psi), x));
        CHECK(max_abs(proj - x) <= 1e-9 * std::max(1.0, max_abs(x)));
    }
    SUBCASE("rank-deficient input is rejected") {
        DenseMatrix x(9, 2);
        for (std::size_t i = 0; i < 9; ++i) {
            x(i, 0) = static_cast<double>(i);
            x(i, 1) = 2.0 * static_cast<double>(i);
        }
        CHECK_THROWS_AS(gdo::phi_orthonormalize(x, s.phi), RankDeficient);
    }
}

TEST_CASE("gdo_residual") {
    Rng rng(107);
    const Setup s = random_setup(rng, 6);
    SUBCASE("exact leading eigenvectors give zero") {
        const DenseMatrix u = leading_eigenvectors(s.bundle, 2);
        CHECK(gdo::gdo_residual(u, s.l, s.phi, s.bundle.lambdas) ==
              doctest::Approx(0.0).epsilon(1e-10));
    }
    SUBCASE("skipping an eigenvector costs exactly the eigenvalue gap") {
        DenseMatrix psi(6, 2);
        for (std::size_t i = 0; i < 6; ++i) {
            psi(i, 0) = s.bundle.U(i, 0);
            psi(i, 1) = s.bundle.U(i, 2); // u_3 instead of u_2
        }
        const double expected = s.bundle.lambdas[2] - s.bundle.lambdas[1];
        CHECK(gdo::gdo_residual(psi, s.l, s.phi, s.bundle.lambdas) ==
              doctest::Approx(expected).epsilon(1e-10));
    }
    SUBCASE("never negative for Phi-orthonormal features") {
        for (int t = 0; t < 30; ++t) {
            const DenseMatrix x = random_matrix(rng, 6, 1 + rng.below(4));
            const DenseMatrix psi = gdo::phi_orthonormalize(x, s.phi);
            CHECK(gdo::gdo_residual(psi, s.l, s.phi, s.bundle.lambdas) >= 0.0);
        }
    }
    SUBCASE("non-orthonormal input is rejected") {
        const DenseMatrix x = random_matrix(rng, 6, 2);
        CHECK_THROWS_AS(gdo::gdo_residual(x, s.l, s.phi, s.bundle.lambdas), NotOrthonormal);
    }
}

TEST_CASE("learn_representation assembles a valid Representation") {
    Rng rng(109);
    const Setup s = random_setup(rng, 8);
    gdo::GdoConfig cfg;
    cfg.k = 3;
    cfg.iterations = 2500;
    cfg.seed = 17;
    const gdo::Representation rep =
        gdo::learn_representation(s.chain, s.l, s.phi, s.bundle.lambdas, cfg);
    CHECK(rep.k == 3);
    const DenseMatrix gram = matmul_at_b(scale_rows(s.phi, rep.psi_hat), rep.psi_hat);
    CHECK(gram_identity_error(gram) <= 1e-10);
    CHECK(rep.epsilon >= 0.0);
    CHECK(rep.epsilon < 1e-4); // converged on this small chain
    CHECK(rep.optimizer_trace.size() == cfg.iterations + 1);
}

TEST_CASE("closed-form loss matches a Monte-Carlo estimate of the expectation form") {
    Rng rng(113);
    const Setup s = random_setup(rng, 5);
    const std::size_t k = 2;
    const double beta = 1.5;
    const DenseMatrix x = random_matrix(rng, 5, k);
    const double closed = gdo::gdo_loss(x, s.l, s.phi, beta);

    Vector phi_cdf(5);
    double acc = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        acc += s.phi[i];
        phi_cdf[i] = acc;
    }
    phi_cdf[4] = 1.0;
    auto draw = [&](const Vector& cdf) {
        const double u = rng.uniform();
        std::size_t i = 0;
        while (i + 1 < cdf.size() && cdf[i] <= u) ++i;
        return i;
    };
    std::vector<Vector> row_cdf(5, Vector(5, 0.0));
    for (std::size_t i = 0; i < 5; ++i) {
        double rowacc = 0.0;
        for (std::size_t j = 0; j < 5; ++j) {
            rowacc += s.chain.P(i, j);
            row_cdf[i][j] = rowacc;
        }
        row_cdf[i][4] = 1.0;
    }

    const std::size_t samples = 100000;
    double mean = 0.0, m2 = 0.0;
    for (std::size_t t = 0; t < samples; ++t) {
        const std::size_t a = draw(phi_cdf);
        const std::size_t b = draw(row_cdf[a]);
        double dirichlet = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double d = x(a, j) - x(b, j);
            dirichlet += d * d;
        }
        const std::size_t u1 = draw(phi_cdf);
        const std::size_t u2 = draw(phi_cdf);
        double c = 0.0, n1 = 0.0, n2 = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            c += x(u1, j) * x(u2, j);
            n1 += x(u1, j) * x(u1, j);
            n2 += x(u2, j) * x(u2, j);
        }
        const double value = dirichlet + beta * (c * c - n1 - n2 + static_cast<double>(k));
        const double delta = value - mean;
        mean += delta / static_cast<double>(t + 1);
        m2 += delta * (value - mean);
    }
    const double sigma =
        std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
    CHECK(std::abs(mean - closed) <= 3.0 * sigma);
}
