#include "laprep/verify.hpp"

#include "laprep/bounds.hpp"
#include "laprep/chain.hpp"
#include "laprep/gdo.hpp"
#include "laprep/gridworld.hpp"
#include "laprep/numlin.hpp"
#include "laprep/rng.hpp"
#include "laprep/spectral.hpp"
#include "laprep/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>

namespace laprep::bench {

namespace {

// ---- randomized input generators ------------------------------------------

DenseMatrix random_matrix(Rng& rng, std::size_t n, std::size_t m, double scale = 1.0) {
    DenseMatrix a(n, m);
    for (double& v : a.data()) v = rng.normal() * scale;
    return a;
}

DenseMatrix random_symmetric(Rng& rng, std::size_t n) {
    DenseMatrix a = random_matrix(rng, n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = v;
            a(j, i) = v;
        }
    return a;
}

// Orthonormal columns via Gram-Schmidt with one re-orthogonalization pass.
DenseMatrix random_orthonormal(Rng& rng, std::size_t n, std::size_t k) {
    DenseMatrix x = random_matrix(rng, n, k);
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t p = 0; p < j; ++p) {
                double proj = 0.0;
                for (std::size_t i = 0; i < n; ++i) proj += x(i, p) * x(i, j);
                for (std::size_t i = 0; i < n; ++i) x(i, j) -= proj * x(i, p);
            }
            double norm = 0.0;
            for (std::size_t i = 0; i < n; ++i) norm += x(i, j) * x(i, j);
            norm = std::sqrt(norm);
            for (std::size_t i = 0; i < n; ++i) x(i, j) /= norm;
        }
    }
    return x;
}

DenseMatrix random_ergodic_chain(Rng& rng, std::size_t n) {
    DenseMatrix p(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            p(i, j) = 0.05 + rng.uniform();
            sum += p(i, j);
        }
        for (std::size_t j = 0; j < n; ++j) p(i, j) /= sum;
    }
    return p;
}

// Connected unit-weight undirected graph: random tree plus extra edges.
DenseMatrix random_connected_graph(Rng& rng, std::size_t n) {
    DenseMatrix w(n, n);
    for (std::size_t v = 1; v < n; ++v) {
        const std::size_t u = rng.below(v);
        w(u, v) = 1.0;
        w(v, u) = 1.0;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (w(i, j) == 0.0 && rng.uniform() < 0.25) {
                w(i, j) = 1.0;
                w(j, i) = 1.0;
            }
    return w;
}

// Spectral norm of a symmetric matrix.
double sym_spectral_norm(const DenseMatrix& a) {
    const numlin::EigResult eig = numlin::sym_eig(a, 1e-8 * std::max(1.0, max_abs(a)));
    return std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
}

// Wraps a raw kernel as an ErgodicChain for the GDO entry points.
grid::ErgodicChain as_chain(const DenseMatrix& p, const Vector& r) {
    grid::ErgodicChain c;
    c.size = p.rows();
    c.P = p;
    c.r = r;
    return c;
}

// ---- result helpers --------------------------------------------------------

PropertyResult pass_result(std::string name, double margin, const char* what) {
    std::ostringstream detail;
    detail << what << " = " << margin;
    return {std::move(name), true, detail.str()};
}

PropertyResult run_guarded(const std::string& name,
                           const std::function<PropertyResult()>& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        return {name, false, std::string("exception: ") + e.what()};
    }
}

// ---- individual properties -------------------------------------------------

PropertyResult check_sym_eig(bool fast) {
    const std::string name = "numlin: sym_eig reconstruction and orthogonality";
    Rng rng(101);
    double worst_recon = 0.0, worst_orth = 0.0;
    const std::size_t step = fast ? 7 : 1;
    for (std::size_t n = 2; n <= 50; n += step) {
        const DenseMatrix a = random_symmetric(rng, n);
        const numlin::EigResult eig = numlin::sym_eig(a, 1e-10);
        const DenseMatrix recon =
            matmul(a, eig.eigenvectors) -
            matmul(eig.eigenvectors, DenseMatrix::diagonal(eig.eigenvalues));
        worst_recon = std::max(worst_recon, frobenius_norm(recon) / frobenius_norm(a));
        worst_orth = std::max(
            worst_orth, gram_identity_error(matmul_at_b(eig.eigenvectors, eig.eigenvectors)));
        for (std::size_t i = 1; i < n; ++i)
            if (eig.eigenvalues[i] < eig.eigenvalues[i - 1])
                return {name, false, "eigenvalues not ascending"};
    }
    if (worst_recon > 1e-9 || worst_orth > 1e-10)
        return {name, false,
                "recon = " + std::to_string(worst_recon) + ", orth = " + std::to_string(worst_orth)};
    return pass_result(name, std::max(worst_recon, worst_orth), "worst residual");
}

PropertyResult check_sin_theta_identity(bool fast) {
    const std::string name = "numlin: ||Pi_X - Pi_Y||_F^2 = 2 sum sin^2(theta)";
    Rng rng(102);
    const int trials = fast ? 20 : 100;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 4 + rng.below(12);
        const std::size_t k = 1 + rng.below(std::min<std::size_t>(n - 1, 5));
        const DenseMatrix x = random_orthonormal(rng, n, k);
        const DenseMatrix y = random_orthonormal(rng, n, k);
        const Vector angles = numlin::principal_angles(x, y);
        double sum_sin2 = 0.0;
        for (double a : angles) sum_sin2 += std::sin(a) * std::sin(a);
        const DenseMatrix diff = matmul(x, transpose(x)) - matmul(y, transpose(y));
        const double lhs = frobenius_norm(diff);
        worst = std::max(worst, std::abs(lhs * lhs - 2.0 * sum_sin2));
    }
    if (worst > 1e-9) return {name, false, "worst deviation = " + std::to_string(worst)};
    return pass_result(name, worst, "worst deviation");
}

PropertyResult check_sym_inverse_inequality(bool fast) {
    const std::string name = "numlin: [sym(A)]^{-1} - sym(A^{-1}) is PSD";
    Rng rng(103);
    const int trials = fast ? 10 : 50;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 2 + rng.below(10);
        // sym(A) > 0 by construction: SPD plus a skew part.
        const DenseMatrix b = random_matrix(rng, n, n);
        DenseMatrix a = matmul_at_b(b, b);
        for (std::size_t i = 0; i < n; ++i) a(i, i) += 0.5;
        const DenseMatrix skew = random_matrix(rng, n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a(i, j) += 0.5 * (skew(i, j) - skew(j, i));

        // Columns of A^{-1} by repeated solves.
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
        worst = std::min(worst, eig.eigenvalues.front());
    }
    if (worst < -1e-10) return {name, false, "most negative eigenvalue = " + std::to_string(worst)};
    return pass_result(name, worst, "most negative eigenvalue");
}

PropertyResult check_opnorm_uniform(bool) {
    const std::string name = "numlin: weighted_opnorm under uniform phi = spectral norm";
    Rng rng(104);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 2 + rng.below(12);
        const DenseMatrix a = random_matrix(rng, n, n);
        const Vector phi(n, 1.0 / static_cast<double>(n));
        const double weighted = numlin::weighted_opnorm(a, phi);
        DenseMatrix gram = matmul_at_b(a, a);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double v = 0.5 * (gram(i, j) + gram(j, i));
                gram(i, j) = v;
                gram(j, i) = v;
            }
        const numlin::EigResult eig = numlin::sym_eig(gram, 1e-8 * std::max(1.0, max_abs(gram)));
        const double plain = std::sqrt(std::max(0.0, eig.eigenvalues.back()));
        worst = std::max(worst, std::abs(weighted - plain));
    }
    if (worst > 1e-10) return {name, false, "worst deviation = " + std::to_string(worst)};
    return pass_result(name, worst, "worst deviation");
}

PropertyResult check_value_solution_invariants(bool fast) {
    const std::string name = "chain: ValueSolution invariants (Poisson residual, normalization)";
    Rng rng(105);
    const int trials = fast ? 8 : 30;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 2 + rng.below(29);
        const DenseMatrix p = random_ergodic_chain(rng, n);
        Vector r(n);
        for (double& v : r) v = rng.normal();
        const chain::ValueSolution sol = chain::solve_poisson(p, r);
        const Vector pv = matvec(p, sol.v);
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            res = std::max(res, std::abs(sol.v[i] - sol.r_bar[i] - pv[i]));
        worst = std::max(worst, res);
        worst = std::max(worst, std::abs(dot(sol.phi, sol.v)));
        double sum = 0.0;
        for (double x : sol.phi) sum += x;
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    if (worst > 1e-8) return {name, false, "worst residual = " + std::to_string(worst)};
    return pass_result(name, worst, "worst residual");
}

// Independent route: solve (I - P) x = r_bar on V = {x : phi^T x = 0}
// through a Householder basis of the complement of phi.
Vector poisson_on_subspace(const DenseMatrix& p, const Vector& r_bar, const Vector& phi) {
    const std::size_t n = p.rows();
    Vector u = phi;
    double norm = std::sqrt(dot(u, u));
    u[0] += (u[0] >= 0.0 ? norm : -norm);
    const double unorm2 = dot(u, u);
    // Columns 1..n-1 of H = I - 2uu^T/(u^T u) span phi-perp.
    DenseMatrix basis(n, n - 1);
    for (std::size_t col = 1; col < n; ++col)
        for (std::size_t i = 0; i < n; ++i)
            basis(i, col - 1) = (i == col ? 1.0 : 0.0) - 2.0 * u[i] * u[col] / unorm2;
    DenseMatrix i_p(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) i_p(i, j) = (i == j ? 1.0 : 0.0) - p(i, j);
    const DenseMatrix m = matmul(i_p, basis);
    const Vector z = numlin::least_squares(m, r_bar);
    return matvec(basis, z);
}

PropertyResult check_poisson_dual_route(bool fast) {
    const std::string name = "chain: stacked Poisson solve agrees with subspace solve";
    Rng rng(106);
    const int trials = fast ? 5 : 20;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 2 + rng.below(29);
        const DenseMatrix p = random_ergodic_chain(rng, n);
        Vector r(n);
        for (double& v : r) v = rng.normal();
        const chain::ValueSolution sol = chain::solve_poisson(p, r);
        const Vector alt = poisson_on_subspace(p, sol.r_bar, sol.phi);
        worst = std::max(worst, inf_norm(sol.v - alt));
    }
    if (worst > 1e-9) return {name, false, "worst disagreement = " + std::to_string(worst)};
    return pass_result(name, worst, "worst disagreement");
}

PropertyResult check_bijectivity_on_v(bool fast) {
    const std::string name = "chain: I - P restricted to V has trivial null space";
    Rng rng(107);
    const int trials = fast ? 5 : 20;
    double worst_ratio = 1.0;
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 3 + rng.below(20);
        const DenseMatrix p = random_ergodic_chain(rng, n);
        const Vector phi = chain::stationary_distribution(p);
        Vector u = phi;
        const double norm = std::sqrt(dot(u, u));
        u[0] += (u[0] >= 0.0 ? norm : -norm);
        const double unorm2 = dot(u, u);
        DenseMatrix basis(n, n - 1);
        for (std::size_t col = 1; col < n; ++col)
            for (std::size_t i = 0; i < n; ++i)
                basis(i, col - 1) = (i == col ? 1.0 : 0.0) - 2.0 * u[i] * u[col] / unorm2;
        DenseMatrix i_p(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) i_p(i, j) = (i == j ? 1.0 : 0.0) - p(i, j);
        const DenseMatrix m = matmul(i_p, basis);
        DenseMatrix gram = matmul_at_b(m, m);
        for (std::size_t i = 0; i < gram.rows(); ++i)
            for (std::size_t j = i + 1; j < gram.cols(); ++j) {
                const double v = 0.5 * (gram(i, j) + gram(j, i));
                gram(i, j) = v;
                gram(j, i) = v;
            }
        const numlin::EigResult eig = numlin::sym_eig(gram, 1e-8 * std::max(1.0, max_abs(gram)));
        const double sigma_min = std::sqrt(std::max(0.0, eig.eigenvalues.front()));
        const double sigma_max = std::sqrt(std::max(0.0, eig.eigenvalues.back()));
        worst_ratio = std::min(worst_ratio, sigma_min / sigma_max);
    }
    if (worst_ratio <= 1e-10)
        return {name, false, "smallest scaled singular value = " + std::to_string(worst_ratio)};
    return pass_result(name, worst_ratio, "smallest scaled singular value");
}

PropertyResult check_grid_chains(bool fast) {
    const std::string name = "gridworld: row sums, ergodicity and determinism across the sweep range";
    const std::vector<int> walls = fast ? std::vector<int>{1, 25, 50}
                                        : std::vector<int>{0, 1, 5, 10, 20, 30, 40, 50};
    const std::vector<std::uint64_t> seeds = fast ? std::vector<std::uint64_t>{0}
                                                  : std::vector<std::uint64_t>{0, 1, 2, 3, 4};
    double worst = 0.0;
    for (int w : walls)
        for (std::uint64_t seed : seeds) {
            const grid::GridEnv env = grid::carve_walls(grid::build_grid(15, 15),
                                                        static_cast<std::size_t>(w), seed);
            const grid::GridEnv again = grid::carve_walls(grid::build_grid(15, 15),
                                                          static_cast<std::size_t>(w), seed);
            if (!(env.removed_edges == again.removed_edges))
                return {name, false, "carve_walls is not deterministic"};
            if (w >= 1) {
                const grid::GridEnv prev = grid::carve_walls(
                    grid::build_grid(15, 15), static_cast<std::size_t>(w - 1), seed);
                for (const grid::Edge& e : prev.removed_edges)
                    if (!env.is_removed(e)) return {name, false, "removals are not nested in w"};
            }
            const grid::ErgodicChain chain = grid::to_chain(env);
            for (std::size_t i = 0; i < chain.size; ++i) {
                double sum = 0.0;
                for (std::size_t j = 0; j < chain.size; ++j) sum += chain.P(i, j);
                worst = std::max(worst, std::abs(sum - 1.0));
            }
            if (!laprep::chain::check_ergodic(chain.P))
                return {name, false, "sweep cell chain is not ergodic"};
        }
    if (worst > 1e-12) return {name, false, "worst row-sum deviation = " + std::to_string(worst)};
    return pass_result(name, worst, "worst row-sum deviation");
}

PropertyResult check_phi_self_adjoint(bool fast) {
    const std::string name = "spectral: ||Phi L - L^T Phi||_F <= 1e-12";
    Rng rng(108);
    const int trials = fast ? 6 : 25;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 2 + rng.below(24);
        const DenseMatrix p = random_ergodic_chain(rng, n);
        const Vector phi = chain::stationary_distribution(p);
        const DenseMatrix l = spectral::build_laplacian(p, phi);
        const DenseMatrix phi_l = scale_rows(phi, l);
        worst = std::max(worst, frobenius_norm(phi_l - transpose(phi_l)));
    }
    if (worst > 1e-12) return {name, false, "worst asymmetry = " + std::to_string(worst)};
    return pass_result(name, worst, "worst asymmetry");
}

PropertyResult check_psd_and_zero_mode(bool fast) {
    const std::string name = "spectral: symmetrized Laplacian PSD with constant zero mode";
    Rng rng(109);
    const int trials = fast ? 6 : 20;
    double worst_lambda1 = 0.0, worst_const = 0.0;
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 2 + rng.below(24);
        const DenseMatrix p = random_ergodic_chain(rng, n);
        const Vector phi = chain::stationary_distribution(p);
        const spectral::SpectralBundle bundle =
            spectral::spectrum(spectral::build_laplacian(p, phi), phi);
        worst_lambda1 = std::max(worst_lambda1, std::abs(bundle.lambdas.front()));
        for (double lam : bundle.lambdas)
            if (lam < -1e-9) return {name, false, "negative eigenvalue " + std::to_string(lam)};
        for (std::size_t i = 0; i < n; ++i)
            worst_const = std::max(worst_const, std::abs(bundle.U(i, 0) - 1.0));
    }
    // Disconnected input: zero eigenvalue multiplicity equals components.
    const std::size_t n1 = 4, n2 = 5;
    Rng rng2(110);
    const DenseMatrix p1 = random_ergodic_chain(rng2, n1);
    const DenseMatrix p2 = random_ergodic_chain(rng2, n2);
    const Vector f1 = chain::stationary_distribution(p1);
    const Vector f2 = chain::stationary_distribution(p2);
    DenseMatrix block(n1 + n2, n1 + n2);
    Vector phi(n1 + n2);
    for (std::size_t i = 0; i < n1; ++i) {
        phi[i] = 0.5 * f1[i];
        for (std::size_t j = 0; j < n1; ++j) block(i, j) = p1(i, j);
    }
    for (std::size_t i = 0; i < n2; ++i) {
        phi[n1 + i] = 0.5 * f2[i];
        for (std::size_t j = 0; j < n2; ++j) block(n1 + i, n1 + j) = p2(i, j);
    }
    const spectral::SpectralBundle bundle =
        spectral::spectrum(spectral::build_laplacian(block, phi), phi);
    if (std::abs(bundle.lambdas[0]) > 1e-9 || std::abs(bundle.lambdas[1]) > 1e-9 ||
        bundle.lambdas[2] < 1e-6)
        return {name, false, "zero multiplicity does not match two components"};
    bool degenerate_flagged = false;
    try {
        spectral::spectral_gap(bundle);
    } catch (const Degenerate&) {
        degenerate_flagged = true;
    }
    if (!degenerate_flagged) return {name, false, "spectral_gap accepted a disconnected chain"};
    if (worst_lambda1 > 1e-9 || worst_const > 1e-8)
        return {name, false, "lambda1 = " + std::to_string(worst_lambda1) +
                                 ", constant-mode deviation = " + std::to_string(worst_const)};
    return pass_result(name, std::max(worst_lambda1, worst_const), "worst deviation");
}

PropertyResult check_chung_equivalence(bool fast) {
    const std::string name = "spectral: Chung Laplacian == symmetrize(build_laplacian)";
    Rng rng(111);
    const int trials = fast ? 6 : 25;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 2 + rng.below(20);
        const DenseMatrix p = random_ergodic_chain(rng, n);
        const Vector phi = chain::stationary_distribution(p);
        const DenseMatrix lc = spectral::chung_laplacian(p, phi); // asserts internally
        const DenseMatrix via = spectral::symmetrize(spectral::build_laplacian(p, phi), phi);
        worst = std::max(worst, max_abs(lc - via));
    }
    if (worst > 1e-12) return {name, false, "worst deviation = " + std::to_string(worst)};
    return pass_result(name, worst, "worst deviation");
}

PropertyResult check_cheeger_sandwich(bool fast) {
    const std::string name = "spectral: Cheeger sandwich h^2/2 <= lambda_2 <= 2h on lazy walks";
    Rng rng(112);
    const int trials = fast ? 15 : 50;
    double worst_slack = 1e300;
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 3 + rng.below(10); // up to 12 nodes
        const DenseMatrix w = random_connected_graph(rng, n);
        const double h = spectral::cheeger_constant(w);
        // Lazy uniform random walk; reversible, so L = I - P_lazy and the
        // normalized-Laplacian lambda_2 is exactly twice the walk's.
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
        const spectral::SpectralBundle bundle =
            spectral::spectrum(spectral::build_laplacian(lazy, phi), phi);
        const double lambda2_normalized = 2.0 * spectral::spectral_gap(bundle);
        const double lower = h * h / 2.0;
        const double upper = 2.0 * h;
        if (lambda2_normalized < lower - 1e-9 || lambda2_normalized > upper + 1e-9) {
            std::ostringstream msg;
            msg << "violated: h = " << h << ", lambda_2 = " << lambda2_normalized;
            return {name, false, msg.str()};
        }
        worst_slack = std::min({worst_slack, lambda2_normalized - lower,
                                upper - lambda2_normalized});
    }
    return pass_result(name, worst_slack, "smallest slack");
}

PropertyResult check_epsilon_nonnegative(bool fast) {
    const std::string name = "gdo: epsilon >= 0 for random Phi-orthonormal features";
    Rng rng(113);
    const int trials = fast ? 10 : 40;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 3 + rng.below(18);
        const std::size_t k = 1 + rng.below(std::min<std::size_t>(n - 1, 6));
        const DenseMatrix p = random_ergodic_chain(rng, n);
        const Vector phi = chain::stationary_distribution(p);
        const DenseMatrix l = spectral::build_laplacian(p, phi);
        const spectral::SpectralBundle bundle = spectral::spectrum(l, phi);
        DenseMatrix x = random_matrix(rng, n, k);
        const DenseMatrix psi = gdo::phi_orthonormalize(x, phi);
        const double eps = gdo::gdo_residual(psi, l, phi, bundle.lambdas);
        worst = std::min(worst, eps);
        if (eps < 0.0) return {name, false, "epsilon = " + std::to_string(eps)};
    }
    return pass_result(name, worst, "smallest epsilon");
}

PropertyResult check_gdo_gradient(bool fast) {
    const std::string name = "gdo: analytic gradient matches central differences";
    Rng rng(114);
    const int trials = fast ? 5 : 20;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 3 + rng.below(13); // |S| <= 15
        const std::size_t k = 1 + rng.below(std::min<std::size_t>(n - 1, 4));
        const DenseMatrix p = random_ergodic_chain(rng, n);
        const Vector phi = chain::stationary_distribution(p);
        const DenseMatrix l = spectral::build_laplacian(p, phi);
        const double beta = 0.5 + 4.0 * rng.uniform();
        const DenseMatrix x = random_matrix(rng, n, k);
        const DenseMatrix grad = gdo::gdo_gradient(x, l, phi, beta);
        DenseMatrix fd(n, k);
        const double h = 1e-6;
        DenseMatrix xp = x;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < k; ++j) {
                const double orig = xp(i, j);
                xp(i, j) = orig + h;
                const double up = gdo::gdo_loss(xp, l, phi, beta);
                xp(i, j) = orig - h;
                const double down = gdo::gdo_loss(xp, l, phi, beta);
                xp(i, j) = orig;
                fd(i, j) = (up - down) / (2.0 * h);
            }
        const double rel = frobenius_norm(grad - fd) / std::max(frobenius_norm(grad), 1e-12);
        worst = std::max(worst, rel);
    }
    if (worst > 1e-6) return {name, false, "worst relative error = " + std::to_string(worst)};
    return pass_result(name, worst, "worst relative error");
}

PropertyResult check_gdo_recovery(bool fast) {
    const std::string name = "gdo: tighter optimization shrinks epsilon and projector distance";
    const grid::GridEnv env = grid::build_grid(4, 4);
    const grid::ErgodicChain cell = grid::to_chain(env);
    const chain::ValueSolution sol = chain::solve_poisson(cell.P, cell.r);
    const DenseMatrix l = spectral::build_laplacian(cell.P, sol.phi);
    const spectral::SpectralBundle bundle = spectral::spectrum(l, sol.phi);
    const std::size_t k = 3;
    DenseMatrix psi(cell.size, k);
    for (std::size_t i = 0; i < cell.size; ++i)
        for (std::size_t j = 0; j < k; ++j) psi(i, j) = bundle.U(i, j);

    std::vector<std::size_t> budgets = fast ? std::vector<std::size_t>{100, 2000}
                                            : std::vector<std::size_t>{100, 1000, 8000};
    double prev_eps = 1e300;
    double final_dist = 1e300;
    for (std::size_t iters : budgets) {
        gdo::GdoConfig cfg;
        cfg.k = k;
        cfg.beta = 5.0;
        cfg.step_size = 0.05;
        cfg.iterations = iters;
        cfg.seed = 7;
        const gdo::Representation rep =
            gdo::learn_representation(cell, l, sol.phi, bundle.lambdas, cfg);
        const double dist = bounds::projector_distance(psi, rep.psi_hat, sol.phi);
        const double gap = bundle.lambdas[k] - bundle.lambdas[k - 1];
        if (gap > 1e-12 && dist > std::sqrt(2.0 * rep.epsilon / gap) + 1e-9)
            return {name, false, "projector distance exceeded the Lemma bound"};
        if (rep.epsilon > prev_eps + 1e-12)
            return {name, false, "epsilon increased with a larger budget"};
        prev_eps = rep.epsilon;
        final_dist = dist;
    }
    if (prev_eps > 1e-3 || final_dist > 0.1)
        return {name, false, "epsilon = " + std::to_string(prev_eps) +
                                 ", distance = " + std::to_string(final_dist)};
    return pass_result(name, final_dist, "final projector distance");
}

PropertyResult check_gdo_monte_carlo(bool fast) {
    const std::string name = "gdo: closed-form loss matches the Monte-Carlo estimate (3 sigma)";
    Rng rng(115);
    const std::size_t n = 5;
    const DenseMatrix p = random_ergodic_chain(rng, n);
    const Vector phi = chain::stationary_distribution(p);
    const DenseMatrix l = spectral::build_laplacian(p, phi);
    const std::size_t k = 2;
    const double beta = 1.5;
    const DenseMatrix x = random_matrix(rng, n, k);
    const double closed = gdo::gdo_loss(x, l, phi, beta);

    Vector phi_cdf(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += phi[i];
        phi_cdf[i] = acc;
    }
    phi_cdf[n - 1] = 1.0;
    auto sample = [&](const double* cdf, std::size_t len) {
        const double u = rng.uniform();
        std::size_t lo = 0, hi = len - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (cdf[mid] <= u)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    };
    DenseMatrix row_cdf(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        double rowacc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            rowacc += p(i, j);
            row_cdf(i, j) = rowacc;
        }
        row_cdf(i, n - 1) = 1.0;
    }

    const std::size_t samples = fast ? 20000 : 100000;
    double mean = 0.0, m2 = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const std::size_t a = sample(phi_cdf.data(), n);
        const std::size_t b = sample(row_cdf.row(a), n);
        double dirichlet = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double d = x(a, j) - x(b, j);
            dirichlet += d * d;
        }
        const std::size_t u1 = sample(phi_cdf.data(), n);
        const std::size_t u2 = sample(phi_cdf.data(), n);
        double c = 0.0, n1 = 0.0, n2 = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            c += x(u1, j) * x(u2, j);
            n1 += x(u1, j) * x(u1, j);
            n2 += x(u2, j) * x(u2, j);
        }
        // <x_u1 x_u1^T - I, x_u2 x_u2^T - I>
        const double reg = c * c - n1 - n2 + static_cast<double>(k);
        const double value = dirichlet + beta * reg;
        const double delta = value - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (value - mean);
    }
    const double stderr_mean = std::sqrt(m2 / static_cast<double>(samples - 1) /
                                         static_cast<double>(samples));
    const double deviation = std::abs(mean - closed);
    if (deviation > 3.0 * stderr_mean + 1e-9)
        return {name, false,
                "deviation = " + std::to_string(deviation) + " vs 3 sigma = " +
                    std::to_string(3.0 * stderr_mean)};
    return pass_result(name, deviation / std::max(stderr_mean, 1e-300), "deviation in sigmas");
}

PropertyResult check_lemma_truncation(bool fast) {
    const std::string name = "bounds: truncation bound holds for every k";
    Rng rng(116);
    const int trials = fast ? 4 : 15;
    double worst = -1e300;
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 3 + rng.below(18);
        const DenseMatrix p = random_ergodic_chain(rng, n);
        Vector r(n);
        for (double& v : r) v = rng.normal();
        const chain::ValueSolution sol = chain::solve_poisson(p, r);
        const DenseMatrix l = spectral::build_laplacian(p, sol.phi);
        const spectral::SpectralBundle bundle = spectral::spectrum(l, sol.phi);
        const double norm_rbar = numlin::weighted_norm(sol.r_bar, sol.phi);
        for (std::size_t k = 1; k < n; ++k) {
            DenseMatrix uk(n, k);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < k; ++j) uk(i, j) = bundle.U(i, j);
            const Vector vk = bounds::approx_value(sol.v, uk, sol.phi);
            const double err2 = std::pow(numlin::weighted_norm(sol.v - vk, sol.phi), 2);
            const double bound2 =
                norm_rbar * norm_rbar / (bundle.lambdas[1] * bundle.lambdas[k]);
            worst = std::max(worst, err2 - bound2);
            if (err2 > bound2 + 1e-9)
                return {name, false, "violated at k = " + std::to_string(k)};
        }
    }
    return pass_result(name, worst, "worst err^2 - bound^2");
}

PropertyResult check_theorem_total(bool fast) {
    const std::string name = "bounds: total bound dominates the learned-basis error";
    Rng rng(117);
    const int trials = fast ? 3 : 10;
    double worst = -1e300;
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 6 + rng.below(10);
        const DenseMatrix p = random_ergodic_chain(rng, n);
        Vector r(n);
        for (double& v : r) v = rng.normal();
        const chain::ValueSolution sol = chain::solve_poisson(p, r);
        const DenseMatrix l = spectral::build_laplacian(p, sol.phi);
        const spectral::SpectralBundle bundle = spectral::spectrum(l, sol.phi);
        const std::size_t k = 1 + rng.below(4);
        gdo::GdoConfig cfg;
        cfg.k = k;
        cfg.iterations = 600;
        cfg.seed = rng.next_u64();
        const grid::ErgodicChain wrapped = as_chain(p, r);
        const gdo::Representation rep =
            gdo::learn_representation(wrapped, l, sol.phi, bundle.lambdas, cfg);
        const bounds::BoundReport report = bounds::make_report(wrapped, bundle, rep, sol, k);
        if (report.total_bound.finite)
            worst = std::max(worst, report.err_learned_basis - report.total_bound.value);
    }
    return pass_result(name, worst, "worst err - bound");
}

PropertyResult check_graph_drawing_lemma(bool fast) {
    const std::string name = "bounds: Graph Drawing Lemma on synthetic PSD matrices";
    Rng rng(118);
    const int trials = fast ? 40 : 200;
    double worst = -1e300;
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 6 + rng.below(25); // |S| <= 30
        const std::size_t k = 1 + rng.below(5);
        const DenseMatrix q = random_orthonormal(rng, n, n);
        Vector lambdas(n);
        lambdas[0] = 0.0;
        for (std::size_t i = 1; i < n; ++i) lambdas[i] = 0.05 + 5.0 * rng.uniform();
        std::sort(lambdas.begin(), lambdas.end());
        DenseMatrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                double acc = 0.0;
                for (std::size_t m = 0; m < n; ++m) acc += q(i, m) * lambdas[m] * q(j, m);
                a(i, j) = acc;
                a(j, i) = acc;
            }
        DenseMatrix psi(n, k), noisy(n, k);
        const double delta = 0.3 * rng.uniform();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < k; ++j) {
                psi(i, j) = q(i, j);
                noisy(i, j) = q(i, j) + delta * rng.normal();
            }
        // Euclidean re-orthonormalization of the perturbed basis.
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t j = 0; j < k; ++j) {
                for (std::size_t pcol = 0; pcol < j; ++pcol) {
                    double proj = 0.0;
                    for (std::size_t i = 0; i < n; ++i) proj += noisy(i, pcol) * noisy(i, j);
                    for (std::size_t i = 0; i < n; ++i) noisy(i, j) -= proj * noisy(i, pcol);
                }
                double norm = 0.0;
                for (std::size_t i = 0; i < n; ++i) norm += noisy(i, j) * noisy(i, j);
                norm = std::sqrt(norm);
                for (std::size_t i = 0; i < n; ++i) noisy(i, j) /= norm;
            }
        double eps = 0.0;
        {
            const DenseMatrix an = matmul(a, noisy);
            double trace = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < k; ++j) trace += noisy(i, j) * an(i, j);
            double lambda_sum = 0.0;
            for (std::size_t j = 0; j < k; ++j) lambda_sum += lambdas[j];
            eps = std::max(0.0, trace - lambda_sum);
        }
        const double gap = lambdas[k] - lambdas[k - 1];
        if (gap <= 1e-9) continue;
        const DenseMatrix diff =
            matmul(psi, transpose(psi)) - matmul(noisy, transpose(noisy));
        const double dist = sym_spectral_norm(diff);
        const double bound = std::sqrt(2.0 * eps / gap);
        worst = std::max(worst, dist - bound);
        if (dist > bound + 1e-9)
            return {name, false, "violated: distance " + std::to_string(dist) + " vs bound " +
                                     std::to_string(bound)};
    }
    return pass_result(name, worst, "worst distance - bound");
}

PropertyResult check_quadratic_bound(bool fast) {
    const std::string name = "bounds: quadratic truncation bound on random PSD matrices";
    Rng rng(119);
    const int trials = fast ? 20 : 100;
    double worst = -1e300;
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 3 + rng.below(15);
        const std::size_t k = 1 + rng.below(n - 1);
        const DenseMatrix q = random_orthonormal(rng, n, n);
        Vector lambdas(n);
        for (std::size_t i = 0; i < n; ++i) lambdas[i] = 5.0 * rng.uniform();
        std::sort(lambdas.begin(), lambdas.end());
        if (lambdas[k] < 1e-9) continue;
        Vector v(n);
        for (double& x : v) x = rng.normal();
        // Coordinates in the eigenbasis.
        Vector coeff(n, 0.0);
        for (std::size_t m = 0; m < n; ++m)
            for (std::size_t i = 0; i < n; ++i) coeff[m] += q(i, m) * v[i];
        double err2 = 0.0, quad_v = 0.0, quad_vk = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            quad_v += lambdas[m] * coeff[m] * coeff[m];
            if (m >= k)
                err2 += coeff[m] * coeff[m];
            else
                quad_vk += lambdas[m] * coeff[m] * coeff[m];
        }
        const double bound = (quad_v - quad_vk) / lambdas[k];
        worst = std::max(worst, err2 - bound);
        if (err2 > bound + 1e-9)
            return {name, false, "violated by " + std::to_string(err2 - bound)};
    }
    return pass_result(name, worst, "worst err^2 - bound");
}

PropertyResult check_phi_spd(bool fast) {
    const std::string name = "bounds: x^T Phi L x > 0 on the centered subspace";
    Rng rng(120);
    const int trials = fast ? 4 : 10;
    double worst = 1e300;
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 3 + rng.below(15);
        const DenseMatrix p = random_ergodic_chain(rng, n);
        const Vector phi = chain::stationary_distribution(p);
        const DenseMatrix l = spectral::build_laplacian(p, phi);
        for (int rep = 0; rep < 100; ++rep) {
            Vector x(n);
            for (double& v : x) v = rng.normal();
            const double shift = dot(phi, x) / dot(phi, phi);
            for (std::size_t i = 0; i < n; ++i) x[i] -= shift * phi[i];
            const double norm2 = dot(x, x);
            if (norm2 < 1e-12) continue;
            Vector phix(n);
            const Vector lx = matvec(l, x);
            for (std::size_t i = 0; i < n; ++i) phix[i] = phi[i] * lx[i];
            const double quad = dot(x, phix) / norm2;
            worst = std::min(worst, quad);
            if (quad <= 0.0) return {name, false, "non-positive quadratic form"};
        }
    }
    return pass_result(name, worst, "smallest normalized quadratic form");
}

PropertyResult check_prop41(bool fast) {
    const std::string name = "bounds: kernel pairing equals matrix pairing (weighted space)";
    Rng rng(121);
    const int chains = fast ? 5 : 20;
    const int pairs = fast ? 20 : 100;
    double worst_pairing = 0.0, worst_inner = 0.0;
    for (int t = 0; t < chains; ++t) {
        const std::size_t n = 3 + rng.below(20);
        const DenseMatrix p = random_ergodic_chain(rng, n);
        const Vector phi = chain::stationary_distribution(p);
        const DenseMatrix l = spectral::build_laplacian(p, phi);
        for (int s = 0; s < pairs; ++s) {
            Vector f(n), g(n);
            for (double& v : f) v = rng.normal();
            for (double& v : g) v = rng.normal();
            const double kernel = bounds::tilde_pairing(f, g, p, phi);
            Vector phi_lg(n);
            const Vector lg = matvec(l, g);
            for (std::size_t i = 0; i < n; ++i) phi_lg[i] = phi[i] * lg[i];
            worst_pairing = std::max(worst_pairing, std::abs(kernel - dot(f, phi_lg)));
            Vector phig(n);
            for (std::size_t i = 0; i < n; ++i) phig[i] = phi[i] * g[i];
            worst_inner =
                std::max(worst_inner, std::abs(bounds::tilde_inner(f, g, phi) - dot(f, phig)));
        }
    }
    if (worst_pairing > 1e-10 || worst_inner > 1e-12)
        return {name, false, "pairing deviation = " + std::to_string(worst_pairing) +
                                 ", inner deviation = " + std::to_string(worst_inner)};
    return pass_result(name, std::max(worst_pairing, worst_inner), "worst deviation");
}

PropertyResult check_sweep_determinism(bool) {
    const std::string name = "bench: sweep determinism (serial == parallel == repeat)";
    SweepConfig config;
    config.n = 4;
    config.m = 4;
    config.walls = {0, 1, 3};
    config.seeds = {0, 1};
    config.k_values = {2};
    config.gdo.iterations = 200;
    config.gdo.step_size = 0.05;
    config.gdo.beta = 5.0;

    const SweepResult a = run_wall_sweep(config, 1);
    const SweepResult b = run_wall_sweep(config, 1);
    const SweepResult c = run_wall_sweep(config, 3);
    auto same = [](const SweepResult& lhs, const SweepResult& rhs) {
        if (lhs.records.size() != rhs.records.size()) return false;
        for (std::size_t i = 0; i < lhs.records.size(); ++i) {
            const SweepRecord& x = lhs.records[i];
            const SweepRecord& y = rhs.records[i];
            // Everything except the wall-clock column must match bitwise.
            if (x.w != y.w || x.seed != y.seed || x.k != y.k || x.lambda2 != y.lambda2 ||
                x.lambda_k != y.lambda_k || x.lambda_k1 != y.lambda_k1 ||
                x.epsilon != y.epsilon || x.err_exact != y.err_exact || x.err_gdo != y.err_gdo ||
                x.trunc_bound != y.trunc_bound || x.est_bound.finite != y.est_bound.finite ||
                x.est_bound.value != y.est_bound.value)
                return false;
        }
        return true;
    };
    if (!same(a, b)) return {name, false, "repeat run differs"};
    if (!same(a, c)) return {name, false, "parallel run differs"};
    if (!a.errors.empty()) return {name, false, "unexpected cell errors"};
    return pass_result(name, 0.0, "bitwise-identical records");
}

PropertyResult check_csv_roundtrip(bool) {
    const std::string name = "bench: CSV round-trip reproduces 12 significant digits";
    SweepConfig config;
    config.n = 4;
    config.m = 4;
    config.walls = {0, 2};
    config.seeds = {0};
    config.k_values = {2, 3};
    config.gdo.iterations = 150;
    const SweepResult result = run_wall_sweep(config, 1);
    const std::string path =
        (std::filesystem::temp_directory_path() / "laprep_verify_roundtrip.csv").string();
    write_csv(result, path, config);
    const SweepResult back = read_csv(path);
    std::filesystem::remove(path);
    if (back.records.size() != result.records.size()) return {name, false, "record count differs"};
    double worst = 0.0;
    auto close12 = [&](double x, double y) {
        const double err = std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-30});
        worst = std::max(worst, err);
        return err <= 5e-12;
    };
    for (std::size_t i = 0; i < back.records.size(); ++i) {
        const SweepRecord& x = result.records[i];
        const SweepRecord& y = back.records[i];
        if (!close12(x.lambda2, y.lambda2) || !close12(x.err_exact, y.err_exact) ||
            !close12(x.err_gdo, y.err_gdo) || !close12(x.epsilon, y.epsilon) ||
            !close12(x.trunc_bound, y.trunc_bound))
            return {name, false, "value drift beyond 12 digits"};
    }
    return pass_result(name, worst, "worst relative drift");
}

}  // namespace

std::vector<PropertyResult> run_property_suite(bool fast) {
    std::vector<PropertyResult> results;
    const std::vector<std::pair<std::string, std::function<PropertyResult()>>> checks = {
        {"numlin: sym_eig", [&] { return check_sym_eig(fast); }},
        {"numlin: sin-theta", [&] { return check_sin_theta_identity(fast); }},
        {"numlin: sym-inverse", [&] { return check_sym_inverse_inequality(fast); }},
        {"numlin: opnorm", [&] { return check_opnorm_uniform(fast); }},
        {"chain: value invariants", [&] { return check_value_solution_invariants(fast); }},
        {"chain: dual route", [&] { return check_poisson_dual_route(fast); }},
        {"chain: bijectivity", [&] { return check_bijectivity_on_v(fast); }},
        {"gridworld: sweep chains", [&] { return check_grid_chains(fast); }},
        {"spectral: self-adjoint", [&] { return check_phi_self_adjoint(fast); }},
        {"spectral: psd/zero-mode", [&] { return check_psd_and_zero_mode(fast); }},
        {"spectral: chung", [&] { return check_chung_equivalence(fast); }},
        {"spectral: cheeger", [&] { return check_cheeger_sandwich(fast); }},
        {"gdo: epsilon >= 0", [&] { return check_epsilon_nonnegative(fast); }},
        {"gdo: gradient", [&] { return check_gdo_gradient(fast); }},
        {"gdo: recovery", [&] { return check_gdo_recovery(fast); }},
        {"gdo: monte-carlo", [&] { return check_gdo_monte_carlo(fast); }},
        {"bounds: truncation", [&] { return check_lemma_truncation(fast); }},
        {"bounds: total bound", [&] { return check_theorem_total(fast); }},
        {"bounds: graph drawing", [&] { return check_graph_drawing_lemma(fast); }},
        {"bounds: quadratic", [&] { return check_quadratic_bound(fast); }},
        {"bounds: phi-spd", [&] { return check_phi_spd(fast); }},
        {"bounds: prop-4.1", [&] { return check_prop41(fast); }},
        {"bench: determinism", [&] { return check_sweep_determinism(fast); }},
        {"bench: csv roundtrip", [&] { return check_csv_roundtrip(fast); }},
    };
    results.reserve(checks.size());
    for (const auto& [name, body] : checks) results.push_back(run_guarded(name, body));
    return results;
}

int verify(bool fast) {
    const std::vector<PropertyResult> results = run_property_suite(fast);
    int failures = 0;
    for (const PropertyResult& r : results) {
        std::printf("[%s] %s (%s)\n", r.pass ? " ok " : "FAIL", r.name.c_str(), r.detail.c_str());
        if (!r.pass) ++failures;
    }
    std::printf("%zu properties, %d failed\n", results.size(), failures);
    return failures;
}

}  // namespace laprep::bench
