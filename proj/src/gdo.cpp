#include "laprep/gdo.hpp"

#include "laprep/chain.hpp"
#include "laprep/numlin.hpp"
#include "laprep/rng.hpp"
#include "laprep/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace laprep::gdo {

namespace {

// Phi L, averaged with its transpose so the stored matrix is exactly
// symmetric (Phi-self-adjointness makes them equal up to rounding).
DenseMatrix sym_phi_l(const DenseMatrix& l, const Vector& phi) {
    if (l.rows() != l.cols()) throw DimensionMismatch("gdo: L must be square");
    if (l.rows() != phi.size()) throw DimensionMismatch("gdo: phi length differs");
    const std::size_t n = l.rows();
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = 0.5 * (phi[i] * l(i, j) + phi[j] * l(j, i));
            m(i, j) = v;
            m(j, i) = v;
        }
    return m;
}

void matmul_into(const DenseMatrix& m, const DenseMatrix& x, DenseMatrix& out) {
    const std::size_t n = m.rows();
    const std::size_t k = x.cols();
    for (std::size_t i = 0; i < n; ++i) {
        double* oi = out.row(i);
        for (std::size_t j = 0; j < k; ++j) oi[j] = 0.0;
        const double* mi = m.row(i);
        for (std::size_t p = 0; p < n; ++p) {
            const double mip = mi[p];
            const double* xp = x.row(p);
            for (std::size_t j = 0; j < k; ++j) oi[j] += mip * xp[j];
        }
    }
}

// G = Xᵀ Phi X by weighted outer-product accumulation; exactly symmetric.
void gram_into(const DenseMatrix& x, const Vector& phi, DenseMatrix& g) {
    const std::size_t n = x.rows();
    const std::size_t k = x.cols();
    for (double& v : g.data()) v = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        const double w = phi[s];
        const double* xs = x.row(s);
        for (std::size_t i = 0; i < k; ++i) {
            const double wxi = w * xs[i];
            double* gi = g.row(i);
            for (std::size_t j = i; j < k; ++j) gi[j] += wxi * xs[j];
        }
    }
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
}

struct LossParts {
    DenseMatrix mx;
    DenseMatrix gram;
    double dirichlet = 0.0; // 2 tr(XᵀMX)
    double penalty = 0.0;   // ||G - I||_F^2
    double total(double beta) const { return dirichlet + beta * penalty; }
};

void eval_parts(const DenseMatrix& m, const Vector& phi, const DenseMatrix& x, LossParts& parts) {
    matmul_into(m, x, parts.mx);
    gram_into(x, phi, parts.gram);
    double dirichlet = 0.0;
    for (std::size_t idx = 0; idx < x.data().size(); ++idx)
        dirichlet += x.data()[idx] * parts.mx.data()[idx];
    parts.dirichlet = 2.0 * dirichlet;
    double pen = 0.0;
    for (std::size_t i = 0; i < parts.gram.rows(); ++i)
        for (std::size_t j = 0; j < parts.gram.cols(); ++j) {
            const double d = parts.gram(i, j) - (i == j ? 1.0 : 0.0);
            pen += d * d;
        }
    parts.penalty = pen;
}

std::size_t sample_cdf(const double* cdf, std::size_t n, Rng& rng) {
    const double u = rng.uniform();
    std::size_t lo = 0;
    std::size_t hi = n - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (cdf[mid] <= u)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace

void GdoConfig::validate(std::size_t n_states) const {
    // The bound machinery needs k < |S|, but the optimizer itself is well
    // defined up to a full basis.
    if (k == 0 || k > n_states) throw DimensionMismatch("gdo: need 1 <= k <= |S|");
    if (beta <= 0.0) throw DimensionMismatch("gdo: beta must be positive");
    if (step_size <= 0.0) throw DimensionMismatch("gdo: step_size must be positive");
    if (mode == Mode::Stochastic && batch == 0)
        throw DimensionMismatch("gdo: stochastic batch must be positive");
}

double gdo_loss(const DenseMatrix& x, const DenseMatrix& l, const Vector& phi, double beta) {
    if (x.rows() != l.rows()) throw DimensionMismatch("gdo_loss: feature rows differ from L");
    const DenseMatrix m = sym_phi_l(l, phi);
    LossParts parts;
    parts.mx = DenseMatrix(x.rows(), x.cols());
    parts.gram = DenseMatrix(x.cols(), x.cols());
    eval_parts(m, phi, x, parts);
    return parts.total(beta);
}

double gdo_loss(const DenseMatrix& x, const grid::ErgodicChain& chain, double beta) {
    const Vector phi = laprep::chain::stationary_distribution(chain.P);
    return gdo_loss(x, spectral::build_laplacian(chain.P, phi), phi, beta);
}

DenseMatrix gdo_gradient(const DenseMatrix& x, const DenseMatrix& l, const Vector& phi,
                         double beta) {
    const DenseMatrix m = sym_phi_l(l, phi);
    DenseMatrix mx(x.rows(), x.cols());
    matmul_into(m, x, mx);
    DenseMatrix g(x.cols(), x.cols());
    gram_into(x, phi, g);
    for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
    const DenseMatrix xd = matmul(x, g);
    DenseMatrix grad(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j)
            grad(i, j) = 4.0 * mx(i, j) + 4.0 * beta * phi[i] * xd(i, j);
    return grad;
}

OptimizeResult optimize_gdo(const grid::ErgodicChain& chain, const DenseMatrix& l,
                            const GdoConfig& config) {
    const std::size_t n = chain.size;
    config.validate(n);
    if (l.rows() != n) throw DimensionMismatch("optimize_gdo: L size differs from chain");
    const std::size_t k = config.k;
    const Vector phi = laprep::chain::stationary_distribution(chain.P);
    const DenseMatrix m = sym_phi_l(l, phi);

    Rng init_rng(derive_seed(config.seed, 0));
    DenseMatrix x(n, k);
    const double init_scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (double& v : x.data()) v = init_rng.normal() * init_scale;

    OptimizeResult out;
    out.trace.reserve(config.iterations + 1);

    LossParts cur;
    cur.mx = DenseMatrix(n, k);
    cur.gram = DenseMatrix(k, k);
    eval_parts(m, phi, x, cur);
    double loss = cur.total(config.beta);
    const double divergence_cap = 1e6 * std::max(std::abs(loss), 1e-12);
    out.trace.emplace_back(0, loss);

    if (config.mode == Mode::FullGradient) {
        DenseMatrix grad(n, k), x_new(n, k);
        LossParts trial;
        trial.mx = DenseMatrix(n, k);
        trial.gram = DenseMatrix(k, k);
        double step = config.step_size;
        bool stalled = false;
        for (std::size_t iter = 1; iter <= config.iterations; ++iter) {
            if (!stalled) {
                // grad = 4 M X + 4 beta Phi X (G - I); M X and G are cached.
                DenseMatrix gmi = cur.gram;
                for (std::size_t i = 0; i < k; ++i) gmi(i, i) -= 1.0;
                const DenseMatrix xd = matmul(x, gmi);
                double gnorm2 = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < k; ++j) {
                        const double g =
                            4.0 * cur.mx(i, j) + 4.0 * config.beta * phi[i] * xd(i, j);
                        grad(i, j) = g;
                        gnorm2 += g * g;
                    }
                if (gnorm2 < 1e-300) {
                    stalled = true;
                } else {
                    double t = std::min(2.0 * step, 1e6);
                    bool accepted = false;
                    while (t >= 1e-18) {
                        for (std::size_t idx = 0; idx < x.data().size(); ++idx)
                            x_new.data()[idx] = x.data()[idx] - t * grad.data()[idx];
                        eval_parts(m, phi, x_new, trial);
                        const double trial_loss = trial.total(config.beta);
                        if (trial_loss <= loss - 1e-4 * t * gnorm2) {
                            std::swap(x, x_new);
                            std::swap(cur, trial);
                            loss = trial_loss;
                            step = t;
                            accepted = true;
                            break;
                        }
                        t *= 0.5;
                    }
                    // No descent step representable: the iterate no longer
                    // moves, so remaining iterations are identity steps.
                    if (!accepted) stalled = true;
                }
            }
            out.trace.emplace_back(iter, loss);
            if (!(loss <= divergence_cap)) throw Diverged("optimize_gdo: loss blew up");
        }
    } else {
        Rng sample_rng(derive_seed(config.seed, 1));
        Vector phi_cdf(n);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += phi[i];
            phi_cdf[i] = acc;
        }
        phi_cdf[n - 1] = 1.0;
        DenseMatrix row_cdf(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            double rowacc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                rowacc += chain.P(i, j);
                row_cdf(i, j) = rowacc;
            }
            row_cdf(i, n - 1) = 1.0;
        }
        DenseMatrix grad(n, k);
        const double inv_batch = 1.0 / static_cast<double>(config.batch);
        const std::size_t trace_stride = 100;
        for (std::size_t iter = 1; iter <= config.iterations; ++iter) {
            for (double& v : grad.data()) v = 0.0;
            for (std::size_t b = 0; b < config.batch; ++b) {
                const std::size_t s = sample_cdf(phi_cdf.data(), n, sample_rng);
                const std::size_t s2 = sample_cdf(row_cdf.row(s), n, sample_rng);
                for (std::size_t j = 0; j < k; ++j) {
                    const double d = x(s, j) - x(s2, j);
                    grad(s, j) += 2.0 * inv_batch * d;
                    grad(s2, j) -= 2.0 * inv_batch * d;
                }
            }
            for (std::size_t b = 0; b < config.batch; ++b) {
                const std::size_t u1 = sample_cdf(phi_cdf.data(), n, sample_rng);
                const std::size_t u2 = sample_cdf(phi_cdf.data(), n, sample_rng);
                double c = 0.0;
                for (std::size_t j = 0; j < k; ++j) c += x(u1, j) * x(u2, j);
                for (std::size_t j = 0; j < k; ++j) {
                    grad(u1, j) += config.beta * inv_batch * (2.0 * c * x(u2, j) - 2.0 * x(u1, j));
                    grad(u2, j) += config.beta * inv_batch * (2.0 * c * x(u1, j) - 2.0 * x(u2, j));
                }
            }
            for (std::size_t idx = 0; idx < x.data().size(); ++idx)
                x.data()[idx] -= config.step_size * grad.data()[idx];
            if (iter % trace_stride == 0 || iter == config.iterations) {
                eval_parts(m, phi, x, cur);
                loss = cur.total(config.beta);
                out.trace.emplace_back(iter, loss);
                if (!(loss <= divergence_cap)) throw Diverged("optimize_gdo: loss blew up");
            }
        }
    }
    out.x = std::move(x);
    return out;
}

DenseMatrix phi_orthonormalize(const DenseMatrix& x, const Vector& phi) {
    if (x.rows() != phi.size()) throw DimensionMismatch("phi_orthonormalize: phi length differs");
    const std::size_t k = x.cols();
    if (k == 0) throw DimensionMismatch("phi_orthonormalize: no columns");

    DenseMatrix g(k, k);
    gram_into(x, phi, g);
    const numlin::EigResult eig = numlin::sym_eig(g, 1e-8 * std::max(1.0, max_abs(g)));
    if (eig.eigenvalues.front() <= 1e-12)
        throw RankDeficient("phi_orthonormalize: smallest Gram eigenvalue " +
                            std::to_string(eig.eigenvalues.front()));

    DenseMatrix result = x;
    for (int pass = 0; pass < 3; ++pass) {
        gram_into(result, phi, g);
        if (gram_identity_error(g) <= 1e-13) break;
        const DenseMatrix chol = numlin::cholesky(g); // G = L Lᵀ, R = Lᵀ
        // result <- result · R^{-1}, i.e. forward-substitute each row.
        for (std::size_t row = 0; row < result.rows(); ++row) {
            double* values = result.row(row);
            for (std::size_t j = 0; j < k; ++j) {
                double acc = values[j];
                for (std::size_t p = 0; p < j; ++p) acc -= chol(j, p) * values[p];
                values[j] = acc / chol(j, j);
            }
        }
    }
    gram_into(result, phi, g);
    if (gram_identity_error(g) > 1e-12)
        throw RankDeficient("phi_orthonormalize: could not reach Gram tolerance");
    return result;
}

double gdo_residual(const DenseMatrix& psi_hat, const DenseMatrix& l, const Vector& phi,
                    const Vector& lambdas) {
    const std::size_t k = psi_hat.cols();
    if (lambdas.size() < k) throw DimensionMismatch("gdo_residual: not enough eigenvalues");
    DenseMatrix g(k, k);
    gram_into(psi_hat, phi, g);
    if (gram_identity_error(g) > 1e-8)
        throw NotOrthonormal("gdo_residual: features are not Phi-orthonormal");

    const DenseMatrix m = sym_phi_l(l, phi);
    DenseMatrix mx(psi_hat.rows(), k);
    matmul_into(m, psi_hat, mx);
    double trace = 0.0;
    for (std::size_t idx = 0; idx < psi_hat.data().size(); ++idx)
        trace += psi_hat.data()[idx] * mx.data()[idx];
    double lambda_sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) lambda_sum += lambdas[i];

    double eps = trace - lambda_sum;
    if (eps < -1e-9)
        throw InvariantViolated("gdo_residual: epsilon = " + std::to_string(eps) +
                                " below the Courant-Fischer floor");
    return std::max(eps, 0.0);
}

Representation learn_representation(const grid::ErgodicChain& chain, const DenseMatrix& l,
                                    const Vector& phi, const Vector& lambdas,
                                    const GdoConfig& config) {
    OptimizeResult opt = optimize_gdo(chain, l, config);
    Representation rep;
    rep.k = config.k;
    rep.psi_hat = phi_orthonormalize(opt.x, phi);
    rep.epsilon = gdo_residual(rep.psi_hat, l, phi, lambdas);
    rep.optimizer_trace = std::move(opt.trace);
    return rep;
}

void write_trace_csv(const std::vector<std::pair<std::size_t, double>>& trace,
                     const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("write_trace_csv: cannot open " + path);
    out << "# format_version 1\n";
    out << "iteration,loss\n";
    char buf[64];
    for (const auto& [iter, loss] : trace) {
        std::snprintf(buf, sizeof(buf), "%zu,%.12g\n", iter, loss);
        out << buf;
    }
    if (!out) throw IoError("write_trace_csv: write failed for " + path);
}

}  // namespace laprep::gdo
