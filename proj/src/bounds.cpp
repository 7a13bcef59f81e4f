#include "laprep/bounds.hpp"

#include "laprep/numlin.hpp"

#include <cmath>
#include <sstream>

namespace laprep::bounds {

namespace {

// G = Xᵀ Phi X with a full-rank check matching the spec threshold.
DenseMatrix checked_gram(const DenseMatrix& x, const Vector& phi, const char* who) {
    if (x.rows() != phi.size())
        throw DimensionMismatch(std::string(who) + ": phi length differs");
    const DenseMatrix g = matmul_at_b(scale_rows(phi, x), x);
    DenseMatrix sym = g;
    for (std::size_t i = 0; i < sym.rows(); ++i)
        for (std::size_t j = i + 1; j < sym.cols(); ++j) {
            const double v = 0.5 * (sym(i, j) + sym(j, i));
            sym(i, j) = v;
            sym(j, i) = v;
        }
    const numlin::EigResult eig = numlin::sym_eig(sym, 1e-8 * std::max(1.0, max_abs(sym)));
    if (eig.eigenvalues.front() <= 1e-12)
        throw RankDeficient(std::string(who) + ": features are rank deficient in the Phi geometry");
    return sym;
}

void check_phi_orthonormal(const DenseMatrix& x, const Vector& phi, const char* who) {
    const DenseMatrix g = matmul_at_b(scale_rows(phi, x), x);
    if (gram_identity_error(g) > 1e-8)
        throw NotOrthonormal(std::string(who) + ": columns are not Phi-orthonormal");
}

}  // namespace

DenseMatrix phi_projector(const DenseMatrix& x, const Vector& phi) {
    const DenseMatrix g = checked_gram(x, phi, "phi_projector");
    const DenseMatrix chol = numlin::cholesky(g);
    // Solve G B = Xᵀ Phi for B, then Pi = X B.
    const DenseMatrix xt_phi = transpose(scale_rows(phi, x));
    DenseMatrix b(xt_phi.rows(), xt_phi.cols());
    const std::size_t k = g.rows();
    for (std::size_t col = 0; col < xt_phi.cols(); ++col) {
        Vector y(k);
        for (std::size_t i = 0; i < k; ++i) {
            double acc = xt_phi(i, col);
            for (std::size_t p = 0; p < i; ++p) acc -= chol(i, p) * y[p];
            y[i] = acc / chol(i, i);
        }
        for (std::size_t i = k; i-- > 0;) {
            double acc = y[i];
            for (std::size_t p = i + 1; p < k; ++p) acc -= chol(p, i) * y[p];
            y[i] = acc / chol(i, i);
        }
        for (std::size_t i = 0; i < k; ++i) b(i, col) = y[i];
    }
    return matmul(x, b);
}

Vector approx_value(const Vector& v, const DenseMatrix& x, const Vector& phi) {
    if (v.size() != x.rows()) throw DimensionMismatch("approx_value: value length differs");
    const DenseMatrix g = checked_gram(x, phi, "approx_value");
    Vector phiv(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) phiv[i] = phi[i] * v[i];
    const Vector rhs = vecmat(phiv, x); // Xᵀ Phi v
    const DenseMatrix chol = numlin::cholesky(g);
    const std::size_t k = g.rows();
    Vector c(k);
    for (std::size_t i = 0; i < k; ++i) {
        double acc = rhs[i];
        for (std::size_t p = 0; p < i; ++p) acc -= chol(i, p) * c[p];
        c[i] = acc / chol(i, i);
    }
    for (std::size_t i = k; i-- > 0;) {
        double acc = c[i];
        for (std::size_t p = i + 1; p < k; ++p) acc -= chol(p, i) * c[p];
        c[i] = acc / chol(i, i);
    }
    return matvec(x, c);
}

double truncation_bound(const Vector& r_bar, const Vector& phi, double lambda2,
                        double lambda_k1) {
    if (lambda2 <= 1e-9)
        throw DegenerateGap("truncation_bound: lambda_2 = " + std::to_string(lambda2));
    if (lambda_k1 <= 0.0)
        throw DegenerateGap("truncation_bound: lambda_{k+1} must be positive");
    return numlin::weighted_norm(r_bar, phi) * std::sqrt(1.0 / (lambda2 * lambda_k1));
}

BoundValue estimation_bound(const Vector& v, const Vector& phi, double epsilon, double lambda_k,
                            double lambda_k1) {
    if (epsilon < 0.0)
        throw NegativeEpsilon("estimation_bound: epsilon = " + std::to_string(epsilon));
    const double gap = lambda_k1 - lambda_k;
    if (gap <= 1e-12) return BoundValue::infinite();
    return BoundValue::of(numlin::weighted_norm(v, phi) * std::sqrt(2.0 * epsilon / gap));
}

double projector_distance(const DenseMatrix& psi, const DenseMatrix& psi_hat, const Vector& phi) {
    if (psi.rows() != psi_hat.rows() || psi.cols() != psi_hat.cols())
        throw DimensionMismatch("projector_distance: shapes differ");
    check_phi_orthonormal(psi, phi, "projector_distance");
    check_phi_orthonormal(psi_hat, phi, "projector_distance");
    // For Phi-orthonormal columns the projector is Psi Psiᵀ Phi.
    const DenseMatrix pi_exact = matmul(psi, transpose(scale_rows(phi, psi)));
    const DenseMatrix pi_hat = matmul(psi_hat, transpose(scale_rows(phi, psi_hat)));
    return numlin::weighted_opnorm(pi_exact - pi_hat, phi);
}

BoundReport make_report(const grid::ErgodicChain& chain, const spectral::SpectralBundle& bundle,
                        const gdo::Representation& representation,
                        const laprep::chain::ValueSolution& value, std::size_t k) {
    const std::size_t n = chain.size;
    if (k == 0 || k >= n) throw DimensionMismatch("make_report: need 1 <= k < |S|");
    if (bundle.lambdas.size() != n || value.v.size() != n)
        throw DimensionMismatch("make_report: inputs come from different chains");
    if (representation.k != k || representation.psi_hat.cols() != k)
        throw DimensionMismatch("make_report: representation has different k");

    BoundReport rep;
    rep.k = k;
    rep.lambda2 = bundle.lambdas[1];
    rep.lambda_k = bundle.lambdas[k - 1];
    rep.lambda_k1 = bundle.lambdas[k];
    rep.epsilon = representation.epsilon;

    DenseMatrix u_k(n, k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) u_k(i, j) = bundle.U(i, j);

    const Vector v_exact = approx_value(value.v, u_k, value.phi);
    const Vector v_learned = approx_value(value.v, representation.psi_hat, value.phi);
    rep.err_exact_basis = numlin::weighted_norm(value.v - v_exact, value.phi);
    rep.err_learned_basis = numlin::weighted_norm(value.v - v_learned, value.phi);
    rep.projector_distance = projector_distance(u_k, representation.psi_hat, value.phi);

    rep.truncation_bound = truncation_bound(value.r_bar, value.phi, rep.lambda2, rep.lambda_k1);
    rep.estimation_bound =
        estimation_bound(value.v, value.phi, rep.epsilon, rep.lambda_k, rep.lambda_k1);
    rep.total_bound = BoundValue::of(rep.truncation_bound) + rep.estimation_bound;

    auto fail = [](const char* name, double lhs, double rhs) {
        std::ostringstream msg;
        msg << "make_report: " << name << " violated: " << lhs << " > " << rhs
            << " (margin " << lhs - rhs << ")";
        throw InvariantViolated(msg.str());
    };
    if (rep.err_exact_basis > rep.truncation_bound + 1e-9)
        fail("truncation bound", rep.err_exact_basis, rep.truncation_bound);
    if (rep.total_bound.finite && rep.err_learned_basis > rep.total_bound.value + 1e-9)
        fail("total bound", rep.err_learned_basis, rep.total_bound.value);
    const double gap = rep.lambda_k1 - rep.lambda_k;
    if (gap > 1e-12) {
        const double dk_bound = std::sqrt(2.0 * rep.epsilon / gap);
        if (rep.projector_distance > dk_bound + 1e-9)
            fail("projector distance bound", rep.projector_distance, dk_bound);
    }
    return rep;
}

double tilde_inner(const Vector& f, const Vector& g, const Vector& phi) {
    if (f.size() != g.size() || f.size() != phi.size())
        throw DimensionMismatch("tilde_inner: lengths differ");
    double acc = 0.0;
    for (std::size_t s = 0; s < f.size(); ++s) acc += f[s] * g[s] * phi[s];
    return acc;
}

double tilde_pairing(const Vector& f, const Vector& g, const DenseMatrix& p, const Vector& phi) {
    const std::size_t n = phi.size();
    if (f.size() != n || g.size() != n || p.rows() != n || p.cols() != n)
        throw DimensionMismatch("tilde_pairing: lengths differ");
    double acc = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        double dg = 0.0; // (D~ g)(s) under the weighted integral
        for (std::size_t s2 = 0; s2 < n; ++s2) {
            const double kernel = p(s, s2) / (2.0 * phi[s2]) + p(s2, s) / (2.0 * phi[s]);
            dg += kernel * g[s2] * phi[s2];
        }
        acc += phi[s] * f[s] * (g[s] - dg);
    }
    return acc;
}

}  // namespace laprep::bounds
