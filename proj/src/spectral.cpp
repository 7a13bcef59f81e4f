#include "laprep/spectral.hpp"

#include "laprep/numlin.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

namespace laprep::spectral {

namespace {

void check_inputs(const DenseMatrix& p, const Vector& phi) {
    if (p.rows() != p.cols()) throw DimensionMismatch("laplacian: P must be square");
    if (p.rows() != phi.size()) throw DimensionMismatch("laplacian: phi length differs");
    for (double x : phi)
        if (x <= 0.0) throw NotStationary("laplacian: phi must be entrywise positive");
    const Vector phit_p = vecmat(phi, p);
    double res = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j)
        res = std::max(res, std::abs(phit_p[j] - phi[j]));
    if (res > 1e-10)
        throw NotStationary("laplacian: ||phiᵀP - phiᵀ||_inf = " + std::to_string(res));
}

}  // namespace

DenseMatrix build_laplacian(const DenseMatrix& p, const Vector& phi) {
    check_inputs(p, phi);
    const std::size_t n = p.rows();
    DenseMatrix l(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double reversed = phi[j] * p(j, i) / phi[i]; // (Phi^{-1} Pᵀ Phi)_ij
            l(i, j) = (i == j ? 1.0 : 0.0) - 0.5 * (p(i, j) + reversed);
        }
    return l;
}

DenseMatrix symmetrize(const DenseMatrix& l, const Vector& phi) {
    if (l.rows() != l.cols()) throw DimensionMismatch("symmetrize: L must be square");
    if (l.rows() != phi.size()) throw DimensionMismatch("symmetrize: phi length differs");
    const std::size_t n = l.rows();
    Vector root(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (phi[i] <= 0.0) throw NotStationary("symmetrize: phi must be entrywise positive");
        root[i] = std::sqrt(phi[i]);
    }
    DenseMatrix cal(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cal(i, j) = root[i] / root[j] * l(i, j);
    const double asym = max_abs_asymmetry(cal);
    if (asym > 1e-10)
        throw AsymmetryTooLarge("symmetrize: asymmetry " + std::to_string(asym) +
                                "; phi is inconsistent with L");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (cal(i, j) + cal(j, i));
            cal(i, j) = v;
            cal(j, i) = v;
        }
    return cal;
}

SpectralBundle spectrum(const DenseMatrix& l, const Vector& phi) {
    const DenseMatrix cal = symmetrize(l, phi);
    const numlin::EigResult eig = numlin::sym_eig(cal, 1e-10);
    if (eig.eigenvalues.front() < -1e-9)
        throw InvariantViolated("spectrum: symmetrized Laplacian is not PSD, lambda_min = " +
                                std::to_string(eig.eigenvalues.front()));

    SpectralBundle bundle;
    bundle.lambdas = eig.eigenvalues;
    bundle.phi = phi;
    bundle.U = eig.eigenvectors;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double inv_root = 1.0 / std::sqrt(phi[i]);
        for (std::size_t j = 0; j < phi.size(); ++j) bundle.U(i, j) *= inv_root;
    }
    return bundle;
}

double spectral_gap(const SpectralBundle& bundle) {
    if (bundle.lambdas.size() < 2)
        throw Degenerate("spectral_gap: chain has fewer than two states");
    const double lambda2 = bundle.lambdas[1];
    if (lambda2 < 1e-9)
        throw Degenerate("spectral_gap: lambda_2 = " + std::to_string(lambda2) +
                         "; graph is disconnected");
    return lambda2;
}

DenseMatrix chung_laplacian(const DenseMatrix& p, const Vector& phi) {
    check_inputs(p, phi);
    const std::size_t n = p.rows();
    Vector root(n);
    for (std::size_t i = 0; i < n; ++i) root[i] = std::sqrt(phi[i]);
    DenseMatrix lc(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double w = 0.5 * (root[i] * p(i, j) / root[j] + root[j] * p(j, i) / root[i]);
            lc(i, j) = (i == j ? 1.0 : 0.0) - w;
        }
    const DenseMatrix via_l = symmetrize(build_laplacian(p, phi), phi);
    const double diff = max_abs(lc - via_l);
    if (diff > 1e-12)
        throw InvariantViolated("chung_laplacian: similarity relation violated by " +
                                std::to_string(diff));
    return lc;
}

double dirichlet_energy(const Vector& x, const DenseMatrix& w) {
    if (w.rows() != w.cols()) throw DimensionMismatch("dirichlet_energy: W must be square");
    if (w.rows() != x.size()) throw DimensionMismatch("dirichlet_energy: x length differs");
    if (max_abs_asymmetry(w) > 1e-12) throw NotSymmetric("dirichlet_energy: W is not symmetric");
    const std::size_t n = w.rows();
    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double d = x[i] - x[j];
            energy += w(i, j) * d * d;
        }
    // Pin the convention: the ordered double sum equals 2 xᵀ(D - W)x.
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 0.0;
        double wx = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            deg += w(i, j);
            wx += w(i, j) * x[j];
        }
        quad += x[i] * (deg * x[i] - wx);
    }
    if (std::abs(energy - 2.0 * quad) > 1e-10 * std::max(1.0, std::abs(energy)))
        throw InvariantViolated("dirichlet_energy: quadratic-form identity violated");
    return energy;
}

double cheeger_constant(const DenseMatrix& w) {
    if (w.rows() != w.cols()) throw DimensionMismatch("cheeger_constant: W must be square");
    const std::size_t n = w.rows();
    if (n > 16) throw TooLarge("cheeger_constant: brute force limited to 16 nodes");
    if (n < 2) throw TooLarge("cheeger_constant: need at least two nodes");
    if (max_abs_asymmetry(w) > 1e-12) throw NotSymmetric("cheeger_constant: W is not symmetric");
    for (double x : w.data())
        if (x < 0.0) throw Error("cheeger_constant: negative weight");

    // Connectivity on the support graph.
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack = {0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v = 0; v < n; ++v)
            if (v != u && w(u, v) > 0.0 && !seen[v]) {
                seen[v] = 1;
                ++reached;
                stack.push_back(v);
            }
    }
    if (reached != n) throw Disconnected("cheeger_constant: graph is disconnected");

    Vector degree(n, 0.0);
    double total_vol = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) degree[i] += w(i, j);
        total_vol += degree[i];
    }

    // Enumerate subsets containing node 0 so each cut is visited once.
    double best = std::numeric_limits<double>::infinity();
    const std::uint32_t subsets = 1u << (n - 1);
    for (std::uint32_t mask = 0; mask + 1 < subsets; ++mask) {
        double vol = degree[0];
        double cut = 0.0;
        for (std::size_t i = 1; i < n; ++i)
            if (mask & (1u << (i - 1))) vol += degree[i];
        for (std::size_t i = 0; i < n; ++i) {
            const bool in_i = i == 0 || (mask & (1u << (i - 1)));
            if (!in_i) continue;
            for (std::size_t j = 0; j < n; ++j) {
                const bool in_j = j == 0 || (mask & (1u << (j - 1)));
                if (!in_j) cut += w(i, j);
            }
        }
        const double denom = std::min(vol, total_vol - vol);
        if (denom <= 0.0) continue;
        best = std::min(best, cut / denom);
    }
    return best;
}

}  // namespace laprep::spectral
