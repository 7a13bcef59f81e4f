#include "laprep/chain.hpp"

#include "laprep/numlin.hpp"

#include <cmath>
#include <cstdint>

namespace laprep::chain {

namespace {

void check_stochastic(const DenseMatrix& p) {
    if (p.rows() != p.cols()) throw NotStochastic("transition matrix must be square");
    for (std::size_t i = 0; i < p.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < p.cols(); ++j) {
            if (p(i, j) < -1e-12) throw NotStochastic("negative transition probability");
            sum += p(i, j);
        }
        if (std::abs(sum - 1.0) > 1e-10)
            throw NotStochastic("row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
}

// Boolean |S|x|S| matrix as bitset rows.
struct BoolMatrix {
    std::size_t n = 0;
    std::size_t words = 0;
    std::vector<std::uint64_t> bits;

    explicit BoolMatrix(std::size_t n_) : n(n_), words((n_ + 63) / 64), bits(n_ * words, 0) {}
    void set(std::size_t i, std::size_t j) { bits[i * words + j / 64] |= 1ULL << (j % 64); }
    const std::uint64_t* row(std::size_t i) const { return bits.data() + i * words; }
    std::uint64_t* row(std::size_t i) { return bits.data() + i * words; }

    bool all_ones() const {
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t* r = row(i);
            for (std::size_t w = 0; w + 1 < words; ++w)
                if (r[w] != ~0ULL) return false;
            const std::size_t rem = n - 64 * (words - 1);
            const std::uint64_t mask = rem == 64 ? ~0ULL : ((1ULL << rem) - 1);
            if ((r[words - 1] & mask) != mask) return false;
        }
        return true;
    }
};

BoolMatrix bool_multiply(const BoolMatrix& a, const BoolMatrix& b) {
    BoolMatrix c(a.n);
    for (std::size_t i = 0; i < a.n; ++i) {
        const std::uint64_t* ai = a.row(i);
        std::uint64_t* ci = c.row(i);
        for (std::size_t k = 0; k < a.n; ++k) {
            if (ai[k / 64] & (1ULL << (k % 64))) {
                const std::uint64_t* bk = b.row(k);
                for (std::size_t w = 0; w < a.words; ++w) ci[w] |= bk[w];
            }
        }
    }
    return c;
}

}  // namespace

bool check_ergodic(const DenseMatrix& p, std::size_t max_power) {
    check_stochastic(p);
    const std::size_t n = p.rows();
    if (max_power == 0) max_power = n * n;

    BoolMatrix support(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (p(i, j) > 0.0) support.set(i, j);

    // Entrywise positivity of P^t is monotone in t (every row has an
    // outgoing transition), so P^max_power decides the whole range.
    BoolMatrix acc = support; // support^1
    if (acc.all_ones()) return true;
    std::size_t remaining = max_power - 1;
    BoolMatrix base = support;
    while (remaining > 0) {
        if (remaining & 1) {
            acc = bool_multiply(acc, base);
            if (acc.all_ones()) return true;
        }
        remaining >>= 1;
        if (remaining > 0) {
            base = bool_multiply(base, base);
            if (base.all_ones()) return true;
        }
    }
    return acc.all_ones();
}

Vector stationary_distribution(const DenseMatrix& p, double tol) {
    if (!check_ergodic(p)) throw NotErgodic("stationary_distribution: chain is not ergodic");
    const std::size_t n = p.rows();

    // Stacked system: rows of (Pᵀ - I), then the normalization row.
    DenseMatrix a(n + 1, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = p(j, i) - (i == j ? 1.0 : 0.0);
    for (std::size_t j = 0; j < n; ++j) a(n, j) = 1.0;
    Vector rhs(n + 1, 0.0);
    rhs[n] = 1.0;
    Vector phi = numlin::least_squares(a, rhs);

    auto residual = [&](const Vector& f) {
        const Vector ftp = vecmat(f, p);
        double m = 0.0;
        for (std::size_t j = 0; j < n; ++j) m = std::max(m, std::abs(ftp[j] - f[j]));
        return m;
    };

    double best_res = residual(phi);
    for (std::size_t iter = 0; iter < 1000 && best_res > tol; ++iter) {
        Vector next = vecmat(phi, p);
        double sum = 0.0;
        for (double x : next) sum += x;
        for (double& x : next) x /= sum;
        const double res = residual(next);
        if (res >= best_res) break;
        phi = std::move(next);
        best_res = res;
    }

    double sum = 0.0;
    for (double x : phi) sum += x;
    for (double& x : phi) x /= sum;
    for (double x : phi)
        if (x <= 0.0) throw NotErgodic("stationary_distribution: non-positive entry");
    if (residual(phi) > std::max(tol, 1e-11))
        throw Singular("stationary_distribution: failed to reach tolerance");
    return phi;
}

std::pair<double, Vector> average_reward(const Vector& phi, const Vector& r) {
    if (phi.size() != r.size()) throw DimensionMismatch("average_reward: lengths differ");
    const double rho = dot(phi, r);
    Vector r_bar = r;
    for (double& x : r_bar) x -= rho;
    return {rho, std::move(r_bar)};
}

ValueSolution solve_poisson(const DenseMatrix& p, const Vector& r) {
    if (p.rows() != r.size()) throw DimensionMismatch("solve_poisson: reward length differs");
    if (!check_ergodic(p)) throw NotErgodic("solve_poisson: chain is not ergodic");
    const std::size_t n = p.rows();

    ValueSolution sol;
    sol.phi = stationary_distribution(p);
    auto [rho, r_bar] = average_reward(sol.phi, r);
    sol.rho = rho;
    sol.r_bar = std::move(r_bar);

    DenseMatrix a(n + 1, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = (i == j ? 1.0 : 0.0) - p(i, j);
    for (std::size_t j = 0; j < n; ++j) a(n, j) = sol.phi[j];
    Vector rhs(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = sol.r_bar[i];
    sol.v = numlin::least_squares(a, rhs);

    // Final recentering; the stacked solve already gets this to ~1e-16.
    const double shift = dot(sol.phi, sol.v);
    for (double& x : sol.v) x -= shift;

    const Vector pv = matvec(p, sol.v);
    double poisson_res = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        poisson_res = std::max(poisson_res, std::abs(sol.v[i] - sol.r_bar[i] - pv[i]));
    if (poisson_res > 1e-8)
        throw Singular("solve_poisson: residual " + std::to_string(poisson_res));
    if (std::abs(dot(sol.phi, sol.v)) > 1e-10)
        throw Singular("solve_poisson: normalization violated");
    return sol;
}

}  // namespace laprep::chain
