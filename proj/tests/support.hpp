// Shared randomized-input generators for the test suites. These stay
// independent of the library internals they are used to check.
#pragma once

#include "laprep/dense.hpp"
#include "laprep/rng.hpp"

#include <algorithm>
#include <cmath>

namespace testsupport {

using laprep::DenseMatrix;
using laprep::Rng;
using laprep::Vector;

inline DenseMatrix random_matrix(Rng& rng, std::size_t n, std::size_t m, double scale = 1.0) {
    DenseMatrix a(n, m);
    for (double& v : a.data()) v = rng.normal() * scale;
    return a;
}

inline DenseMatrix random_symmetric(Rng& rng, std::size_t n) {
    DenseMatrix a = random_matrix(rng, n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = v;
            a(j, i) = v;
        }
    return a;
}

// Gram-Schmidt with a re-orthogonalization pass; plenty for test oracles.
inline DenseMatrix random_orthonormal(Rng& rng, std::size_t n, std::size_t k) {
    DenseMatrix x = random_matrix(rng, n, k);
    for (int pass = 0; pass < 2; ++pass)
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
    return x;
}

// Strictly positive rows, normalized: primitive, hence ergodic.
inline DenseMatrix random_ergodic_chain(Rng& rng, std::size_t n) {
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

inline Vector random_vector(Rng& rng, std::size_t n, double scale = 1.0) {
    Vector v(n);
    for (double& x : v) x = rng.normal() * scale;
    return v;
}

// Random connected unit-weight undirected graph (tree plus extra edges).
inline DenseMatrix random_connected_graph(Rng& rng, std::size_t n, double extra_prob = 0.25) {
    DenseMatrix w(n, n);
    for (std::size_t v = 1; v < n; ++v) {
        const std::size_t u = rng.below(v);
        w(u, v) = 1.0;
        w(v, u) = 1.0;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (w(i, j) == 0.0 && rng.uniform() < extra_prob) {
                w(i, j) = 1.0;
                w(j, i) = 1.0;
            }
    return w;
}

}  // namespace testsupport
