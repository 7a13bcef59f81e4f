// Tabular Graph Drawing Objective optimizer.
//
// The objective, in closed form over the whole state space, is
//   loss(X) = 2 tr(Xᵀ Phi L X) + beta * ||Xᵀ Phi X - I||_F^2 ,
// which equals the expectation form
//   E_{s~phi, s'~P(.|s)} [ sum_i (X_i(s) - X_i(s'))^2 ]
//     + beta * sum_ij ( E_{s~phi}[X_i(s) X_j(s)] - delta_ij )^2 .
#pragma once

#include "laprep/dense.hpp"
#include "laprep/gridworld.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace laprep::gdo {

enum class Mode { FullGradient, Stochastic };

struct GdoConfig {
    std::size_t k = 20;
    double beta = 5.0;
    double step_size = 0.05;
    std::size_t iterations = 20000;
    std::uint64_t seed = 0;
    Mode mode = Mode::FullGradient;
    std::size_t batch = 32; // Stochastic mode only

    void validate(std::size_t n_states) const;
};

struct Representation {
    DenseMatrix psi_hat; // |S| x k, Phi-orthonormal columns
    std::size_t k = 0;
    double epsilon = 0.0;
    std::vector<std::pair<std::size_t, double>> optimizer_trace;
};

double gdo_loss(const DenseMatrix& x, const DenseMatrix& l, const Vector& phi, double beta);
double gdo_loss(const DenseMatrix& x, const grid::ErgodicChain& chain, double beta);

DenseMatrix gdo_gradient(const DenseMatrix& x, const DenseMatrix& l, const Vector& phi,
                         double beta);

struct OptimizeResult {
    DenseMatrix x; // raw features, not yet orthonormalized
    std::vector<std::pair<std::size_t, double>> trace;
};

// Runs `iterations` gradient steps from a seeded N(0,1)/sqrt(|S|) init.
// FullGradient uses Armijo backtracking, so the loss is non-increasing;
// Stochastic takes fixed-size steps on sampled (s, s') pairs.
OptimizeResult optimize_gdo(const grid::ErgodicChain& chain, const DenseMatrix& l,
                            const GdoConfig& config);

// Psi_hat = X R^{-1} with R the Cholesky factor of Xᵀ Phi X; spans agree
// and Psi_hatᵀ Phi Psi_hat = I within 1e-12.
DenseMatrix phi_orthonormalize(const DenseMatrix& x, const Vector& phi);

// epsilon = tr(Psi_hatᵀ Phi L Psi_hat) - sum of the k smallest lambdas,
// clamped at 0 when within -1e-9 (Courant-Fischer lower bound).
double gdo_residual(const DenseMatrix& psi_hat, const DenseMatrix& l, const Vector& phi,
                    const Vector& lambdas);

// optimize + orthonormalize + residual in one call.
Representation learn_representation(const grid::ErgodicChain& chain, const DenseMatrix& l,
                                    const Vector& phi, const Vector& lambdas,
                                    const GdoConfig& config);

void write_trace_csv(const std::vector<std::pair<std::size_t, double>>& trace,
                     const std::string& path);

}  // namespace laprep::gdo
