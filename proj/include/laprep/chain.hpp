// Markov-chain analysis: ergodicity checking, stationary distribution,
// average reward and the differential value function.
#pragma once

#include "laprep/dense.hpp"

#include <utility>

namespace laprep::chain {

struct ValueSolution {
    double rho = 0.0; // average reward per step
    Vector r_bar;     // centered reward r - rho*1
    Vector v;         // differential value, phiᵀv = 0
    Vector phi;       // stationary distribution
};

// True iff the chain is irreducible and aperiodic, decided on the boolean
// support pattern: some power P^t with t <= max_power (default |S|^2) must
// be entrywise positive. Throws NotStochastic on bad rows.
bool check_ergodic(const DenseMatrix& p, std::size_t max_power = 0);

// Solves (Pᵀ - I)phi = 0 with the normalization row appended, then polishes
// with power iteration until ||phiᵀP - phiᵀ||_inf <= tol.
Vector stationary_distribution(const DenseMatrix& p, double tol = 1e-12);

// rho = phiᵀr and the centered reward.
std::pair<double, Vector> average_reward(const Vector& phi, const Vector& r);

// Solves v = r_bar + P v with phiᵀv = 0 via the stacked system
// [(I - P); phiᵀ] v = [r_bar; 0] in the least-squares sense.
ValueSolution solve_poisson(const DenseMatrix& p, const Vector& r);

}  // namespace laprep::chain
