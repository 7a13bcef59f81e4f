// Phi-weighted projections, value-approximation errors and the
// approximation-error bounds (truncation, feature estimation, total).
#pragma once

#include "laprep/chain.hpp"
#include "laprep/dense.hpp"
#include "laprep/gdo.hpp"
#include "laprep/gridworld.hpp"
#include "laprep/spectral.hpp"

namespace laprep::bounds {

// A bound that may be vacuous (+inf) when the spectral gap at the cut
// degenerates; kept as an explicit flag so consumers cannot silently
// compare against it.
struct BoundValue {
    double value = 0.0;
    bool finite = true;

    static BoundValue of(double v) { return {v, true}; }
    static BoundValue infinite() { return {0.0, false}; }

    friend BoundValue operator+(const BoundValue& a, const BoundValue& b) {
        if (!a.finite || !b.finite) return infinite();
        return of(a.value + b.value);
    }
};

struct BoundReport {
    std::size_t k = 0;
    double lambda2 = 0.0;
    double lambda_k = 0.0;
    double lambda_k1 = 0.0;
    double epsilon = 0.0;
    double err_exact_basis = 0.0;   // ||v - v_k||_Phi with exact eigenvectors
    double err_learned_basis = 0.0; // ||v - v_hat_k||_Phi with learned features
    double projector_distance = 0.0;
    double truncation_bound = 0.0;
    BoundValue estimation_bound;
    BoundValue total_bound;
};

// Pi = X (Xᵀ Phi X)^{-1} Xᵀ Phi, the Phi-weighted least-squares projector.
DenseMatrix phi_projector(const DenseMatrix& x, const Vector& phi);

// Pi applied to v without forming the projector.
Vector approx_value(const Vector& v, const DenseMatrix& x, const Vector& phi);

// ||r_bar||_Phi * sqrt(1 / (lambda_2 lambda_{k+1}))
double truncation_bound(const Vector& r_bar, const Vector& phi, double lambda2,
                        double lambda_k1);

// ||v||_Phi * sqrt(2 eps / (lambda_{k+1} - lambda_k)), infinite when the
// gap is below 1e-12.
BoundValue estimation_bound(const Vector& v, const Vector& phi, double epsilon, double lambda_k,
                            double lambda_k1);

// ||Pi_Psi - Pi_Psi_hat||_Phi for Phi-orthonormal bases.
double projector_distance(const DenseMatrix& psi, const DenseMatrix& psi_hat, const Vector& phi);

// Assembles every field and asserts the report invariants; throws
// InvariantViolated with the failing inequality when one breaks.
BoundReport make_report(const grid::ErgodicChain& chain, const spectral::SpectralBundle& bundle,
                        const gdo::Representation& representation,
                        const laprep::chain::ValueSolution& value, std::size_t k);

// <f, g> in the weighted Hilbert space: sum_s f(s) g(s) phi(s).
double tilde_inner(const Vector& f, const Vector& g, const Vector& phi);

// <f, L~ g> evaluated from the kernel D~(s,s') = P(s'|s)/(2 phi(s'))
//   + P(s|s')/(2 phi(s)) via the double sum; equals fᵀ Phi L g.
double tilde_pairing(const Vector& f, const Vector& g, const DenseMatrix& p, const Vector& phi);

}  // namespace laprep::bounds
