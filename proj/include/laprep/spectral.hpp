// Laplacians of ergodic chains with general (non-symmetric) kernels.
//
// The central object is L = I - (P + Phi^{-1} Pᵀ Phi) / 2, which is
// Phi-self-adjoint for any row-stochastic P with stationary distribution
// phi. All spectra are computed through the symmetric similar matrix
// Phi^{1/2} L Phi^{-1/2}, which is PSD, so eigenvalues are real and the
// back-transformed eigenvectors are Phi-orthonormal by construction.
#pragma once

#include "laprep/dense.hpp"

namespace laprep::spectral {

struct SpectralBundle {
    Vector lambdas;  // ascending, lambda_1 ~ 0
    DenseMatrix U;   // columns Phi-orthonormal, u_1 = constant one vector
    Vector phi;
};

DenseMatrix build_laplacian(const DenseMatrix& p, const Vector& phi);

// Phi^{1/2} L Phi^{-1/2}, checked to be symmetric within 1e-10 and then
// exactly symmetrized.
DenseMatrix symmetrize(const DenseMatrix& l, const Vector& phi);

SpectralBundle spectrum(const DenseMatrix& l, const Vector& phi);

// lambda_2; throws Degenerate when it vanishes (disconnected graph).
double spectral_gap(const SpectralBundle& bundle);

// The directed-graph Laplacian I - (Phi^{1/2} P Phi^{-1/2} +
// Phi^{-1/2} Pᵀ Phi^{1/2}) / 2; asserted to coincide with
// symmetrize(build_laplacian(P, phi), phi) within 1e-12.
DenseMatrix chung_laplacian(const DenseMatrix& p, const Vector& phi);

// sum_ij W_ij (x_i - x_j)^2 over ordered pairs; asserted equal to
// 2 xᵀ(D - W)x, which pins the factor-2 convention.
double dirichlet_energy(const Vector& x, const DenseMatrix& w);

// Brute-force conductance: min over nonempty proper subsets of
// cut(S') / min(vol(S'), vol(complement)), vol = weighted degree sums.
// Exhaustive over 2^(|S|-1) cuts, so |S| <= 16.
double cheeger_constant(const DenseMatrix& w);

}  // namespace laprep::spectral
