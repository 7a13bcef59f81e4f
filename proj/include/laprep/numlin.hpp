// Dense linear-algebra kernels: symmetric eigendecomposition (cyclic Jacobi),
// linear and least-squares solves, Phi-weighted norms and principal angles.
#pragma once

#include "laprep/dense.hpp"

namespace laprep::numlin {

struct EigResult {
    Vector eigenvalues;       // ascending
    DenseMatrix eigenvectors; // orthonormal columns, sign-normalized
};

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// The input must satisfy max|A - Aᵀ| <= tol; it is symmetrized as
// (A + Aᵀ)/2 before iterating. Eigenvalues come back ascending and each
// eigenvector's first entry with magnitude > 1e-12 is made positive so
// results are reproducible across runs.
EigResult sym_eig(const DenseMatrix& a, double tol);

// Gaussian elimination with partial pivoting. Throws Singular when a pivot
// falls below 1e-13 in magnitude.
Vector solve_linear(const DenseMatrix& a, const Vector& b);

// Least-squares solution of an overdetermined (rows >= cols) full-rank
// system via Householder QR.
Vector least_squares(const DenseMatrix& a, const Vector& b);

// Lower-triangular factor L with G = L·Lᵀ. Throws RankDeficient when a
// pivot is not strictly positive.
DenseMatrix cholesky(const DenseMatrix& g);

// sqrt(sum_i phi_i * x_i^2)
double weighted_norm(const Vector& x, const Vector& phi);

// ||Phi^{1/2} A Phi^{-1/2}||_2, the operator norm in the Phi geometry,
// computed as the largest singular value via sym_eig on the Gram matrix.
double weighted_opnorm(const DenseMatrix& a, const Vector& phi);

// Principal angles between the column spans of two orthonormal matrices,
// ascending in [0, pi/2]; cos(theta_m) are the singular values of XᵀY.
Vector principal_angles(const DenseMatrix& x, const DenseMatrix& y);

}  // namespace laprep::numlin
