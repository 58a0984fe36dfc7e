// matcore.hpp: dense complex linear algebra for small Hilbert spaces:
// Kronecker products, column-stacking (un)vectorization, Hermitian
// eigendecomposition, regularized inverse square roots, partial traces.
//
// All operations are pure functions of their inputs; returned values are
// plain immutable matrices, safe to share across threads.

#pragma once

#include <Eigen/Dense>
#include <complex>

#include "dmrnn/errors.hpp"

namespace dmrnn {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Hard cap on matrix dimensions. Hilbert dimensions stop at 64, so the
// largest object is a 4096 x 4096 Choi matrix; anything bigger signals a
// misconfiguration upstream.
inline constexpr int kMaxDim = 64 * 64;

// Result of a Hermitian eigendecomposition H = U diag(w) U^dag.
//
// Eigenvalues are sorted descending; `unitary` holds the matching
// orthonormal eigenvectors as columns. Eigenvectors inside a degenerate
// eigenvalue cluster are solver-determined; only the spanned subspace is
// contractual.
struct HermEig {
  RVector eigenvalues;  // descending
  CMatrix unitary;      // column i pairs with eigenvalues[i]
};

// ‖m − m†‖_F / max(1, ‖m‖_F)
double hermitian_defect(const CMatrix& m);

bool all_finite(const CMatrix& m);

// Kronecker product: out[(i*br+k),(j*bc+l)] = a(i,j) * b(k,l).
// The left operand is the slow (coarse-block) factor everywhere in this
// library; subsystem A of a bipartite state is always the left factor.
CMatrix kron(const CMatrix& a, const CMatrix& b);

// Column-stacking vectorization of a square matrix: column j of m occupies
// entries j*d ... j*d+d-1. With this convention
// vec(A X B†) = (conj(B) ⊗ A) vec(X), which is what ties the Kraus and
// Choi pictures together. vec and unvec are exact (bit-identical) inverses.
CVector vec(const CMatrix& m);

// Inverse of vec: reshape a length-d² column vector into a d x d matrix.
CMatrix unvec(const CVector& v);

// Eigendecomposition of a Hermitian matrix. The input must be Hermitian
// within relative tolerance 1e-8 and is symmetrized to (h+h†)/2 before the
// solve. Throws NotHermitian / NonConvergence.
HermEig herm_eig(const CMatrix& h);

// U diag((max(w,0) + eps)^(-1/2)) U† for a Hermitian PSD input.
// Eigenvalues below -1e-8 signal a non-PSD input and throw; small negative
// eigenvalues are float noise and are clamped to zero before the shift.
// eps = 0 is accepted when the spectrum is strictly positive.
CMatrix inv_sqrt_psd(const CMatrix& h, double eps);

// Same computation when the caller already has the eigendecomposition.
CMatrix inv_sqrt_from_eig(const HermEig& es, double eps);

enum class Subsystem { A, B };

// Partial trace of a (d_a*d_b) x (d_a*d_b) operator. Index convention
// matches kron: subsystem A is the left/slow factor, so the composite index
// is n = a*d_b + b. keep = A returns Tr_B (d_a x d_a), keep = B returns
// Tr_A (d_b x d_b). The full trace is preserved.
CMatrix partial_trace(const CMatrix& rho_ab, int d_a, int d_b, Subsystem keep);

inline CMatrix identity(int d) { return CMatrix::Identity(d, d); }

}  // namespace dmrnn
