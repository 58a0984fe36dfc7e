// qstate.hpp: the density-matrix state type plus the scalar diagnostics
// built on it: purity, von Neumann entropy, spectral decomposition.

#pragma once

#include <vector>

#include "dmrnn/matcore.hpp"

namespace dmrnn {

// A d x d density matrix: Hermitian, unit trace, positive semidefinite.
// Instances are immutable; every factory either establishes the invariants
// itself or validates them, so holding a DensityMatrix means holding a
// physical state.
class DensityMatrix {
 public:
  int dim() const { return static_cast<int>(mat_.rows()); }
  const CMatrix& mat() const { return mat_; }

  // Wraps a matrix the caller has already symmetrized and checked.
  // Internal escape hatch for operations (channel application, integrators)
  // that verify their own outputs.
  static DensityMatrix unchecked(CMatrix m) { return DensityMatrix(std::move(m)); }

 private:
  explicit DensityMatrix(CMatrix m) : mat_(std::move(m)) {}
  CMatrix mat_;
};

// Validates Hermiticity (absolute Frobenius defect), unit trace, and
// positive semidefiniteness, each against `tol`. The stored matrix is the
// symmetrized (m+m†)/2. Throws NotHermitian / NotUnitTrace / NotPSD with
// the measured defect.
DensityMatrix validate_density(const CMatrix& m, double tol = 1e-8);

// |psi><psi| after normalizing psi to unit norm. Throws on the zero vector.
DensityMatrix pure_from_vector(const CVector& psi);

// I_d / d, the maximal-entropy state.
DensityMatrix maximally_mixed(int d);

// Tr(rho²) ∈ [1/d, 1]; equals 1 iff the state is pure.
double purity(const DensityMatrix& rho);

// Von Neumann entropy in bits: -Σ λ log2 λ over the eigenvalues, with
// eigenvalues below 1e-12 dropped (0 log 0 = 0) after clamping negative
// float noise in [-1e-8, 0). Result lies in [0, log2 d].
double vne(const DensityMatrix& rho);

// rho = Σ weights[i] |states[i]><states[i]| with descending weights and
// orthonormal states. The global phase of each state is fixed by making
// its largest-magnitude component real and positive, so output is
// reproducible run to run.
struct SpectralDecomposition {
  RVector weights;              // descending, sums to 1
  std::vector<CVector> states;  // orthonormal unit vectors
};

SpectralDecomposition spectral(const DensityMatrix& rho);

}  // namespace dmrnn
