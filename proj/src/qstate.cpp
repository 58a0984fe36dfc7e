#include "dmrnn/qstate.hpp"

#include <cmath>
#include <string>

namespace dmrnn {

DensityMatrix validate_density(const CMatrix& m, double tol) {
  if (m.rows() != m.cols())
    throw DimensionError("validate_density: matrix must be square, got " +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  if (m.rows() < 1)
    throw DimensionError("validate_density: empty matrix");
  if (!all_finite(m))
    throw InvalidArgument("validate_density: non-finite entries");

  const double herm = (m - m.adjoint()).norm();
  if (herm > tol)
    throw NotHermitian("density matrix is not Hermitian (defect " +
                           std::to_string(herm) + " > " + std::to_string(tol) +
                           ")",
                       herm);
  CMatrix sym = 0.5 * (m + m.adjoint());

  const double trace_defect = std::abs(sym.trace() - Complex(1.0, 0.0));
  if (trace_defect > tol)
    throw NotUnitTrace("density matrix trace deviates from 1 by " +
                           std::to_string(trace_defect),
                       trace_defect);

  const HermEig es = herm_eig(sym);
  const double min_eig = es.eigenvalues[es.eigenvalues.size() - 1];
  if (min_eig < -tol)
    throw NotPSD("density matrix has eigenvalue " + std::to_string(min_eig),
                 min_eig);

  return DensityMatrix::unchecked(std::move(sym));
}

DensityMatrix pure_from_vector(const CVector& psi) {
  if (psi.size() < 1) throw InvalidArgument("pure_from_vector: empty vector");
  const double norm = psi.norm();
  if (norm == 0.0)
    throw InvalidArgument("pure_from_vector: zero vector has no direction");
  const CVector unit = psi / norm;
  return DensityMatrix::unchecked(unit * unit.adjoint());
}

DensityMatrix maximally_mixed(int d) {
  if (d < 1)
    throw InvalidArgument("maximally_mixed: dimension must be >= 1, got " +
                          std::to_string(d));
  return DensityMatrix::unchecked(CMatrix::Identity(d, d) / double(d));
}

double purity(const DensityMatrix& rho) {
  // Tr(rho²) = ‖rho‖_F² for Hermitian rho.
  return rho.mat().squaredNorm();
}

double vne(const DensityMatrix& rho) {
  const HermEig es = herm_eig(rho.mat());
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues.size(); ++i) {
    const double lam = es.eigenvalues[i];
    if (lam < -1e-8)
      throw NotPSD("vne: eigenvalue " + std::to_string(lam) + " below -1e-8",
                   lam);
    if (lam < 1e-12) continue;  // 0 log 0 -> 0
    s -= lam * std::log2(lam);
  }
  return std::max(s, 0.0);
}

SpectralDecomposition spectral(const DensityMatrix& rho) {
  const HermEig es = herm_eig(rho.mat());
  SpectralDecomposition out;
  out.weights = es.eigenvalues;
  out.states.reserve(es.unitary.cols());
  for (Eigen::Index j = 0; j < es.unitary.cols(); ++j) {
    CVector v = es.unitary.col(j);
    // Fix the global phase: largest-magnitude component (first among ties)
    // becomes real and positive.
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double mag = std::abs(v[i]);
      if (mag > best + 1e-15) {
        best = mag;
        pivot = i;
      }
    }
    if (best > 0.0) v *= std::conj(v[pivot]) / std::abs(v[pivot]);
    out.states.push_back(std::move(v));
  }
  return out;
}

}  // namespace dmrnn
