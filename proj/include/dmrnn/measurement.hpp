// measurement.hpp: POVM prediction head: positive operators summing to the
// identity, built from unconstrained auxiliary matrices, and Born-rule
// outcome probabilities.

#pragma once

#include <vector>

#include "dmrnn/matcore.hpp"
#include "dmrnn/qstate.hpp"

namespace dmrnn {

// A positive operator-valued measure over a vocabulary of |V| outcomes:
// each element is Hermitian PSD and the elements sum to I_d.
class Povm {
 public:
  // Validates each element (Hermitian, min eigenvalue >= -tol) and the
  // completeness sum (defect <= tol).
  static Povm create(std::vector<CMatrix> elements, double tol = 1e-8);

  int dim() const { return static_cast<int>(elements_.front().rows()); }
  int vocab_size() const { return static_cast<int>(elements_.size()); }
  const std::vector<CMatrix>& elements() const { return elements_; }

  // The completeness tolerance this POVM was accepted at; eps-normalized
  // measures carry the eps-bias bound and Born sums inherit it.
  double tolerance() const { return tol_; }

 private:
  Povm(std::vector<CMatrix> elements, double tol)
      : elements_(std::move(elements)), tol_(tol) {}
  std::vector<CMatrix> elements_;
  double tol_;
};

// Builds a valid POVM from |V| unconstrained d x d auxiliaries:
// M'_v = A_v† A_v (positive by construction), S = Σ M'_v,
// M_v = (S+eps I)^(-1/2) M'_v (S+eps I)^(-1/2). The eps bias widens the
// accepted completeness defect exactly as in kraus_from_factor.
Povm povm_from_aux(const std::vector<CMatrix>& aux, double eps);

// Born rule: P(v) = Re Tr(M_v rho). The imaginary residue of each trace
// must stay below 1e-10 (it vanishes identically for Hermitian operands);
// probabilities are clamped to [0, 1] and the vector is renormalized when
// its sum is within max(1e-8, p.tolerance()) of 1, else the pair is
// rejected as invalid.
RVector born_probabilities(const Povm& p, const DensityMatrix& rho);

}  // namespace dmrnn
