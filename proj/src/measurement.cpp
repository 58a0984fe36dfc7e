#include "dmrnn/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dmrnn {

Povm Povm::create(std::vector<CMatrix> elements, double tol) {
  if (elements.empty())
    throw InvalidArgument("Povm: at least one element required");
  const Eigen::Index d = elements.front().rows();
  CMatrix sum = CMatrix::Zero(d, d);
  for (std::size_t v = 0; v < elements.size(); ++v) {
    const CMatrix& m = elements[v];
    if (m.rows() != d || m.cols() != d)
      throw DimensionError("Povm: elements must all be d x d");
    if (!all_finite(m)) throw InvalidArgument("Povm: non-finite entries");
    const double herm = (m - m.adjoint()).norm();
    if (herm > tol)
      throw NotHermitian("Povm: element " + std::to_string(v) +
                             " is not Hermitian (defect " +
                             std::to_string(herm) + ")",
                         herm);
    const HermEig es = herm_eig(0.5 * (m + m.adjoint()));
    const double min_eig = es.eigenvalues[es.eigenvalues.size() - 1];
    if (min_eig < -tol)
      throw NotPSD("Povm: element " + std::to_string(v) + " has eigenvalue " +
                       std::to_string(min_eig),
                   min_eig);
    sum += m;
  }
  const double defect = (sum - CMatrix::Identity(d, d)).norm();
  if (defect > tol)
    throw ValidationError("Povm: completeness defect " +
                              std::to_string(defect) + " exceeds tolerance " +
                              std::to_string(tol),
                          defect);
  return Povm(std::move(elements), tol);
}

Povm povm_from_aux(const std::vector<CMatrix>& aux, double eps) {
  if (aux.empty()) throw InvalidArgument("povm_from_aux: empty auxiliary set");
  if (eps <= 0) throw InvalidArgument("povm_from_aux: eps must be > 0");
  const Eigen::Index d = aux.front().rows();
  std::vector<CMatrix> positive;
  positive.reserve(aux.size());
  CMatrix s = CMatrix::Zero(d, d);
  for (const CMatrix& a : aux) {
    if (a.rows() != d || a.cols() != d)
      throw DimensionError("povm_from_aux: auxiliaries must all be d x d");
    if (!all_finite(a))
      throw InvalidArgument("povm_from_aux: non-finite entries");
    positive.push_back(a.adjoint() * a);
    s += positive.back();
  }
  if (s.norm() < 1e-150)
    throw NumericalError(
        "povm_from_aux: normalization matrix is numerically zero");
  const HermEig es = herm_eig(s);
  const CMatrix n = inv_sqrt_from_eig(es, eps);
  std::vector<CMatrix> elements;
  elements.reserve(aux.size());
  for (const CMatrix& m : positive) {
    CMatrix e = n * m * n;
    elements.push_back(0.5 * (e + CMatrix(e.adjoint())));
  }
  const double sigma_min =
      std::max(es.eigenvalues[es.eigenvalues.size() - 1], 0.0);
  const double tol =
      sigma_min > 0.0
          ? std::max(1e-8, eps * static_cast<double>(d) / sigma_min)
          : std::numeric_limits<double>::infinity();
  return Povm::create(std::move(elements), tol);
}

RVector born_probabilities(const Povm& p, const DensityMatrix& rho) {
  if (p.dim() != rho.dim())
    throw DimensionError("born_probabilities: POVM dim " +
                         std::to_string(p.dim()) + " vs state dim " +
                         std::to_string(rho.dim()));
  const int v_count = p.vocab_size();
  RVector probs(v_count);
  for (int v = 0; v < v_count; ++v) {
    const Complex tr = (p.elements()[v] * rho.mat()).trace();
    if (std::abs(tr.imag()) > 1e-10)
      throw NumericalError("born_probabilities: imaginary residue " +
                           std::to_string(tr.imag()) + " on outcome " +
                           std::to_string(v));
    probs[v] = std::clamp(tr.real(), 0.0, 1.0);
  }
  const double sum = probs.sum();
  const double limit = std::max(1e-8, p.tolerance());
  if (std::abs(sum - 1.0) > limit)
    throw NumericalError("born_probabilities: probabilities sum to " +
                         std::to_string(sum) + " (limit " +
                         std::to_string(limit) +
                         "); POVM or state is invalid");
  probs /= sum;
  return probs;
}

}  // namespace dmrnn
