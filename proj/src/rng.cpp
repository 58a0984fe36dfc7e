#include "dmrnn/rng.hpp"

#include <cmath>
#include <numbers>

namespace dmrnn {

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] keeps the log finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

CMatrix random_complex_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  CMatrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = rng.complex_normal();
  return out;
}

DensityMatrix random_density(int d, Rng& rng) {
  const CMatrix g = random_complex_matrix(d, d, rng);
  CMatrix m = g * g.adjoint();
  m /= m.trace().real();
  m = 0.5 * (m + CMatrix(m.adjoint()));
  return DensityMatrix::unchecked(std::move(m));
}

CMatrix random_unitary(int d, Rng& rng) {
  const CMatrix g = random_complex_matrix(d, d, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Absorb the R diagonal phases so the factorization is unique.
  for (int j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    if (mag > 0.0) q.col(j) *= rjj / mag;
  }
  return q;
}

}  // namespace dmrnn
