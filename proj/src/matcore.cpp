#include "dmrnn/matcore.hpp"

#include <cmath>
#include <string>

namespace dmrnn {

namespace {

void require_finite(const CMatrix& m, const char* op) {
  if (!all_finite(m))
    throw InvalidArgument(std::string(op) + ": input has non-finite entries");
}

void require_square(const CMatrix& m, const char* op) {
  if (m.rows() != m.cols())
    throw DimensionError(std::string(op) + ": input must be square, got " +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
}

}  // namespace

double hermitian_defect(const CMatrix& m) {
  return (m - m.adjoint()).norm() / std::max(1.0, m.norm());
}

bool all_finite(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const Complex& z = m(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  return true;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  require_finite(a, "kron");
  require_finite(b, "kron");
  const Eigen::Index rows = a.rows() * b.rows();
  const Eigen::Index cols = a.cols() * b.cols();
  if (rows > kMaxDim || cols > kMaxDim)
    throw DimensionError("kron: result dimension " + std::to_string(rows) +
                         "x" + std::to_string(cols) + " exceeds cap " +
                         std::to_string(kMaxDim));
  CMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CVector vec(const CMatrix& m) {
  require_square(m, "vec");
  // MatrixXcd is column-major, so the raw buffer already is the
  // column-stacked vector.
  return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix unvec(const CVector& v) {
  const Eigen::Index n = v.size();
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (d * d != n)
    throw DimensionError("unvec: length " + std::to_string(n) +
                         " is not a perfect square");
  return Eigen::Map<const CMatrix>(v.data(), d, d);
}

HermEig herm_eig(const CMatrix& h) {
  require_square(h, "herm_eig");
  require_finite(h, "herm_eig");
  const double defect = hermitian_defect(h);
  if (defect > 1e-8)
    throw NotHermitian("herm_eig: input is not Hermitian (relative defect " +
                           std::to_string(defect) + ")",
                       defect);
  const CMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw NonConvergence("herm_eig: eigensolver failed to converge on a " +
                         std::to_string(h.rows()) + "x" +
                         std::to_string(h.cols()) + " input");
  // The solver returns ascending eigenvalues; flip to descending so
  // dominant eigenstates are prefix slices.
  HermEig out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.unitary = solver.eigenvectors().rowwise().reverse();
  return out;
}

CMatrix inv_sqrt_from_eig(const HermEig& es, double eps) {
  if (eps < 0) throw InvalidArgument("inv_sqrt_psd: eps must be >= 0");
  const Eigen::Index d = es.eigenvalues.size();
  CVector w(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double lam = es.eigenvalues[i];
    if (lam < -1e-8)
      throw NotPSD("inv_sqrt_psd: eigenvalue " + std::to_string(lam) +
                       " below -1e-8; input is not PSD",
                   lam);
    lam = std::max(lam, 0.0) + eps;
    if (lam <= 0.0)
      throw NumericalError(
          "inv_sqrt_psd: zero eigenvalue with eps = 0 has no inverse square "
          "root");
    w[i] = Complex(1.0 / std::sqrt(lam), 0.0);
  }
  CMatrix out = es.unitary * w.asDiagonal() * es.unitary.adjoint();
  return 0.5 * (out + CMatrix(out.adjoint()));
}

CMatrix inv_sqrt_psd(const CMatrix& h, double eps) {
  return inv_sqrt_from_eig(herm_eig(h), eps);
}

CMatrix partial_trace(const CMatrix& rho_ab, int d_a, int d_b, Subsystem keep) {
  if (d_a < 1 || d_b < 1)
    throw InvalidArgument("partial_trace: subsystem dimensions must be >= 1");
  require_square(rho_ab, "partial_trace");
  if (rho_ab.rows() != static_cast<Eigen::Index>(d_a) * d_b)
    throw DimensionError("partial_trace: matrix is " +
                         std::to_string(rho_ab.rows()) + "x" +
                         std::to_string(rho_ab.cols()) + " but d_a*d_b = " +
                         std::to_string(static_cast<long>(d_a) * d_b));
  if (keep == Subsystem::A) {
    CMatrix out = CMatrix::Zero(d_a, d_a);
    for (int a = 0; a < d_a; ++a)
      for (int a2 = 0; a2 < d_a; ++a2)
        for (int b = 0; b < d_b; ++b)
          out(a, a2) += rho_ab(a * d_b + b, a2 * d_b + b);
    return out;
  }
  CMatrix out = CMatrix::Zero(d_b, d_b);
  for (int b = 0; b < d_b; ++b)
    for (int b2 = 0; b2 < d_b; ++b2)
      for (int a = 0; a < d_a; ++a)
        out(b, b2) += rho_ab(a * d_b + b, a * d_b + b2);
  return out;
}

}  // namespace dmrnn
