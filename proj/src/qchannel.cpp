#include "dmrnn/qchannel.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace dmrnn {

namespace {

// Shared tail of both construction routes: joint rescaling by
// (S + eps I)^(-1/2) with S = Σ K'† K', plus the eps-aware acceptance
// tolerance for the resulting completeness defect.
KrausSet normalize_ops(std::vector<CMatrix> raw, double eps) {
  const Eigen::Index d = raw.front().rows();
  CMatrix s = CMatrix::Zero(d, d);
  for (const CMatrix& op : raw) s += op.adjoint() * op;
  if (s.norm() < 1e-150)
    throw NumericalError(
        "kraus_from_factor: normalization matrix is numerically zero "
        "(degenerate all-zero factor)");
  const HermEig es = herm_eig(s);
  const CMatrix n = inv_sqrt_from_eig(es, eps);
  for (CMatrix& op : raw) op = op * n;
  // eps biases Σ K†K to S(S+eps I)^(-1) = I − eps (S+eps I)^(-1); accept
  // that bias but never hide it: the defect stays observable through
  // completeness_defect().
  const double sigma_min =
      std::max(es.eigenvalues[es.eigenvalues.size() - 1], 0.0);
  const double tol =
      sigma_min > 0.0
          ? std::max(1e-8, eps * static_cast<double>(d) / sigma_min)
          : std::numeric_limits<double>::infinity();
  return KrausSet::create(std::move(raw), tol);
}

std::pair<Eigen::Index, Eigen::Index> factor_shape(const CMatrix& l) {
  const Eigen::Index rows = l.rows();
  const auto d = static_cast<Eigen::Index>(
      std::llround(std::sqrt(static_cast<double>(rows))));
  if (d * d != rows)
    throw DimensionError("kraus_from_factor: factor must have d² rows, got " +
                         std::to_string(rows));
  if (l.cols() < 1 || l.cols() > rows)
    throw DimensionError("kraus_from_factor: column count " +
                         std::to_string(l.cols()) + " outside [1, d² = " +
                         std::to_string(rows) + "]");
  return {d, l.cols()};
}

}  // namespace

KrausSet KrausSet::create(std::vector<CMatrix> ops, double tol) {
  if (ops.empty()) throw InvalidArgument("KrausSet: at least one operator");
  if (static_cast<int>(ops.size()) > kMaxKrausOps)
    throw InvalidArgument("KrausSet: operator count " +
                          std::to_string(ops.size()) + " exceeds cap " +
                          std::to_string(kMaxKrausOps));
  const Eigen::Index d = ops.front().rows();
  for (const CMatrix& op : ops) {
    if (op.rows() != d || op.cols() != d)
      throw DimensionError("KrausSet: operators must all be d x d");
    if (!all_finite(op))
      throw InvalidArgument("KrausSet: non-finite operator entries");
  }
  const double defect = completeness_defect(ops);
  if (defect > tol)
    throw ValidationError("KrausSet: completeness defect " +
                              std::to_string(defect) + " exceeds tolerance " +
                              std::to_string(tol),
                          defect);
  return KrausSet(std::move(ops), tol);
}

double completeness_defect(const std::vector<CMatrix>& ops) {
  const Eigen::Index d = ops.front().rows();
  CMatrix sum = CMatrix::Zero(d, d);
  for (const CMatrix& op : ops) sum += op.adjoint() * op;
  return (sum - CMatrix::Identity(d, d)).norm();
}

double completeness_defect(const KrausSet& k) {
  return completeness_defect(k.ops());
}

KrausSet kraus_from_factor(const CMatrix& l, double eps) {
  if (eps <= 0) throw InvalidArgument("kraus_from_factor: eps must be > 0");
  if (!all_finite(l))
    throw InvalidArgument("kraus_from_factor: non-finite factor entries");
  const auto [d, k] = factor_shape(l);
  std::vector<CMatrix> raw;
  raw.reserve(k);
  for (Eigen::Index c = 0; c < k; ++c) raw.push_back(unvec(l.col(c)));
  return normalize_ops(std::move(raw), eps);
}

KrausSet kraus_from_factor_via_choi(const CMatrix& l, double eps) {
  if (eps <= 0) throw InvalidArgument("kraus_from_factor: eps must be > 0");
  if (!all_finite(l))
    throw InvalidArgument("kraus_from_factor: non-finite factor entries");
  factor_shape(l);  // shape check only
  // Columns of l are already the vectorized unnormalized operators, so the
  // unnormalized Choi matrix is just the Gram expansion L L†.
  const CMatrix choi = l * l.adjoint();
  const HermEig es = herm_eig(choi);
  const double lam_max = std::max(es.eigenvalues[0], 0.0);
  const double cutoff = 1e-14 * std::max(1.0, lam_max);
  std::vector<CMatrix> raw;
  for (Eigen::Index i = 0; i < es.eigenvalues.size(); ++i) {
    const double lam = es.eigenvalues[i];
    if (lam <= cutoff) continue;
    raw.push_back(std::sqrt(lam) * unvec(es.unitary.col(i)));
  }
  if (raw.empty())
    throw NumericalError(
        "kraus_from_factor_via_choi: factor has no positive spectrum");
  return normalize_ops(std::move(raw), eps);
}

DensityMatrix apply_channel(const KrausSet& k, const DensityMatrix& rho) {
  if (k.dim() != rho.dim())
    throw DimensionError("apply_channel: channel dim " +
                         std::to_string(k.dim()) + " vs state dim " +
                         std::to_string(rho.dim()));
  const Eigen::Index d = rho.dim();
  CMatrix out = CMatrix::Zero(d, d);
  for (const CMatrix& op : k.ops()) out += op * rho.mat() * op.adjoint();
  out = 0.5 * (out + CMatrix(out.adjoint()));
  const double trace = out.trace().real();
  const double drift = std::abs(trace - 1.0);
  const double limit = std::max(1e-6, k.tolerance());
  if (drift > limit)
    throw NumericalError("apply_channel: trace drift " + std::to_string(drift) +
                         " beyond " + std::to_string(limit) +
                         " signals an invalid Kraus set");
  if (drift > 1e-12) out /= trace;
  return validate_density(out, 1e-6);
}

ChoiMatrix choi_of_channel(const KrausSet& k) {
  const Eigen::Index d = k.dim();
  CMatrix c = CMatrix::Zero(d * d, d * d);
  for (const CMatrix& op : k.ops()) {
    const CVector v = vec(op);
    c += v * v.adjoint();
  }
  return ChoiMatrix{static_cast<int>(d), std::move(c)};
}

CptpReport verify_cptp(const ChoiMatrix& c, double tol) {
  const int d = c.dim;
  if (c.mat.rows() != static_cast<Eigen::Index>(d) * d ||
      c.mat.cols() != static_cast<Eigen::Index>(d) * d)
    throw DimensionError("verify_cptp: Choi matrix must be d² x d²");
  const CMatrix sym = 0.5 * (c.mat + c.mat.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw NonConvergence("verify_cptp: eigensolver failed on the Choi matrix");
  const double min_eig = solver.eigenvalues().minCoeff();
  // Tracing out the output (fast) factor leaves the input space, where
  // trace preservation demands the identity.
  const CMatrix tr_out = partial_trace(sym, d, d, Subsystem::A);
  const double tp_defect = (tr_out - CMatrix::Identity(d, d)).norm();
  return CptpReport{min_eig, tp_defect, min_eig >= -tol && tp_defect <= tol};
}

KrausSet compose_bipartite(const KrausSet& e_a, const KrausSet& e_b,
                           const KrausSet& e_int, double tol) {
  const long d_ab = static_cast<long>(e_a.dim()) * e_b.dim();
  if (e_int.dim() != d_ab)
    throw DimensionError("compose_bipartite: interaction channel dim " +
                         std::to_string(e_int.dim()) + " != d_a*d_b = " +
                         std::to_string(d_ab));
  const long total = static_cast<long>(e_a.count()) * e_b.count() * e_int.count();
  if (total > kMaxKrausOps)
    throw InvalidArgument("compose_bipartite: " + std::to_string(total) +
                          " product operators exceed cap " +
                          std::to_string(kMaxKrausOps));
  std::vector<CMatrix> ops;
  ops.reserve(total);
  for (const CMatrix& ka : e_a.ops())
    for (const CMatrix& kb : e_b.ops()) {
      const CMatrix local = kron(ka, kb);
      for (const CMatrix& ki : e_int.ops()) ops.push_back(local * ki);
    }
  return KrausSet::create(std::move(ops), tol);
}

namespace {

CMatrix lindblad_rhs(const CMatrix& rho, const CMatrix& h,
                     const std::vector<JumpOperator>& jumps,
                     const std::vector<CMatrix>& jump_grams) {
  const Complex minus_i(0.0, -1.0);
  CMatrix out = minus_i * (h * rho - rho * h);
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    const CMatrix& l = jumps[k].op;
    const CMatrix& gram = jump_grams[k];  // L†L
    out += jumps[k].rate *
           (l * rho * l.adjoint() - 0.5 * (gram * rho + rho * gram));
  }
  return out;
}

}  // namespace

DensityMatrix lindblad_step(const DensityMatrix& rho, const CMatrix& h,
                            const std::vector<JumpOperator>& jumps,
                            double dt) {
  if (dt <= 0) throw InvalidArgument("lindblad_step: dt must be > 0");
  const Eigen::Index d = rho.dim();
  if (h.rows() != d || h.cols() != d)
    throw DimensionError("lindblad_step: Hamiltonian must match state dim");
  if (hermitian_defect(h) > 1e-8)
    throw NotHermitian("lindblad_step: Hamiltonian is not Hermitian",
                       hermitian_defect(h));
  std::vector<CMatrix> grams;
  grams.reserve(jumps.size());
  for (const JumpOperator& j : jumps) {
    if (j.op.rows() != d || j.op.cols() != d)
      throw DimensionError("lindblad_step: jump operator must match state dim");
    if (j.rate < 0)
      throw InvalidArgument("lindblad_step: jump rates must be >= 0");
    grams.push_back(j.op.adjoint() * j.op);
  }
  const CMatrix hs = 0.5 * (h + h.adjoint());

  const CMatrix& r0 = rho.mat();
  const CMatrix k1 = lindblad_rhs(r0, hs, jumps, grams);
  const CMatrix k2 = lindblad_rhs(r0 + 0.5 * dt * k1, hs, jumps, grams);
  const CMatrix k3 = lindblad_rhs(r0 + 0.5 * dt * k2, hs, jumps, grams);
  const CMatrix k4 = lindblad_rhs(r0 + dt * k3, hs, jumps, grams);
  CMatrix out = r0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  out = 0.5 * (out + CMatrix(out.adjoint()));

  const double drift = std::abs(out.trace().real() - 1.0);
  if (drift > 1e-8)
    throw NumericalError("lindblad_step: trace drift " + std::to_string(drift) +
                         " exceeds 1e-8");
  try {
    return validate_density(out, 1e-6);
  } catch (const NotPSD& e) {
    throw NumericalError(
        "lindblad_step: output eigenvalue " + std::to_string(e.defect) +
        " below -1e-6; reduce dt");
  }
}

}  // namespace dmrnn
