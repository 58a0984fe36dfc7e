#include "dmrnn/analysis.hpp"

#include <ostream>
#include <string>

#include "dmrnn/serialize.hpp"

namespace dmrnn {

double qmi(const DensityMatrix& rho_ab, int d_a, int d_b) {
  if (static_cast<long>(d_a) * d_b != rho_ab.dim())
    throw DimensionError("qmi: d_a*d_b = " +
                         std::to_string(static_cast<long>(d_a) * d_b) +
                         " != state dim " + std::to_string(rho_ab.dim()));
  const CMatrix ra = partial_trace(rho_ab.mat(), d_a, d_b, Subsystem::A);
  const CMatrix rb = partial_trace(rho_ab.mat(), d_a, d_b, Subsystem::B);
  const double s_a = vne(DensityMatrix::unchecked(0.5 * (ra + CMatrix(ra.adjoint()))));
  const double s_b = vne(DensityMatrix::unchecked(0.5 * (rb + CMatrix(rb.adjoint()))));
  const double s_ab = vne(rho_ab);
  const double value = s_a + s_b - s_ab;
  if (value < -1e-6)
    throw NumericalError("qmi: value " + std::to_string(value) +
                         " below -1e-6 signals numerical corruption");
  return value < 0.0 ? 0.0 : value;  // subadditivity; clamp float noise
}

std::vector<MetricsRecord> trajectory_metrics(
    const std::vector<DensityMatrix>& trajectory,
    std::optional<BipartiteDims> bipartite) {
  if (trajectory.empty())
    throw InvalidArgument("trajectory_metrics: empty trajectory");
  std::vector<MetricsRecord> out;
  out.reserve(trajectory.size());
  long t = 0;
  for (const DensityMatrix& rho : trajectory) {
    MetricsRecord rec;
    rec.t = t++;
    rec.vne_bits = vne(rho);
    rec.purity = purity(rho);
    rec.top_weight = herm_eig(rho.mat()).eigenvalues[0];
    if (bipartite) rec.qmi_bits = qmi(rho, bipartite->d_a, bipartite->d_b);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<std::pair<double, CVector>> dominant_eigenstates(
    const DensityMatrix& rho, int k) {
  if (k < 1 || k > rho.dim())
    throw InvalidArgument("dominant_eigenstates: k = " + std::to_string(k) +
                          " outside [1, d = " + std::to_string(rho.dim()) +
                          "]");
  const SpectralDecomposition sd = spectral(rho);
  std::vector<std::pair<double, CVector>> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) out.emplace_back(sd.weights[i], sd.states[i]);
  return out;
}

void write_metrics_csv(std::ostream& os,
                       const std::vector<MetricsRecord>& records) {
  const bool with_qmi = !records.empty() && records.front().qmi_bits.has_value();
  os << "t,vne_bits,purity,top_weight";
  if (with_qmi) os << ",qmi_bits";
  os << "\n";
  for (const MetricsRecord& r : records) {
    os << r.t << ',' << format_g17(r.vne_bits) << ',' << format_g17(r.purity)
       << ',' << format_g17(r.top_weight);
    if (with_qmi) os << ',' << format_g17(r.qmi_bits.value());
    os << "\n";
  }
}

void write_metrics_jsonl(std::ostream& os,
                         const std::vector<MetricsRecord>& records) {
  for (const MetricsRecord& r : records) {
    Json j{{"t", r.t},
           {"vne_bits", r.vne_bits},
           {"purity", r.purity},
           {"top_weight", r.top_weight}};
    if (r.qmi_bits) j["qmi_bits"] = *r.qmi_bits;
    os << j.dump() << "\n";
  }
}

}  // namespace dmrnn
