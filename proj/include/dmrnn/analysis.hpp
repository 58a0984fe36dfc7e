// analysis.hpp: quantum-information analytics over state trajectories:
// entropy and purity curves, dominant eigenstates, and quantum mutual
// information between imposed voice subsystems.

#pragma once

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "dmrnn/qstate.hpp"

namespace dmrnn {

// Quantum mutual information S(rho_A) + S(rho_B) − S(rho_AB) in bits, for a
// state on a composite space with A as the left Kronecker factor.
// Subadditivity makes the value nonnegative; float noise below zero is
// clamped to 0 and anything under -1e-6 is rejected as numerical
// corruption.
double qmi(const DensityMatrix& rho_ab, int d_a, int d_b);

struct BipartiteDims {
  int d_a = 1;
  int d_b = 1;
};

struct MetricsRecord {
  long t = 0;
  double vne_bits = 0.0;
  double purity = 0.0;
  double top_weight = 0.0;  // largest eigenvalue
  std::optional<double> qmi_bits;  // present iff bipartite dims configured
};

// One record per state, in trajectory order. qmi_bits is filled only when
// bipartite dims are given (and must then factor the state dimension).
std::vector<MetricsRecord> trajectory_metrics(
    const std::vector<DensityMatrix>& trajectory,
    std::optional<BipartiteDims> bipartite = std::nullopt);

// Top-k (weight, eigenstate) pairs by descending weight, phase-fixed as in
// spectral(). 1 <= k <= d.
std::vector<std::pair<double, CVector>> dominant_eigenstates(
    const DensityMatrix& rho, int k);

// CSV columns: t,vne_bits,purity,top_weight[,qmi_bits]; the qmi column
// appears iff the records carry it. Doubles print with 17 significant
// digits so the files round-trip exactly.
void write_metrics_csv(std::ostream& os,
                       const std::vector<MetricsRecord>& records);

// One compact JSON object per line, same fields as the CSV.
void write_metrics_jsonl(std::ostream& os,
                         const std::vector<MetricsRecord>& records);

}  // namespace dmrnn
