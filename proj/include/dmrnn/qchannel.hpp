// qchannel.hpp: quantum channels (CPTP maps): construction of valid
// channels from unconstrained complex factors, application to states, Choi
// matrix conversion and verification, bipartite composition, and a single
// Lindblad integrator step.
//
// The construction pipeline is: a factor L (d² rows, K columns) is read as
// K vectorized operators; C' = L L† is the positive matrix those operators
// represent, which makes the map completely positive by construction; the
// operators are then jointly rescaled by (S + eps I)^(-1/2) with
// S = Σ K'† K' so the completeness relation Σ K† K = I holds and the map
// is trace preserving.

#pragma once

#include <vector>

#include "dmrnn/matcore.hpp"
#include "dmrnn/qstate.hpp"

namespace dmrnn {

// Upper bound on the operator count of composed channels.
inline constexpr int kMaxKrausOps = 4096;

// A channel in Kraus form: rho -> Σ_k ops[k] rho ops[k]†, with
// Σ_k ops[k]† ops[k] = I within the tolerance recorded at creation.
// Sets built from a factor carry K <= d² operators; composed channels may
// carry redundant operators up to kMaxKrausOps.
class KrausSet {
 public:
  // Validates shape and the completeness relation (defect <= tol).
  static KrausSet create(std::vector<CMatrix> ops, double tol = 1e-8);

  int dim() const { return static_cast<int>(ops_.front().rows()); }
  int count() const { return static_cast<int>(ops_.size()); }
  const std::vector<CMatrix>& ops() const { return ops_; }

  // The completeness tolerance this set was accepted at. Exactly normalized
  // sets carry 1e-8; eps-normalized sets carry the eps-bias bound, and
  // consumers widen their drift checks accordingly.
  double tolerance() const { return tol_; }

 private:
  KrausSet(std::vector<CMatrix> ops, double tol)
      : ops_(std::move(ops)), tol_(tol) {}
  std::vector<CMatrix> ops_;
  double tol_;
};

// ‖Σ_k K_k† K_k − I‖_F, the completeness-relation defect.
double completeness_defect(const std::vector<CMatrix>& ops);
double completeness_defect(const KrausSet& k);

// The d² x d² Choi matrix of a channel on a d-dimensional space.
// For a valid channel it is Hermitian PSD (complete positivity) with
// Tr over the output factor equal to I_d (trace preservation); the struct
// itself is open so that verify_cptp can diagnose invalid candidates.
struct ChoiMatrix {
  int dim;      // Hilbert dimension d of the underlying channel
  CMatrix mat;  // d² x d²
};

// Builds a valid channel from an unconstrained d² x K complex factor:
// K'_k = unvec(column k), S = Σ K'† K', K_k = K'_k (S + eps I)^(-1/2).
// eps > 0 keeps the inverse square root finite when S is singular and
// biases the completeness sum to S(S+eps I)^(-1), so the accepted defect is
// max(1e-8, eps*d/sigma_min(S)). Throws on an all-zero factor.
KrausSet kraus_from_factor(const CMatrix& l, double eps);

// Same channel via the expensive route: eigendecompose the d² x d² matrix
// L L† and rescale sqrt(eigenvalue)-weighted unvectorized eigenvectors.
// Exists as the comparison arm for benchmarks and cross-route tests; the
// resulting Kraus operators differ from kraus_from_factor by an isometry
// but represent the same channel.
KrausSet kraus_from_factor_via_choi(const CMatrix& l, double eps);

// Σ_k K_k rho K_k†, symmetrized; the trace is renormalized when the drift
// exceeds 1e-12 and rejected (invalid Kraus set) when it exceeds
// max(1e-6, k.tolerance()). The output is validated as a density matrix at
// tolerance 1e-6.
DensityMatrix apply_channel(const KrausSet& k, const DensityMatrix& rho);

// C = Σ_k vec(K_k) vec(K_k)† under the column-stacking convention.
// Equivalently the channel applied to one half of the unnormalized
// maximally entangled state Σ_i |u_i>|u_i>; Tr(C) = d for any valid set.
// The input factor of the composite index is the channel input space and
// the fast factor is the output space.
ChoiMatrix choi_of_channel(const KrausSet& k);

struct CptpReport {
  double min_eigenvalue;  // of the symmetrized Choi matrix
  double tp_defect;       // ‖Tr_out(C) − I_d‖_F
  bool pass;              // min_eigenvalue >= -tol and tp_defect <= tol
};

// Diagnostic check of complete positivity and trace preservation.
CptpReport verify_cptp(const ChoiMatrix& c, double tol);

// Kraus set of (E_A ⊗ E_B) ∘ E_int: the products (K_a ⊗ K_b) K_int over
// all operator triples. Throws when the product count exceeds
// kMaxKrausOps. `tol` is the completeness tolerance for the result; loosen
// it when the inputs carry an eps-normalization bias.
KrausSet compose_bipartite(const KrausSet& e_a, const KrausSet& e_b,
                           const KrausSet& e_int, double tol = 1e-8);

struct JumpOperator {
  CMatrix op;
  double rate;  // gamma_k >= 0
};

// One classical RK4 step of the Lindblad master equation
//   drho/dt = -i[H, rho] + Σ_k gamma_k (L rho L† − ½{L†L, rho}).
// The output is symmetrized and validated; a trace drift beyond 1e-8 or a
// negative eigenvalue below -1e-6 means dt is too large for this generator
// and throws.
DensityMatrix lindblad_step(const DensityMatrix& rho, const CMatrix& h,
                            const std::vector<JumpOperator>& jumps, double dt);

}  // namespace dmrnn
