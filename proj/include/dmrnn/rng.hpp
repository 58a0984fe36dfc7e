// rng.hpp: seeded deterministic random draws for initialization and the
// randomized verification suites. Distribution sampling is hand-rolled
// (Box-Muller over mt19937_64) so a fixed seed reproduces the same stream
// regardless of standard-library internals.

#pragma once

#include <cstdint>
#include <random>

#include "dmrnn/matcore.hpp"
#include "dmrnn/qstate.hpp"

namespace dmrnn {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; one spare value cached per pair.
  double normal();

  // Standard complex normal: E|z|² = 1.
  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return Complex(re, im) / std::sqrt(2.0);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// rows x cols matrix with i.i.d. standard complex normal entries,
// drawn column-major.
CMatrix random_complex_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

// Random full-rank density matrix: G G† / Tr(G G†) for Ginibre G.
DensityMatrix random_density(int d, Rng& rng);

// Haar-ish random unitary: QR orthonormalization of a Ginibre matrix with
// the R diagonal phases absorbed (deterministic for a fixed stream).
CMatrix random_unitary(int d, Rng& rng);

}  // namespace dmrnn
