// train.hpp: desk-scale optimization: a flat real view of the parameters,
// a central-difference gradient, and plain deterministic gradient descent.
//
// Finite differences double as the gradient oracle for any future analytic
// backward pass; at these parameter counts they are fast enough to train.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dmrnn/model.hpp"

namespace dmrnn {

struct TrainConfig {
  double learning_rate = 0.1;
  long steps = 100;
  double fd_step = 1e-5;
  std::vector<std::vector<int>> batch;  // token sequences
  std::uint64_t seed = 0;
  long log_every = 10;

  void validate() const;  // throws ConfigError
};

// Flat real parameter vector, fixed order: embeddings (row-major), generator
// weight (row-major), generator bias, then POVM auxiliaries per token
// (row-major, real then imaginary per entry). The packing order is the
// finite-difference coordinate order, so it is part of the contract.
RVector pack_params(const ModelParams& p);
ModelParams unpack_params(const RVector& v, const ModelConfig& config);
long packed_size(const ModelConfig& config);

// Mean over sequences of the mean per-token NLL (nats); learning rates stay
// scale-free in sequence length and batch size.
double batch_loss(const ModelParams& p,
                  const std::vector<std::vector<int>>& batch);

// Central differences g_i = (loss(θ+h e_i) − loss(θ−h e_i)) / 2h, evaluated
// coordinate by coordinate in packing order. Throws NumericalError on a
// non-finite probe.
RVector fd_gradient(const ModelParams& p,
                    const std::vector<std::vector<int>>& batch,
                    double fd_step);

// Plain gradient descent θ ← θ − lr·g for config.steps iterations.
// History rows are (step, loss(θ_step)) sampled every log_every steps
// before the update, plus a final row at step = steps; steps = 0 leaves
// the parameters untouched and the history empty. Fully deterministic.
struct FitResult {
  ModelParams params;
  std::vector<std::pair<long, double>> history;
};

FitResult fit(const ModelParams& init, const TrainConfig& config);

}  // namespace dmrnn
