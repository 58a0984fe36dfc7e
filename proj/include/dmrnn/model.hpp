// model.hpp: the recurrent model: token embeddings, the generator map that
// turns an embedding into a channel factor, the density-matrix state
// recurrence, and sequence likelihood.
//
// The hidden state is a d x d density matrix. Each consumed token selects
// (through its embedding and the generator) a CPTP channel that evolves the
// state; the POVM head reads next-token probabilities off the state before
// the token is consumed.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dmrnn/matcore.hpp"
#include "dmrnn/measurement.hpp"
#include "dmrnn/qchannel.hpp"
#include "dmrnn/qstate.hpp"

namespace dmrnn {

struct ModelConfig {
  int d = 2;                       // Hilbert dimension
  int m = 2;                       // embedding dimension
  std::vector<std::string> vocab;  // ordered token list
  int k = 4;                       // Kraus operator count, 1 <= k <= d²
  double eps = 1e-6;               // inverse-square-root regularizer
  std::uint64_t seed = 0;

  int vocab_size() const { return static_cast<int>(vocab.size()); }
  // Length of the generator output: real and imaginary parts of a d² x k factor.
  int generator_out() const { return 2 * d * d * k; }
  void validate() const;  // throws ConfigError
};

struct EmbeddingTable {
  RMatrix vectors;  // |V| x m, one row per token
};

// A single affine map e -> W e + b. The first d²k output entries are the
// real parts and the last d²k the imaginary parts of the channel factor,
// both filled column-major. The smallest generator that makes the channel
// input-conditioned; anything deeper slots in behind the same signature.
struct GeneratorParams {
  RMatrix weight;  // (2 d² k) x m
  RVector bias;    // 2 d² k
};

struct ModelParams {
  ModelConfig config;
  EmbeddingTable embeddings;
  GeneratorParams generator;
  std::vector<CMatrix> povm_aux;  // |V| unconstrained d x d auxiliaries
};

// Seeded deterministic initialization. Generator weights are N(0, 1/m);
// embeddings and POVM auxiliaries are N(0, 1/d)-scaled. The generator bias
// is zero except that the first factor column decodes to the identity, so
// the initial channel is near-identity. Draw order is fixed (embeddings,
// weights, auxiliaries, each row-major) so a seed pins every bit.
ModelParams init_params(const ModelConfig& config);

// L = unflatten(W e + b) as a d² x k complex factor.
CMatrix generator(const RVector& e, const GeneratorParams& g,
                  const ModelConfig& config);

// The channel selected by one token: kraus_from_factor(generator(e), eps).
KrausSet channel_for_token(int token, const ModelParams& params);

// The POVM head built from the auxiliaries.
Povm povm_head(const ModelParams& params);

// One recurrence step: rho_prev evolved by the token's channel.
DensityMatrix step(const DensityMatrix& rho_prev, int token,
                   const ModelParams& params);

// Full pass over a token sequence. trajectory holds rho_0 .. rho_T starting
// from the maximally mixed state; probs[t] is the Born distribution read
// from rho_t BEFORE token t is consumed (prediction precedes observation).
struct ForwardResult {
  std::vector<DensityMatrix> trajectory;  // T+1 states
  std::vector<RVector> probs;             // T distributions over |V|
};

ForwardResult forward(const std::vector<int>& tokens,
                      const ModelParams& params);

// Mean per-token negative log-likelihood in nats, probabilities floored at
// 1e-12 before the log. floor_hits counts how often the floor engaged; it
// stays 0 for any healthy model/POVM pair.
struct NllResult {
  double nats = 0.0;
  long floor_hits = 0;
};

NllResult nll_detailed(const std::vector<int>& tokens,
                       const ModelParams& params);

inline double nll(const std::vector<int>& tokens, const ModelParams& params) {
  return nll_detailed(tokens, params).nats;
}

}  // namespace dmrnn
