#include "dmrnn/model.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "dmrnn/rng.hpp"

namespace dmrnn {

void ModelConfig::validate() const {
  if (d < 1) throw ConfigError("config: d must be >= 1");
  if (m < 1) throw ConfigError("config: m must be >= 1");
  if (vocab.empty()) throw ConfigError("config: vocabulary must be nonempty");
  if (k < 1 || k > d * d)
    throw ConfigError("config: K must satisfy 1 <= K <= d², got K = " +
                      std::to_string(k) + " with d = " + std::to_string(d));
  if (!(eps > 0)) throw ConfigError("config: eps must be > 0");
}

ModelParams init_params(const ModelConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const int v_count = config.vocab_size();
  const int out_dim = config.generator_out();

  ModelParams p;
  p.config = config;

  const double emb_scale = 1.0 / std::sqrt(static_cast<double>(config.d));
  p.embeddings.vectors = RMatrix(v_count, config.m);
  for (int v = 0; v < v_count; ++v)
    for (int j = 0; j < config.m; ++j)
      p.embeddings.vectors(v, j) = emb_scale * rng.normal();

  const double w_scale = 1.0 / std::sqrt(static_cast<double>(config.m));
  p.generator.weight = RMatrix(out_dim, config.m);
  for (int r = 0; r < out_dim; ++r)
    for (int c = 0; c < config.m; ++c)
      p.generator.weight(r, c) = w_scale * rng.normal();

  // Bias encodes vec(I_d) in the first factor column (real part); with a
  // zero embedding the factor normalizes to the identity channel.
  p.generator.bias = RVector::Zero(out_dim);
  for (int i = 0; i < config.d; ++i)
    p.generator.bias[i * config.d + i] = 1.0;

  const double aux_scale = 1.0 / std::sqrt(static_cast<double>(config.d));
  p.povm_aux.reserve(v_count);
  for (int v = 0; v < v_count; ++v) {
    CMatrix a(config.d, config.d);
    for (int r = 0; r < config.d; ++r)
      for (int c = 0; c < config.d; ++c)
        a(r, c) = aux_scale * rng.complex_normal();
    p.povm_aux.push_back(std::move(a));
  }
  return p;
}

CMatrix generator(const RVector& e, const GeneratorParams& g,
                  const ModelConfig& config) {
  const int out_dim = config.generator_out();
  if (e.size() != config.m)
    throw DimensionError("generator: embedding length " +
                         std::to_string(e.size()) + " != m = " +
                         std::to_string(config.m));
  if (g.weight.rows() != out_dim || g.weight.cols() != config.m ||
      g.bias.size() != out_dim)
    throw DimensionError("generator: parameter shapes do not match config");
  const RVector y = g.weight * e + g.bias;
  const int n = config.d * config.d;
  CMatrix l(n, config.k);
  for (int c = 0; c < config.k; ++c)
    for (int r = 0; r < n; ++r)
      l(r, c) = Complex(y[c * n + r], y[n * config.k + c * n + r]);
  return l;
}

KrausSet channel_for_token(int token, const ModelParams& params) {
  const ModelConfig& cfg = params.config;
  if (token < 0 || token >= cfg.vocab_size())
    throw InvalidArgument("unknown token index " + std::to_string(token) +
                          " for vocabulary of size " +
                          std::to_string(cfg.vocab_size()));
  const RVector e = params.embeddings.vectors.row(token).transpose();
  return kraus_from_factor(generator(e, params.generator, cfg), cfg.eps);
}

Povm povm_head(const ModelParams& params) {
  return povm_from_aux(params.povm_aux, params.config.eps);
}

DensityMatrix step(const DensityMatrix& rho_prev, int token,
                   const ModelParams& params) {
  return apply_channel(channel_for_token(token, params), rho_prev);
}

ForwardResult forward(const std::vector<int>& tokens,
                      const ModelParams& params) {
  if (tokens.empty()) throw InvalidArgument("forward: empty token sequence");
  const ModelConfig& cfg = params.config;
  const Povm povm = povm_head(params);

  // The channel depends only on the token, so build each at most once.
  std::vector<std::optional<KrausSet>> channels(cfg.vocab_size());

  ForwardResult out;
  out.trajectory.reserve(tokens.size() + 1);
  out.probs.reserve(tokens.size());
  DensityMatrix rho = maximally_mixed(cfg.d);
  out.trajectory.push_back(rho);
  for (int token : tokens) {
    if (token < 0 || token >= cfg.vocab_size())
      throw InvalidArgument("unknown token index " + std::to_string(token));
    out.probs.push_back(born_probabilities(povm, rho));
    if (!channels[token]) channels[token] = channel_for_token(token, params);
    rho = apply_channel(*channels[token], rho);
    out.trajectory.push_back(rho);
  }
  return out;
}

NllResult nll_detailed(const std::vector<int>& tokens,
                       const ModelParams& params) {
  const ForwardResult fwd = forward(tokens, params);
  NllResult out;
  double sum = 0.0;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    double p = fwd.probs[t][tokens[t]];
    if (p < 1e-12) {
      p = 1e-12;
      ++out.floor_hits;
    }
    sum -= std::log(p);
  }
  out.nats = sum / static_cast<double>(tokens.size());
  return out;
}

}  // namespace dmrnn
