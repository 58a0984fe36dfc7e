#include "dmrnn/train.hpp"

#include <cmath>
#include <string>

namespace dmrnn {

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw ConfigError("train: learning_rate must be > 0");
  if (steps < 0) throw ConfigError("train: steps must be >= 0");
  if (!(fd_step > 0)) throw ConfigError("train: fd_step must be > 0");
  if (log_every < 1) throw ConfigError("train: log_every must be >= 1");
  if (batch.empty()) throw ConfigError("train: batch must be nonempty");
  for (const auto& seq : batch)
    if (seq.empty()) throw ConfigError("train: sequences must be nonempty");
}

long packed_size(const ModelConfig& config) {
  const long v = config.vocab_size();
  const long out_dim = config.generator_out();
  return v * config.m + out_dim * config.m + out_dim +
         v * 2L * config.d * config.d;
}

RVector pack_params(const ModelParams& p) {
  const ModelConfig& cfg = p.config;
  RVector out(packed_size(cfg));
  long idx = 0;
  for (int v = 0; v < cfg.vocab_size(); ++v)
    for (int j = 0; j < cfg.m; ++j) out[idx++] = p.embeddings.vectors(v, j);
  for (int r = 0; r < p.generator.weight.rows(); ++r)
    for (int c = 0; c < p.generator.weight.cols(); ++c)
      out[idx++] = p.generator.weight(r, c);
  for (long i = 0; i < p.generator.bias.size(); ++i)
    out[idx++] = p.generator.bias[i];
  for (int v = 0; v < cfg.vocab_size(); ++v)
    for (int r = 0; r < cfg.d; ++r)
      for (int c = 0; c < cfg.d; ++c) {
        out[idx++] = p.povm_aux[v](r, c).real();
        out[idx++] = p.povm_aux[v](r, c).imag();
      }
  return out;
}

ModelParams unpack_params(const RVector& v, const ModelConfig& config) {
  if (v.size() != packed_size(config))
    throw DimensionError("unpack_params: vector length " +
                         std::to_string(v.size()) + " != expected " +
                         std::to_string(packed_size(config)));
  ModelParams p;
  p.config = config;
  const int v_count = config.vocab_size();
  const int out_dim = config.generator_out();
  long idx = 0;
  p.embeddings.vectors = RMatrix(v_count, config.m);
  for (int t = 0; t < v_count; ++t)
    for (int j = 0; j < config.m; ++j) p.embeddings.vectors(t, j) = v[idx++];
  p.generator.weight = RMatrix(out_dim, config.m);
  for (int r = 0; r < out_dim; ++r)
    for (int c = 0; c < config.m; ++c) p.generator.weight(r, c) = v[idx++];
  p.generator.bias = RVector(out_dim);
  for (int i = 0; i < out_dim; ++i) p.generator.bias[i] = v[idx++];
  p.povm_aux.reserve(v_count);
  for (int t = 0; t < v_count; ++t) {
    CMatrix a(config.d, config.d);
    for (int r = 0; r < config.d; ++r)
      for (int c = 0; c < config.d; ++c) {
        const double re = v[idx++];
        const double im = v[idx++];
        a(r, c) = Complex(re, im);
      }
    p.povm_aux.push_back(std::move(a));
  }
  return p;
}

double batch_loss(const ModelParams& p,
                  const std::vector<std::vector<int>>& batch) {
  if (batch.empty()) throw InvalidArgument("batch_loss: empty batch");
  double sum = 0.0;
  for (const auto& seq : batch) sum += nll(seq, p);
  return sum / static_cast<double>(batch.size());
}

RVector fd_gradient(const ModelParams& p,
                    const std::vector<std::vector<int>>& batch,
                    double fd_step) {
  if (!(fd_step > 0)) throw InvalidArgument("fd_gradient: fd_step must be > 0");
  RVector theta = pack_params(p);
  RVector grad(theta.size());
  for (long i = 0; i < theta.size(); ++i) {
    const double base = theta[i];
    theta[i] = base + fd_step;
    const double plus = batch_loss(unpack_params(theta, p.config), batch);
    theta[i] = base - fd_step;
    const double minus = batch_loss(unpack_params(theta, p.config), batch);
    theta[i] = base;
    if (!std::isfinite(plus) || !std::isfinite(minus))
      throw NumericalError("fd_gradient: non-finite loss at coordinate " +
                           std::to_string(i));
    grad[i] = (plus - minus) / (2.0 * fd_step);
  }
  return grad;
}

FitResult fit(const ModelParams& init, const TrainConfig& config) {
  config.validate();
  init.config.validate();
  RVector theta = pack_params(init);
  FitResult out;
  for (long s = 0; s < config.steps; ++s) {
    const ModelParams params = unpack_params(theta, init.config);
    if (s % config.log_every == 0) {
      const double loss = batch_loss(params, config.batch);
      if (!std::isfinite(loss))
        throw NumericalError("fit: loss diverged at step " + std::to_string(s));
      out.history.emplace_back(s, loss);
    }
    RVector grad;
    try {
      grad = fd_gradient(params, config.batch, config.fd_step);
    } catch (const NumericalError& e) {
      throw NumericalError("fit: diverged at step " + std::to_string(s) +
                           ": " + e.what());
    }
    theta -= config.learning_rate * grad;
  }
  out.params = unpack_params(theta, init.config);
  if (config.steps > 0) {
    const double final_loss = batch_loss(out.params, config.batch);
    if (!std::isfinite(final_loss))
      throw NumericalError("fit: loss diverged at step " +
                           std::to_string(config.steps));
    out.history.emplace_back(config.steps, final_loss);
  }
  return out;
}

}  // namespace dmrnn
