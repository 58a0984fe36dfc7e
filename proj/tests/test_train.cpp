#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "dmrnn/train.hpp"
#include "test_helpers.hpp"

using namespace dmrnn;
using namespace dmrnn::testing;

namespace {

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.d = 2;
  cfg.m = 2;
  cfg.vocab = {"A", "B"};
  cfg.k = 4;
  cfg.eps = 1e-6;
  cfg.seed = 31;
  return cfg;
}

std::vector<std::vector<int>> tiny_batch() {
  return {{0, 1, 0, 1, 0, 1}, {1, 0, 1, 0}};
}

}  // namespace

TEST_CASE("pack and unpack are exact inverses") {
  const ModelParams p = init_params(tiny_config());
  const RVector theta = pack_params(p);
  CHECK(theta.size() == packed_size(p.config));
  const ModelParams q = unpack_params(theta, p.config);
  CHECK((pack_params(q) - theta).norm() == 0.0);
  CHECK((q.embeddings.vectors - p.embeddings.vectors).norm() == 0.0);
  CHECK((q.generator.weight - p.generator.weight).norm() == 0.0);
  for (int v = 0; v < p.config.vocab_size(); ++v)
    CHECK((q.povm_aux[v] - p.povm_aux[v]).norm() == 0.0);
  CHECK_THROWS_AS(unpack_params(RVector::Zero(3), p.config), DimensionError);
}

TEST_CASE("parameters with no influence have exactly zero gradient") {
  const ModelParams p = init_params(tiny_config());
  const std::vector<std::vector<int>> batch = {{0, 0, 0}};  // token B absent
  const RVector grad = fd_gradient(p, batch, 1e-5);
  // embedding row of token B occupies coordinates [m, 2m)
  for (int j = 0; j < p.config.m; ++j)
    CHECK(grad[p.config.m + j] == 0.0);
  // ... and some coordinate that does matter moves the loss
  CHECK(grad.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("central differences agree across step sizes") {
  const ModelParams p = init_params(tiny_config());
  const auto batch = tiny_batch();
  const RVector g4 = fd_gradient(p, batch, 1e-4);
  const RVector g5 = fd_gradient(p, batch, 1e-5);
  for (long i = 0; i < g4.size(); ++i) {
    const double diff = std::abs(g4[i] - g5[i]);
    const double allowed = std::max(1e-4, 0.01 * std::abs(g5[i]));
    CHECK(diff <= allowed);
  }
}

TEST_CASE("the gradient direction reduces the loss") {
  const ModelParams p = init_params(tiny_config());
  const auto batch = tiny_batch();
  const double before = batch_loss(p, batch);
  const RVector grad = fd_gradient(p, batch, 1e-5);
  const RVector theta = pack_params(p) - 0.05 * grad;
  const double after = batch_loss(unpack_params(theta, p.config), batch);
  CHECK(after < before);
}

TEST_CASE("gradient is invariant under batch reordering") {
  const ModelParams p = init_params(tiny_config());
  auto batch = tiny_batch();
  const RVector g1 = fd_gradient(p, batch, 1e-5);
  std::reverse(batch.begin(), batch.end());
  const RVector g2 = fd_gradient(p, batch, 1e-5);
  CHECK((g1 - g2).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("fit with zero steps is a no-op with empty history") {
  const ModelParams p = init_params(tiny_config());
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.steps = 0;
  cfg.batch = tiny_batch();
  const FitResult res = fit(p, cfg);
  CHECK(res.history.empty());
  CHECK((pack_params(res.params) - pack_params(p)).norm() == 0.0);
}

TEST_CASE("fit is deterministic and reduces loss on the cyclic task") {
  const ModelParams p = init_params(tiny_config());
  TrainConfig cfg;
  cfg.learning_rate = 0.3;
  cfg.steps = 8;
  cfg.log_every = 2;
  cfg.batch = {{0, 1, 0, 1, 0, 1, 0, 1}};
  const FitResult a = fit(p, cfg);
  const FitResult b = fit(p, cfg);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].first == b.history[i].first);
    CHECK(a.history[i].second == b.history[i].second);
  }
  CHECK((pack_params(a.params) - pack_params(b.params)).norm() == 0.0);
  // history rows: steps 0,2,4,6 pre-update plus the final row at 8
  REQUIRE(a.history.size() == 5);
  CHECK(a.history.front().first == 0);
  CHECK(a.history.back().first == 8);
  CHECK(a.history.back().second < a.history.front().second);
  // every iterate still drives valid forward passes
  CHECK(std::isfinite(batch_loss(a.params, cfg.batch)));
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  cfg.batch = tiny_batch();
  CHECK_NOTHROW(cfg.validate());
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = TrainConfig{};
  cfg.batch = {};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = TrainConfig{};
  cfg.batch = {{0}, {}};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
