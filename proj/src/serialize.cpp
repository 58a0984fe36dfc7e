#include "dmrnn/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace dmrnn {

namespace {

std::vector<double> part_row_major(const CMatrix& m, bool real) {
  std::vector<double> out;
  out.reserve(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out.push_back(real ? m(r, c).real() : m(r, c).imag());
  return out;
}

const Json& require_key(const Json& j, const char* key) {
  if (!j.contains(key))
    throw ConfigError(std::string("missing key \"") + key + "\"");
  return j.at(key);
}

}  // namespace

Json matrix_to_json(const CMatrix& m) {
  if (m.rows() != m.cols())
    throw DimensionError("matrix_to_json: square matrices only");
  return Json{{"dim", m.rows()},
              {"re", part_row_major(m, true)},
              {"im", part_row_major(m, false)}};
}

CMatrix matrix_from_json(const Json& j) {
  const auto dim = require_key(j, "dim").get<Eigen::Index>();
  if (dim < 1 || dim > kMaxDim) throw ConfigError("matrix: bad dim");
  const auto re = require_key(j, "re").get<std::vector<double>>();
  const auto im = require_key(j, "im").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(re.size()) != dim * dim ||
      static_cast<Eigen::Index>(im.size()) != dim * dim)
    throw ConfigError("matrix: re/im length must be dim²");
  CMatrix m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c)
      m(r, c) = Complex(re[r * dim + c], im[r * dim + c]);
  return m;
}

Json density_to_json(const DensityMatrix& rho) {
  return matrix_to_json(rho.mat());
}

DensityMatrix density_from_json(const Json& j) {
  return validate_density(matrix_from_json(j));
}

Json kraus_to_json(const KrausSet& k) {
  Json ops = Json::array();
  for (const CMatrix& op : k.ops()) ops.push_back(matrix_to_json(op));
  return Json{{"dim", k.dim()}, {"K", k.count()}, {"ops", std::move(ops)}};
}

KrausSet kraus_from_json(const Json& j, double tol) {
  const auto dim = require_key(j, "dim").get<int>();
  const auto count = require_key(j, "K").get<std::size_t>();
  const Json& ops_json = require_key(j, "ops");
  if (!ops_json.is_array() || ops_json.size() != count)
    throw ConfigError("kraus: ops must be an array of length K");
  std::vector<CMatrix> ops;
  ops.reserve(count);
  for (const Json& op : ops_json) {
    ops.push_back(matrix_from_json(op));
    if (ops.back().rows() != dim) throw ConfigError("kraus: op dim mismatch");
  }
  return KrausSet::create(std::move(ops), tol);
}

Json choi_to_json(const ChoiMatrix& c) {
  return Json{{"dim", c.dim}, {"mat", matrix_to_json(c.mat)}};
}

ChoiMatrix choi_from_json(const Json& j) {
  const auto dim = require_key(j, "dim").get<int>();
  CMatrix mat = matrix_from_json(require_key(j, "mat"));
  if (mat.rows() != static_cast<Eigen::Index>(dim) * dim)
    throw ConfigError("choi: mat must be dim² x dim²");
  return ChoiMatrix{dim, std::move(mat)};
}

Json povm_to_json(const Povm& p, const std::vector<std::string>& vocab) {
  if (static_cast<int>(vocab.size()) != p.vocab_size())
    throw DimensionError("povm_to_json: vocab size mismatch");
  Json elements = Json::array();
  for (const CMatrix& m : p.elements()) elements.push_back(matrix_to_json(m));
  return Json{{"dim", p.dim()}, {"vocab", vocab},
              {"elements", std::move(elements)}};
}

Povm povm_from_json(const Json& j, double tol) {
  const auto dim = require_key(j, "dim").get<int>();
  const Json& elements_json = require_key(j, "elements");
  if (!elements_json.is_array() || elements_json.empty())
    throw ConfigError("povm: elements must be a nonempty array");
  std::vector<CMatrix> elements;
  for (const Json& e : elements_json) {
    elements.push_back(matrix_from_json(e));
    if (elements.back().rows() != dim)
      throw ConfigError("povm: element dim mismatch");
  }
  return Povm::create(std::move(elements), tol);
}

namespace {

Json config_to_json(const ModelConfig& c) {
  return Json{{"d", c.d},     {"m", c.m},     {"vocab", c.vocab},
              {"K", c.k},     {"eps", c.eps}, {"seed", c.seed}};
}

ModelConfig config_from_json(const Json& j) {
  ModelConfig c;
  c.d = require_key(j, "d").get<int>();
  c.m = require_key(j, "m").get<int>();
  c.vocab = require_key(j, "vocab").get<std::vector<std::string>>();
  c.k = require_key(j, "K").get<int>();
  c.eps = require_key(j, "eps").get<double>();
  c.seed = require_key(j, "seed").get<std::uint64_t>();
  c.validate();
  return c;
}

std::vector<double> json_to_doubles(const Json& j) {
  return j.get<std::vector<double>>();
}

}  // namespace

Json checkpoint_to_json(const ModelParams& params) {
  Json embeddings = Json::array();
  for (int v = 0; v < params.config.vocab_size(); ++v) {
    std::vector<double> row(params.config.m);
    for (int c = 0; c < params.config.m; ++c)
      row[c] = params.embeddings.vectors(v, c);
    embeddings.push_back(row);
  }
  Json weight = Json::array();
  for (Eigen::Index r = 0; r < params.generator.weight.rows(); ++r) {
    std::vector<double> row(params.generator.weight.cols());
    for (Eigen::Index c = 0; c < params.generator.weight.cols(); ++c)
      row[c] = params.generator.weight(r, c);
    weight.push_back(row);
  }
  std::vector<double> bias(params.generator.bias.size());
  for (Eigen::Index i = 0; i < params.generator.bias.size(); ++i)
    bias[i] = params.generator.bias[i];
  Json aux = Json::array();
  for (const CMatrix& a : params.povm_aux) aux.push_back(matrix_to_json(a));
  return Json{{"schema", "dmrnn-v1"},
              {"config", config_to_json(params.config)},
              {"embeddings", std::move(embeddings)},
              {"generator", Json{{"weight", std::move(weight)},
                                 {"bias", std::move(bias)}}},
              {"povm_aux", std::move(aux)}};
}

ModelParams params_from_checkpoint(const Json& j) {
  if (!j.contains("schema") || j.at("schema") != "dmrnn-v1")
    throw ConfigError("checkpoint: expected schema tag \"dmrnn-v1\"");
  ModelParams p;
  p.config = config_from_json(require_key(j, "config"));
  const int v_count = p.config.vocab_size();
  const int out_dim = p.config.generator_out();

  const Json& emb = require_key(j, "embeddings");
  if (!emb.is_array() || static_cast<int>(emb.size()) != v_count)
    throw ConfigError("checkpoint: embeddings must have one row per token");
  p.embeddings.vectors = RMatrix(v_count, p.config.m);
  for (int v = 0; v < v_count; ++v) {
    const auto row = json_to_doubles(emb.at(v));
    if (static_cast<int>(row.size()) != p.config.m)
      throw ConfigError("checkpoint: embedding row length != m");
    for (int c = 0; c < p.config.m; ++c) p.embeddings.vectors(v, c) = row[c];
  }

  const Json& gen = require_key(j, "generator");
  const Json& weight = require_key(gen, "weight");
  if (!weight.is_array() || static_cast<int>(weight.size()) != out_dim)
    throw ConfigError("checkpoint: generator weight must have 2d²K rows");
  p.generator.weight = RMatrix(out_dim, p.config.m);
  for (int r = 0; r < out_dim; ++r) {
    const auto row = json_to_doubles(weight.at(r));
    if (static_cast<int>(row.size()) != p.config.m)
      throw ConfigError("checkpoint: generator weight row length != m");
    for (int c = 0; c < p.config.m; ++c) p.generator.weight(r, c) = row[c];
  }
  const auto bias = json_to_doubles(require_key(gen, "bias"));
  if (static_cast<int>(bias.size()) != out_dim)
    throw ConfigError("checkpoint: generator bias length != 2d²K");
  p.generator.bias = RVector(out_dim);
  for (int i = 0; i < out_dim; ++i) p.generator.bias[i] = bias[i];

  const Json& aux = require_key(j, "povm_aux");
  if (!aux.is_array() || static_cast<int>(aux.size()) != v_count)
    throw ConfigError("checkpoint: povm_aux must have one matrix per token");
  for (const Json& a : aux) {
    p.povm_aux.push_back(matrix_from_json(a));
    if (p.povm_aux.back().rows() != p.config.d)
      throw ConfigError("checkpoint: povm_aux dim mismatch");
  }
  return p;
}

TrainRun train_run_from_json(const Json& j) {
  static const std::set<std::string> known = {
      "d",    "m",     "vocab",         "K",     "eps",  "seed",
      "data", "steps", "learning_rate", "fd_step", "log_every"};
  if (!j.is_object()) throw ConfigError("train config: expected an object");
  for (const auto& [key, value] : j.items())
    if (!known.contains(key))
      throw ConfigError("train config: unknown key \"" + key + "\"");

  TrainRun run;
  run.model = config_from_json(j);
  run.train.learning_rate = require_key(j, "learning_rate").get<double>();
  run.train.steps = require_key(j, "steps").get<long>();
  run.train.fd_step = j.value("fd_step", 1e-5);
  run.train.log_every = j.value("log_every", 10L);
  run.train.seed = run.model.seed;

  const Json& data = require_key(j, "data");
  if (!data.is_array() || data.empty())
    throw ConfigError("train config: data must be a nonempty array");
  for (const Json& seq_json : data) {
    const auto tokens = seq_json.get<std::vector<std::string>>();
    run.train.batch.push_back(tokens_to_indices(tokens, run.model.vocab));
  }
  run.train.validate();
  return run;
}

std::vector<std::string> read_token_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open token file " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    tokens.push_back(line);
  }
  return tokens;
}

std::vector<int> tokens_to_indices(const std::vector<std::string>& tokens,
                                   const std::vector<std::string>& vocab) {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto it = std::find(vocab.begin(), vocab.end(), tokens[i]);
    if (it == vocab.end())
      throw Error("unknown token \"" + tokens[i] + "\" at position " +
                  std::to_string(i + 1));
    out.push_back(static_cast<int>(it - vocab.begin()));
  }
  return out;
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace dmrnn
