// serialize.hpp: JSON wire formats and text-file I/O.
//
// Matrix scheme: a square complex matrix is {dim, re, im} with row-major
// double arrays; all composite objects reuse it. Doubles round-trip exactly
// (nlohmann emits shortest-exact representations), and object keys
// serialize in sorted order, so identical values produce identical bytes.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmrnn/matcore.hpp"
#include "dmrnn/measurement.hpp"
#include "dmrnn/model.hpp"
#include "dmrnn/qchannel.hpp"
#include "dmrnn/qstate.hpp"
#include "dmrnn/train.hpp"

namespace dmrnn {

using Json = nlohmann::json;

// {dim, re: [...], im: [...]} row-major; square matrices only.
Json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);

Json density_to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const Json& j);  // re-validates

// {dim, K, ops: [matrix...]}
Json kraus_to_json(const KrausSet& k);
KrausSet kraus_from_json(const Json& j, double tol = 1e-6);

// {dim, mat: matrix} where mat is d² x d².
Json choi_to_json(const ChoiMatrix& c);
ChoiMatrix choi_from_json(const Json& j);

// {dim, vocab: [token...], elements: [matrix...]}
Json povm_to_json(const Povm& p, const std::vector<std::string>& vocab);
Povm povm_from_json(const Json& j, double tol = 1e-6);

// Model checkpoint, schema tag "dmrnn-v1":
// {schema, config: {d, m, vocab, K, eps, seed}, embeddings, generator:
//  {weight, bias}, povm_aux: [matrix...]}.
Json checkpoint_to_json(const ModelParams& params);
ModelParams params_from_checkpoint(const Json& j);

// Training run description (flat JSON object): required keys d, m, vocab,
// K, eps, seed, learning_rate, steps, data; optional fd_step (1e-5) and
// log_every (10). Unknown keys are rejected so typos fail fast. Sequences
// in `data` are lists of vocab tokens.
struct TrainRun {
  ModelConfig model;
  TrainConfig train;
};

TrainRun train_run_from_json(const Json& j);

// One token per line, UTF-8, exact match against the vocabulary;
// '#'-prefixed lines are comments and blank lines are skipped.
std::vector<std::string> read_token_file(const std::filesystem::path& path);

// Maps tokens to vocabulary indices; on failure reports the 1-based
// position of the offending token.
std::vector<int> tokens_to_indices(const std::vector<std::string>& tokens,
                                   const std::vector<std::string>& vocab);

// Shortest text that parses back to exactly this double (%.17g).
std::string format_g17(double x);

Json load_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

}  // namespace dmrnn
