#include "dmrnn/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "dmrnn/rng.hpp"
#include "dmrnn/serialize.hpp"
#include "dmrnn/train.hpp"

namespace dmrnn {

namespace {

// Stable per-trial seeds: splitmix64 of (base, index) so one failing trial
// reproduces without replaying the stream before it.
std::uint64_t trial_seed(std::uint64_t base, long trial) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(trial) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct SuiteResult {
  std::string name;
  long passed = 0;
  long total = 0;
  std::string worst_label;
  double worst = 0.0;
  std::optional<std::uint64_t> first_failure_seed;

  bool ok() const { return passed == total; }
};

void print_suite(std::ostream& out, const SuiteResult& s) {
  out << "suite " << s.name << ": " << s.passed << "/" << s.total << " pass"
      << "  worst " << s.worst_label << " " << format_g17(s.worst);
  if (s.first_failure_seed)
    out << "  first failure seed " << *s.first_failure_seed;
  out << "\n";
}

SuiteResult verify_cptp_suite(const VerifyOptions& opt) {
  SuiteResult s{.name = "cptp", .worst_label = "completeness defect"};
  double worst_tp = 0.0, worst_eig = 0.0;
  for (long t = 0; t < opt.trials; ++t) {
    const std::uint64_t seed = trial_seed(opt.seed, t);
    Rng rng(seed);
    ++s.total;
    bool ok = false;
    try {
      const int n = opt.d * opt.d;
      const CMatrix l = random_complex_matrix(n, n, rng);
      const KrausSet k = kraus_from_factor(l, 1e-6);
      s.worst = std::max(s.worst, completeness_defect(k));
      const CptpReport rep = verify_cptp(choi_of_channel(k), opt.tol);
      worst_tp = std::max(worst_tp, rep.tp_defect);
      worst_eig = std::min(worst_eig, rep.min_eigenvalue);
      ok = rep.pass;
    } catch (const Error&) {
      ok = false;
    }
    if (ok)
      ++s.passed;
    else if (!s.first_failure_seed)
      s.first_failure_seed = seed;
  }
  s.worst_label += " (tp defect " + format_g17(worst_tp) + ", min choi eig " +
                   format_g17(worst_eig) + ")";
  return s;
}

SuiteResult verify_povm_suite(const VerifyOptions& opt) {
  SuiteResult s{.name = "povm", .worst_label = "born sum defect"};
  const int vocab = 5;
  double worst_completeness = 0.0;
  for (long t = 0; t < opt.trials; ++t) {
    const std::uint64_t seed = trial_seed(opt.seed ^ 0x90f3ULL, t);
    Rng rng(seed);
    ++s.total;
    bool ok = false;
    try {
      std::vector<CMatrix> aux;
      for (int v = 0; v < vocab; ++v)
        aux.push_back(random_complex_matrix(opt.d, opt.d, rng));
      const Povm povm = povm_from_aux(aux, 1e-6);
      CMatrix sum = CMatrix::Zero(opt.d, opt.d);
      for (const CMatrix& e : povm.elements()) sum += e;
      const double completeness = (sum - CMatrix::Identity(opt.d, opt.d)).norm();
      worst_completeness = std::max(worst_completeness, completeness);
      const DensityMatrix rho = random_density(opt.d, rng);
      const RVector probs = born_probabilities(povm, rho);
      const double sum_defect = std::abs(probs.sum() - 1.0);
      s.worst = std::max(s.worst, sum_defect);
      ok = completeness <= opt.tol && sum_defect <= 1e-10 &&
           probs.minCoeff() >= 0.0;
    } catch (const Error&) {
      ok = false;
    }
    if (ok)
      ++s.passed;
    else if (!s.first_failure_seed)
      s.first_failure_seed = seed;
  }
  s.worst_label += " (completeness " + format_g17(worst_completeness) + ")";
  return s;
}

SuiteResult verify_entropy_suite(const VerifyOptions& opt) {
  SuiteResult s{.name = "entropy", .worst_label = "unitary invariance defect"};
  const double log2d = std::log2(static_cast<double>(opt.d));
  for (long t = 0; t < opt.trials; ++t) {
    const std::uint64_t seed = trial_seed(opt.seed ^ 0xe27, t);
    Rng rng(seed);
    ++s.total;
    bool ok = false;
    try {
      const DensityMatrix rho = random_density(opt.d, rng);
      const double entropy = vne(rho);
      const double p = purity(rho);
      const CMatrix u = random_unitary(opt.d, rng);
      const CMatrix conj = u * rho.mat() * u.adjoint();
      const double rotated = vne(validate_density(conj, 1e-8));
      const double invariance = std::abs(entropy - rotated);
      s.worst = std::max(s.worst, invariance);
      ok = entropy >= 0.0 && entropy <= log2d + 1e-8 &&
           p >= 1.0 / opt.d - 1e-8 && p <= 1.0 + 1e-8 && invariance <= 1e-8;
    } catch (const Error&) {
      ok = false;
    }
    if (ok)
      ++s.passed;
    else if (!s.first_failure_seed)
      s.first_failure_seed = seed;
  }
  return s;
}

SuiteResult verify_qmi_suite(const VerifyOptions& opt) {
  SuiteResult s{.name = "qmi", .worst_label = "negative qmi / product defect"};
  for (long t = 0; t < opt.trials; ++t) {
    const std::uint64_t seed = trial_seed(opt.seed ^ 0x9317, t);
    Rng rng(seed);
    ++s.total;
    bool ok = false;
    try {
      // Joint random state: nonnegativity (raw, before clamping).
      const DensityMatrix rho_ab = random_density(opt.d * opt.d, rng);
      const CMatrix ra = partial_trace(rho_ab.mat(), opt.d, opt.d, Subsystem::A);
      const CMatrix rb = partial_trace(rho_ab.mat(), opt.d, opt.d, Subsystem::B);
      const double raw =
          vne(validate_density(ra)) + vne(validate_density(rb)) - vne(rho_ab);
      // Product state: QMI vanishes.
      const DensityMatrix pa = random_density(opt.d, rng);
      const DensityMatrix pb = random_density(opt.d, rng);
      const double product_qmi = qmi(
          DensityMatrix::unchecked(kron(pa.mat(), pb.mat())), opt.d, opt.d);
      const double defect = std::max(-raw, product_qmi);
      s.worst = std::max(s.worst, defect);
      ok = raw >= -1e-8 && product_qmi <= 1e-8;
    } catch (const Error&) {
      ok = false;
    }
    if (ok)
      ++s.passed;
    else if (!s.first_failure_seed)
      s.first_failure_seed = seed;
  }
  return s;
}

}  // namespace

int cmd_verify(const VerifyOptions& opt, std::ostream& out) {
  if (opt.trials < 1 || opt.d < 1 || opt.d > 16 || !(opt.tol > 0)) {
    out << "verify: require trials >= 1, 1 <= d <= 16, tol > 0\n";
    return kExitUsage;
  }
  const SuiteResult suites[] = {
      verify_cptp_suite(opt), verify_povm_suite(opt),
      verify_entropy_suite(opt), verify_qmi_suite(opt)};
  bool all_ok = true;
  for (const SuiteResult& s : suites) {
    print_suite(out, s);
    all_ok = all_ok && s.ok();
  }
  out << (all_ok ? "verify: all suites passed\n" : "verify: FAILURES\n");
  return all_ok ? kExitOk : kExitFailure;
}

namespace {

KrausSet depolarizing_channel_2d() {
  // Matrix units over sqrt(2): rho -> Tr(rho) I/2.
  const double c = 1.0 / std::sqrt(2.0);
  std::vector<CMatrix> ops;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CMatrix e = CMatrix::Zero(2, 2);
      e(i, j) = c;
      ops.push_back(std::move(e));
    }
  return KrausSet::create(std::move(ops));
}

KrausSet project_to_basis_state(int target) {
  // K_k = |target><k|: every input resolves to the target basis state.
  std::vector<CMatrix> ops;
  for (int k = 0; k < 2; ++k) {
    CMatrix e = CMatrix::Zero(2, 2);
    e(target, k) = 1.0;
    ops.push_back(std::move(e));
  }
  return KrausSet::create(std::move(ops));
}

void demo_ambiguity(const std::filesystem::path& dir) {
  CVector start(2);
  start << 1.0, 0.0;
  std::vector<DensityMatrix> trajectory;
  trajectory.push_back(pure_from_vector(start));
  trajectory.push_back(apply_channel(depolarizing_channel_2d(), trajectory.back()));
  trajectory.push_back(apply_channel(project_to_basis_state(1), trajectory.back()));
  std::ostringstream csv;
  write_metrics_csv(csv, trajectory_metrics(trajectory));
  write_text_file(dir / "ambiguity.csv", csv.str());
}

void demo_coherence(const std::filesystem::path& dir) {
  const DensityMatrix mix = maximally_mixed(2);
  CVector plus(2);
  plus << 1.0, 1.0;
  const DensityMatrix sup = pure_from_vector(plus);

  std::ostringstream metrics;
  metrics << "state,vne_bits,purity\n";
  metrics << "mix," << format_g17(vne(mix)) << ',' << format_g17(purity(mix))
          << "\n";
  metrics << "sup," << format_g17(vne(sup)) << ',' << format_g17(purity(sup))
          << "\n";
  write_text_file(dir / "coherence_metrics.csv", metrics.str());

  // Diagonal-blind vs coherence-sensitive measurements.
  std::vector<CMatrix> comp = {CMatrix::Zero(2, 2), CMatrix::Zero(2, 2)};
  comp[0](0, 0) = 1.0;
  comp[1](1, 1) = 1.0;
  const Povm computational = Povm::create(std::move(comp));
  CVector minus(2);
  minus << 1.0, -1.0;
  const CMatrix pp = pure_from_vector(plus).mat();
  const CMatrix mm = pure_from_vector(minus).mat();
  const Povm plusminus = Povm::create({pp, mm});

  std::ostringstream table;
  table << "basis,state,p0,p1\n";
  const auto row = [&](const char* basis, const char* state, const Povm& povm,
                       const DensityMatrix& rho) {
    const RVector p = born_probabilities(povm, rho);
    table << basis << ',' << state << ',' << format_g17(p[0]) << ','
          << format_g17(p[1]) << "\n";
  };
  row("computational", "mix", computational, mix);
  row("computational", "sup", computational, sup);
  row("plusminus", "mix", plusminus, mix);
  row("plusminus", "sup", plusminus, sup);
  write_text_file(dir / "coherence_measurements.csv", table.str());
}

void demo_bell(const std::filesystem::path& dir) {
  CVector zero_zero = CVector::Zero(4);
  zero_zero[0] = 1.0;
  CVector bell = CVector::Zero(4);
  bell[0] = 1.0;
  bell[3] = 1.0;
  std::ostringstream csv;
  csv << "state,qmi_bits\n";
  csv << "separable," << format_g17(qmi(pure_from_vector(zero_zero), 2, 2))
      << "\n";
  csv << "bell," << format_g17(qmi(pure_from_vector(bell), 2, 2)) << "\n";
  write_text_file(dir / "bell.csv", csv.str());
}

}  // namespace

int cmd_demo(const DemoOptions& opt, std::ostream& out) {
  std::error_code ec;
  std::filesystem::create_directories(opt.output_dir, ec);
  if (opt.name == "ambiguity")
    demo_ambiguity(opt.output_dir);
  else if (opt.name == "coherence")
    demo_coherence(opt.output_dir);
  else if (opt.name == "bell")
    demo_bell(opt.output_dir);
  else {
    out << "demo: unknown demo \"" << opt.name
        << "\" (expected ambiguity|coherence|bell)\n";
    return kExitUsage;
  }
  out << "demo " << opt.name << ": wrote " << opt.output_dir.string() << "\n";
  return kExitOk;
}

namespace {

std::string loss_history_csv(const std::vector<std::pair<long, double>>& h) {
  std::ostringstream csv;
  csv << "step,loss\n";
  for (const auto& [step, loss] : h)
    csv << step << ',' << format_g17(loss) << "\n";
  return csv.str();
}

}  // namespace

int cmd_train(const TrainOptions& opt, std::ostream& out) {
  TrainRun run;
  try {
    run = train_run_from_json(load_json_file(opt.config_path));
  } catch (const ConfigError& e) {
    out << "train: " << e.what() << "\n";
    return kExitUsage;
  }
  std::error_code ec;
  std::filesystem::create_directories(opt.output_dir, ec);
  try {
    const ModelParams init = init_params(run.model);
    const FitResult result = fit(init, run.train);
    write_text_file(opt.output_dir / "checkpoint.json",
                    checkpoint_to_json(result.params).dump(2) + "\n");
    write_text_file(opt.output_dir / "loss.csv",
                    loss_history_csv(result.history));
    const double final_loss = result.history.empty()
                                  ? batch_loss(result.params, run.train.batch)
                                  : result.history.back().second;
    const double baseline = std::log(static_cast<double>(run.model.vocab_size()));
    out << "train: final NLL " << format_g17(final_loss)
        << " nats (uniform baseline ln|V| = " << format_g17(baseline) << ")\n";
  } catch (const NumericalError& e) {
    out << "train: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_run(const RunOptions& opt, std::ostream& out) {
  ModelParams params;
  std::vector<std::string> tokens;
  try {
    params = params_from_checkpoint(load_json_file(opt.checkpoint_path));
    tokens = read_token_file(opt.tokens_path);
  } catch (const ConfigError& e) {
    out << "run: " << e.what() << "\n";
    return kExitUsage;
  }
  if (tokens.empty()) {
    out << "run: token file " << opt.tokens_path.string()
        << " contains no tokens\n";
    return kExitUsage;
  }
  if (opt.bipartite) {
    const long prod =
        static_cast<long>(opt.bipartite->d_a) * opt.bipartite->d_b;
    if (prod != params.config.d) {
      out << "run: bipartite dims " << opt.bipartite->d_a << "x"
          << opt.bipartite->d_b << " do not factor d = " << params.config.d
          << "\n";
      return kExitUsage;
    }
  }
  std::vector<int> indices;
  try {
    indices = tokens_to_indices(tokens, params.config.vocab);
  } catch (const Error& e) {
    out << "run: " << e.what() << "\n";
    return kExitFailure;
  }
  std::error_code ec;
  std::filesystem::create_directories(opt.output_dir, ec);

  const ForwardResult fwd = forward(indices, params);
  std::ostringstream probs;
  probs << "t";
  for (const std::string& tok : params.config.vocab) probs << ',' << tok;
  probs << "\n";
  for (std::size_t t = 0; t < fwd.probs.size(); ++t) {
    probs << t;
    for (Eigen::Index v = 0; v < fwd.probs[t].size(); ++v)
      probs << ',' << format_g17(fwd.probs[t][v]);
    probs << "\n";
  }
  write_text_file(opt.output_dir / "probs.csv", probs.str());

  std::optional<BipartiteDims> bipartite;
  if (opt.bipartite) bipartite = *opt.bipartite;
  const auto records = trajectory_metrics(fwd.trajectory, bipartite);
  std::ostringstream metrics;
  write_metrics_csv(metrics, records);
  write_text_file(opt.output_dir / "metrics.csv", metrics.str());
  std::ostringstream jsonl;
  write_metrics_jsonl(jsonl, records);
  write_text_file(opt.output_dir / "metrics.jsonl", jsonl.str());

  out << "run: NLL " << format_g17(nll(indices, params)) << " nats over "
      << indices.size() << " tokens\n";
  return kExitOk;
}

int cmd_bench(const BenchOptions& opt, std::ostream& out) {
  if (opt.d_values.empty() || opt.reps < 1) {
    out << "bench: need at least one d value and reps >= 1\n";
    return kExitUsage;
  }
  for (int d : opt.d_values)
    if (d < 1 || d > 16) {
      out << "bench: d must lie in [1, 16]\n";
      return kExitUsage;
    }
  using Clock = std::chrono::steady_clock;
  out << "d,factor_us,choi_eig_us\n";
  for (int d : opt.d_values) {
    Rng rng(opt.seed);
    const CMatrix l = random_complex_matrix(d * d, d * d, rng);
    // Warm both routes once so allocation noise stays out of the timings.
    kraus_from_factor(l, 1e-6);
    kraus_from_factor_via_choi(l, 1e-6);
    const auto t0 = Clock::now();
    for (long r = 0; r < opt.reps; ++r) kraus_from_factor(l, 1e-6);
    const auto t1 = Clock::now();
    for (long r = 0; r < opt.reps; ++r) kraus_from_factor_via_choi(l, 1e-6);
    const auto t2 = Clock::now();
    const double factor_us =
        std::chrono::duration<double, std::micro>(t1 - t0).count() / opt.reps;
    const double choi_us =
        std::chrono::duration<double, std::micro>(t2 - t1).count() / opt.reps;
    out << d << ',' << format_g17(factor_us) << ',' << format_g17(choi_us)
        << "\n";
  }
  return kExitOk;
}

}  // namespace dmrnn
