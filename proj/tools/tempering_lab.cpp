// tempering-lab: batch driver for the verification library.
//
// Exit codes: 0 success, 1 a checked inequality failed, 2 invalid input,
// 3 state or iteration budget exceeded, 70 unexpected internal error.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "tempering/error.hpp"
#include "tempering/hardness.hpp"
#include "tempering/io.hpp"
#include "tempering/kernels.hpp"
#include "tempering/lower_bound.hpp"
#include "tempering/paths.hpp"
#include "tempering/sampler.hpp"
#include "tempering/spectral.hpp"

using namespace tempering;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitBudget = 3;
constexpr int kExitInternal = 70;

struct RunConfig {
  std::string input;
  int L = -1;
  int m = 2;
  std::uint64_t seed = 1;
  Index budget_states = kDefaultEnumerationBudget;
  double tol = 1e-8;
  std::string format = "json";
  std::string out;

  std::string kernel = "pt";
  std::string proposal = "uniform";
  int atoms_per_mode = 2;
  Index N = 10000;
  Index burn_in = 0;
  bool all_levels = false;
  int level = -1;
  int mode = -1;
  int kstar = -1;
  std::string lambda;
};

void validate(const RunConfig& cfg) {
  require(cfg.budget_states > 0, "--budget-states must be positive");
  require(cfg.tol > 0.0 && cfg.tol < 1.0, "--tol must lie in (0, 1)");
  require(cfg.format == "json" || cfg.format == "csv", "--format must be json or csv");
  require(cfg.m >= 1, "--m must be at least 1");
  require(cfg.atoms_per_mode >= 1, "--atoms-per-mode must be at least 1");
}

void apply_thread_cap() {
  const char* env = std::getenv("TEMPERING_LAB_THREADS");
  if (!env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  require(end != env && *end == '\0' && n >= 1, "TEMPERING_LAB_THREADS must be a positive integer");
  Eigen::setNbThreads(static_cast<int>(n));
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(cfg.out);
  require(static_cast<bool>(file), "cannot write '" + cfg.out + "'");
  file << text;
}

void emit_json(const RunConfig& cfg, const json& doc) { emit(cfg, doc.dump(2) + "\n"); }

TemperedFamily family_from(const RunConfig& cfg) {
  if (!cfg.input.empty()) return load_family(cfg.input);
  require(cfg.L >= 0, "give --input or --L (with --m, --seed) for a random family");
  RandomFamilySpec spec;
  spec.num_modes = cfg.m;
  spec.L = cfg.L;
  spec.atoms_per_mode = cfg.atoms_per_mode;
  return random_family(spec, cfg.seed);
}

SparseMatrix proposal_from(const std::string& name, const TemperedFamily& family) {
  const Index n = family.num_atoms();
  if (name == "uniform") return uniform_proposal(n);
  if (name == "ring") return ring_proposal(n);
  if (name == "within-mode") return within_mode_proposal(family.target());
  if (name == "identity") return identity_proposal(n);
  throw ArgumentError("unknown proposal '" + name + "'");
}

StochasticMatrix kernel_from(const RunConfig& cfg, std::string& source) {
  if (cfg.kernel == "constrained") {
    require(cfg.L >= 1, "--kernel constrained needs --L >= 1");
    source = "hard-instance";
    return constrained_projected_chain(build_hard_instance(cfg.L)).kernel;
  }
  if (!cfg.input.empty()) {
    const json doc = read_json_file(cfg.input);
    if (doc.contains("matrix")) {
      source = "matrix";
      return parse_kernel(doc);
    }
  }
  const TemperedFamily family = family_from(cfg);
  source = cfg.input.empty() ? "random-family" : "family";
  const Index budget = cfg.budget_states;
  if (cfg.kernel == "P1") return aux_chain_P1(family, budget);
  if (cfg.kernel == "P2") return aux_chain_P2(family, budget);
  if (cfg.kernel == "swap") return swap_kernel(family, budget);
  const auto levels = level_kernels(family, proposal_from(cfg.proposal, family));
  const StochasticMatrix update = product_update_kernel(family, levels, budget);
  if (cfg.kernel == "update") return update;
  if (cfg.kernel == "pt" || cfg.kernel == "projected") {
    const StochasticMatrix pt =
        family.L() >= 1 ? pt_kernel(update, swap_kernel(family, budget)) : update;
    if (cfg.kernel == "pt") return pt;
    const auto labels = assignment_labels(family, budget);
    const StateCodec codec = assignment_codec(family, budget);
    return project(pt, labels, static_cast<int>(codec.size()), codec);
  }
  throw ArgumentError("unknown kernel '" + cfg.kernel + "'");
}

int cmd_gap(const RunConfig& cfg) {
  std::string source;
  const StochasticMatrix kernel = kernel_from(cfg, source);
  if (kernel.size() > cfg.budget_states) throw BudgetError("kernel exceeds --budget-states");
  SpectralOptions opts;
  const SpectrumReport report = spectral_gap(kernel, opts);
  if (cfg.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "kernel,states,gap,second_eigenvalue,method,residual,iterations\n"
       << cfg.kernel << ',' << kernel.size() << ',' << report.gap << ','
       << report.second_eigenvalue << ',' << to_string(report.method) << ',' << report.residual
       << ',' << report.iterations << '\n';
    emit(cfg, os.str());
  } else {
    json doc = report;
    doc["kernel"] = cfg.kernel;
    doc["source"] = source;
    doc["states"] = kernel.size();
    emit_json(cfg, doc);
  }
  return kExitOk;
}

int cmd_verify_lower(const RunConfig& cfg) {
  const TemperedFamily family = family_from(cfg);
  LowerBoundOptions opts;
  opts.budget = cfg.budget_states;
  opts.tolerance = cfg.tol;
  const LowerBoundReport report =
      verify_lower_bound(family, proposal_from(cfg.proposal, family), opts);
  emit_json(cfg, report);
  return report.passed ? kExitOk : kExitCheckFailed;
}

int cmd_verify_upper(const RunConfig& cfg) {
  require(cfg.L >= 1, "--L must be at least 1");
  const HardInstance inst = build_hard_instance(cfg.L);
  // Largest L whose (L+1)! states fit the budget, capped at the default.
  int max_L = 0;
  Index states = 1;
  while (max_L < kMaxConstrainedL) {
    states *= max_L + 2;
    if (states > cfg.budget_states) break;
    ++max_L;
  }
  CertificateOptions opts;
  opts.max_L = max_L;
  opts.gap_tolerance = cfg.tol;
  const ModeMassReport masses = verify_mode_mass_bounds(inst);
  const BottleneckReport bottleneck = verify_bottleneck_bound(inst);
  const CertificateReport cert = certificate(inst, opts);
  const bool passed = masses.passed && bottleneck.passed && cert.passed;
  emit_json(cfg, {{"L", cfg.L},
                  {"mode_mass_bounds", masses},
                  {"bottleneck", bottleneck},
                  {"certificate", cert},
                  {"passed", passed}});
  return passed ? kExitOk : kExitCheckFailed;
}

ProductAssignment parse_lambda(const std::string& text, int m, int L) {
  ProductAssignment lambda;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      lambda.push_back(std::stoi(item));
    } catch (const std::logic_error&) {
      throw ArgumentError("--lambda must be comma-separated mode indices");
    }
  }
  require(static_cast<int>(lambda.size()) == L + 1, "--lambda needs L+1 entries");
  for (int k : lambda) require(k >= 0 && k < m, "--lambda entry out of range");
  return lambda;
}

int cmd_paths(const RunConfig& cfg) {
  std::optional<TemperedFamily> family;
  if (!cfg.input.empty()) family = load_family(cfg.input);
  const int L = family ? family->L() : cfg.L;
  const int m = family ? family->num_modes() : cfg.m;
  require(L >= 0, "give --input or --L");
  const int kstar = cfg.kstar >= 0 ? cfg.kstar : (family ? k_star(*family) : 0);
  require(kstar < m, "--kstar out of range");

  if (cfg.level >= 0) {
    require(cfg.level <= L, "--i out of range");
    ProductAssignment lambda;
    if (cfg.lambda.empty()) {
      RandomStream rng(cfg.seed, 0);
      for (int i = 0; i <= L; ++i) lambda.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(m))));
    } else {
      lambda = parse_lambda(cfg.lambda, m, L);
    }
    const int k = cfg.mode >= 0 ? cfg.mode : (lambda[static_cast<size_t>(cfg.level)] + 1) % m;
    require(k < m, "--k out of range");
    const MoveSequence seq = level0_path(lambda, cfg.level, k, kstar);
    const auto states = path_states(lambda, seq.moves, m);
    if (cfg.format == "csv") {
      std::ostringstream os;
      os << "step,kind,index,state\n";
      for (size_t s = 0; s < seq.moves.size(); ++s) {
        const Move& mv = seq.moves[s];
        os << s + 1 << ',' << (mv.kind == Move::Kind::kAdjSwap ? "AdjSwap" : "SetLevel0") << ','
           << mv.index << ',';
        for (size_t j = 0; j < states[s + 1].size(); ++j) os << (j ? " " : "") << states[s + 1][j];
        os << '\n';
      }
      emit(cfg, os.str());
    } else {
      emit_json(cfg, {{"lambda", lambda},
                      {"i", cfg.level},
                      {"k", k},
                      {"kstar", kstar},
                      {"moves", seq.moves},
                      {"states", states},
                      {"length", seq.moves.size()},
                      {"max_divergence", max_divergence(lambda, seq.moves, m)}});
    }
    return kExitOk;
  }

  json lengths = json::array();
  for (int i = 1; i <= L; ++i) {
    lengths.push_back({{"i", i}, {"F", path_length_F(i)}, {"level0_length", 3 + 2 * path_length_F(i)}});
  }
  json divergence = json::array();
  for (int ell = 1; ell <= L; ++ell) divergence.push_back({{"ell", ell}, {"D", divergence_D(ell)}});
  MultiplicityLimits limits;
  json doc = {{"L", L}, {"m", m}, {"kstar", kstar}, {"lengths", lengths}, {"swap_divergence", divergence}};
  bool passed = true;
  if (m <= limits.max_modes && L <= limits.max_L) {
    const MultiplicityReport mult = edge_multiplicity_check(m, L, kstar, limits);
    doc["multiplicity"] = mult;
    passed = passed && mult.passed;
  } else {
    doc["multiplicity"] = nullptr;
  }
  if (family) {
    const MassRatioReport ratio = path_mass_ratio_check(*family, cfg.tol, cfg.budget_states);
    const CongestionReport cong = congestion(aux_chain_P1(*family, cfg.budget_states),
                                             aux_chain_P2(*family, cfg.budget_states),
                                             canonical_paths(*family, cfg.budget_states));
    doc["mass_ratio"] = ratio;
    doc["congestion"] = cong;
    passed = passed && ratio.passed;
  }
  doc["passed"] = passed;
  emit_json(cfg, doc);
  return passed ? kExitOk : kExitCheckFailed;
}

int cmd_instance_export(const RunConfig& cfg) {
  emit_json(cfg, instance_to_json(build_hard_instance(cfg.L)));
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg) {
  const TemperedFamily family = family_from(cfg);
  require(cfg.N >= 1, "--N must be at least 1");
  if (cfg.N * (family.L() + 1) > cfg.budget_states * 10) {
    throw BudgetError("trace would exceed the iteration budget");
  }
  const SparseMatrix proposal = proposal_from(cfg.proposal, family);
  const PTTrace trace = run_parallel_tempering(family, std::span(&proposal, 1), cfg.N, cfg.seed);
  require(cfg.burn_in < cfg.N, "--burn-in must be below --N");
  json summary = trace_summary(trace, family);
  summary["burn_in"] = cfg.burn_in;
  summary["proposal"] = cfg.proposal;
  const VectorXd target = family.levels().row(family.L()).transpose();
  if (cfg.all_levels) {
    const VectorXd mean = family.levels().colwise().mean().transpose();
    summary["empirical_tv_all_levels"] = empirical_tv(trace, mean, cfg.burn_in, true);
  }
  summary["empirical_tv"] = empirical_tv(trace, target, cfg.burn_in);

  std::ostringstream csv;
  write_trace_csv(csv, trace, cfg.all_levels);
  if (cfg.out.empty()) {
    std::cout << (cfg.format == "csv" ? csv.str() : summary.dump(2) + "\n");
    return kExitOk;
  }
  std::ofstream trace_file(cfg.out + ".csv");
  std::ofstream summary_file(cfg.out + ".json");
  require(trace_file && summary_file, "cannot write '" + cfg.out + ".{csv,json}'");
  trace_file << csv.str();
  summary_file << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_f_oracle(const RunConfig& cfg) {
  require(cfg.L >= 1, "--L must be at least 1");
  json rows = json::array();
  bool passed = true;
  int previous = 0;
  for (int L = 1; L <= cfg.L; ++L) {
    const FOracleResult r = min_divergence_f(L, -1, cfg.budget_states);
    const int floor_log = static_cast<int>(std::floor(std::log2(L)));
    const bool ok = r.f >= floor_log && r.f >= previous;
    passed = passed && ok;
    previous = r.f;
    json row = r;
    row["floor_log2_L"] = floor_log;
    row["passed"] = ok;
    rows.push_back(row);
  }
  emit_json(cfg, {{"results", rows}, {"passed", passed}});
  return passed ? kExitOk : kExitCheckFailed;
}

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--input", cfg.input, "family or kernel JSON");
  cmd->add_option("--L", cfg.L, "number of levels minus one");
  cmd->add_option("--m", cfg.m, "number of modes for generated families");
  cmd->add_option("--seed", cfg.seed, "random seed");
  cmd->add_option("--budget-states", cfg.budget_states, "state-space cap");
  cmd->add_option("--tol", cfg.tol, "tolerance for inequality checks");
  cmd->add_option("--format", cfg.format, "json or csv");
  cmd->add_option("--out", cfg.out, "output path (stdout when absent)");
  cmd->add_option("--proposal", cfg.proposal, "uniform | ring | within-mode | identity");
  cmd->add_option("--atoms-per-mode", cfg.atoms_per_mode, "atoms per mode in generated families");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral-gap verification lab for parallel tempering"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* gap = app.add_subcommand("gap", "spectral gap of a kernel");
  add_common(gap, cfg);
  gap->add_option("--kernel", cfg.kernel, "pt | update | swap | projected | P1 | P2 | constrained");

  auto* lower = app.add_subcommand("verify-lower", "comparison and borrowed gap inequalities");
  add_common(lower, cfg);

  auto* upper = app.add_subcommand("verify-upper", "hard-instance certificate");
  add_common(upper, cfg);

  auto* paths = app.add_subcommand("paths", "canonical paths and their statistics");
  add_common(paths, cfg);
  paths->add_option("--i", cfg.level, "level of the target move; prints that single path");
  paths->add_option("--k", cfg.mode, "new mode at level i");
  paths->add_option("--kstar", cfg.kstar, "parking mode k*");
  paths->add_option("--lambda", cfg.lambda, "start assignment, e.g. 0,1,0");

  auto* instance = app.add_subcommand("instance", "hard instance tables");
  instance->require_subcommand(1);
  auto* exp = instance->add_subcommand("export", "exact mode masses as JSON");
  add_common(exp, cfg);

  auto* simulate = app.add_subcommand("simulate", "run the parallel tempering sampler");
  add_common(simulate, cfg);
  simulate->add_option("--N", cfg.N, "iterations");
  simulate->add_option("--burn-in", cfg.burn_in, "iterations dropped from diagnostics");
  simulate->add_flag("--all-levels", cfg.all_levels, "trace and diagnose every level");

  auto* foracle = app.add_subcommand("f-oracle", "minimax divergence f(1..L)");
  add_common(foracle, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    validate(cfg);
    apply_thread_cap();
    if (*gap) return cmd_gap(cfg);
    if (*lower) return cmd_verify_lower(cfg);
    if (*upper) return cmd_verify_upper(cfg);
    if (*paths) return cmd_paths(cfg);
    if (*exp) return cmd_instance_export(cfg);
    if (*simulate) return cmd_simulate(cfg);
    if (*foracle) return cmd_f_oracle(cfg);
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const ArgumentError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ContractError& e) {
    std::cerr << "contract violation: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInvalid;
}
