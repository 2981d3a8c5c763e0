#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sdicert/catalog.hpp"
#include "sdicert/certify.hpp"
#include "sdicert/io.hpp"
#include "sdicert/kernels.hpp"
#include "sdicert/optimize.hpp"
#include "sdicert/verify.hpp"

using namespace sdicert;
using io::json;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kParse = 2, kInvariant = 3, kBadDistribution = 4, kSizeGuard = 5 };

struct ScoreArgs {
  std::string scenario;
  bool per_input = false;
};

struct CertifyArgs {
  double score = -1.0;
  std::string distribution;
  int n = 0;
  int d = 0;
  double margin = 0.0;
};

struct SweepArgs {
  std::string spec;
  std::string out;
  bool force = false;
};

struct VerifyArgs {
  std::string suite = "paper";
  std::uint64_t seed = 1;
};

struct OptimizeArgs {
  std::string scenario;
  std::string state;
  std::string mode;
  int restarts = 50;
  int max_iter = 300;
  std::uint64_t seed = 1;
  std::string out;
  bool probe = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string p;
  while (std::getline(ss, p, sep)) parts.push_back(p);
  return parts;
}

int to_int(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw io::ParseError("--state: " + what + " must be an integer, got \"" + s + "\"");
  return v;
}

double to_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw io::ParseError("--state: visibility must be a number, got \"" + s + "\"");
  if (!(v >= 0.0 && v <= 1.0)) throw io::ParseError("--state: visibility must lie in [0, 1]");
  return v;
}

/// ghz:n:d, noisy_ghz:n:d:v, w[:v], dicke[:v], maximally_mixed:n:d, max_entangled:d
std::pair<DensityMatrix, GameParams> parse_state_ref(const std::string& ref) {
  const auto f = split(ref, ':');
  const std::string kind = f.empty() ? "" : f[0];
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (f.size() < lo || f.size() > hi) throw io::ParseError("--state: malformed reference \"" + ref + "\"");
  };
  auto guarded = [](int n, int d) {
    if (n < 2 || d < 2) throw io::ParseError("--state: need n >= 2 and d >= 2");
    if (n > 16 || d > 64) throw io::SizeGuardError("--state: (n, d) far outside the size guard");
    GameParams p(n, d);
    io::check_size(p);
    return p;
  };
  using catalog::Visibility;
  if (kind == "ghz") {
    need(3, 3);
    const auto p = guarded(to_int(f[1], "n"), to_int(f[2], "d"));
    return {DensityMatrix(catalog::ghz_state(p.n, p.d)), p};
  }
  if (kind == "noisy_ghz") {
    need(4, 4);
    const auto p = guarded(to_int(f[1], "n"), to_int(f[2], "d"));
    return {catalog::noisy_ghz(p.n, p.d, Visibility(to_real(f[3]))), p};
  }
  if (kind == "w") {
    need(1, 2);
    return {catalog::noisy_w(Visibility(f.size() == 2 ? to_real(f[1]) : 1.0)), GameParams(3, 2)};
  }
  if (kind == "dicke") {
    need(1, 2);
    return {catalog::noisy_dicke(Visibility(f.size() == 2 ? to_real(f[1]) : 1.0)), GameParams(4, 2)};
  }
  if (kind == "maximally_mixed") {
    need(3, 3);
    const auto p = guarded(to_int(f[1], "n"), to_int(f[2], "d"));
    return {DensityMatrix::maximally_mixed(p.outcomes()), p};
  }
  if (kind == "max_entangled") {
    need(2, 2);
    const auto p = guarded(2, to_int(f[1], "d"));
    return {DensityMatrix(catalog::max_entangled(p.d)), p};
  }
  throw io::ParseError("--state: unknown state \"" + kind + "\"");
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

int cmd_score(const ScoreArgs& a) {
  const Strategy s = io::load_scenario(a.scenario);
  const auto r = score(s);
  json out{{"score", r.score}, {"params", {{"n", r.params.n}, {"d", r.params.d}}}};
  if (a.per_input) out["per_input"] = r.per_input_win;
  emit(out);
  return kOk;
}

int cmd_certify(const CertifyArgs& a) {
  const bool has_score = a.score >= 0.0, has_dist = !a.distribution.empty();
  if (has_score == has_dist) throw io::ParseError("certify: give exactly one of --score and --distribution");
  if (a.n < 2 || a.d < 2) throw io::ParseError("certify: need --n >= 2 and --d >= 2");
  if (a.n > 16 || a.d > 64) throw io::SizeGuardError("certify: (n, d) far outside the size guard");
  const GameParams p(a.n, a.d);
  io::check_size(p);
  double value = a.score;
  if (has_dist) {
    std::ifstream in(a.distribution);
    if (!in) throw io::ParseError(a.distribution + ": cannot open file");
    value = score_from_distribution(io::read_distribution_csv(in, p)).score;
  } else if (value > 1.0) {
    throw io::ParseError("--score: must lie in [0, 1]");
  }
  emit(io::certification_to_json(certify(std::clamp(value, 0.0, 1.0), p, a.margin)));
  return kOk;
}

int cmd_sweep(const SweepArgs& a) {
  if (!a.force && std::filesystem::exists(a.out)) {
    std::cerr << "error: " << a.out << " exists; pass --force to overwrite\n";
    return kParse;
  }
  const auto spec = io::parse_sweep(io::read_json_file(a.spec));
  const auto rows = io::run_sweep(spec);
  std::ofstream out(a.out, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + a.out);
  io::write_sweep_csv(rows, out);
  std::cout << "wrote " << rows.size() << " rows to " << a.out << "\n";
  return kOk;
}

int cmd_verify(const VerifyArgs& a) {
  const auto report = verify::run_suite(a.suite, a.seed);
  verify::print_report(report, std::cout);
  return report.passed() ? kOk : kVerifyFailed;
}

int cmd_optimize(const OptimizeArgs& a) {
  if (a.scenario.empty() == a.state.empty()) throw io::ParseError("optimize: give exactly one of a scenario file and --state");
  SeesawConfig cfg;
  cfg.restarts = a.restarts;
  cfg.max_iter = a.max_iter;
  cfg.seed = a.seed;

  std::optional<Strategy> initial;
  std::optional<DensityMatrix> state;
  std::optional<GameParams> params;
  bool unitary_ok = true;
  if (!a.scenario.empty()) {
    initial.emplace(io::load_scenario(a.scenario));
    params.emplace(initial->params());
    for (const auto& fam : initial->channels())
      for (const auto& m : fam.maps()) unitary_ok = unitary_ok && m.rank() == 1 && m.dim_in() == params->d;
  } else {
    auto [rho, p] = parse_state_ref(a.state);
    state.emplace(std::move(rho));
    params.emplace(p);
  }

  if (a.mode.empty() || a.mode == "unitary") {
    if (!unitary_ok) {
      if (!a.mode.empty()) throw io::ParseError("--mode unitary: scenario channels are not unitary");
      cfg.mode = SeesawMode::GeneralChannel;
    }
  } else if (a.mode == "channel") {
    cfg.mode = SeesawMode::GeneralChannel;
  } else {
    throw io::ParseError("--mode: expected unitary or channel");
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw io::ParseError(e.what());
  }

  const SeesawResult r = initial ? seesaw(*initial, cfg) : seesaw(*state, *params, cfg);
  json out{{"best_score", r.best_score},
           {"params", {{"n", params->n}, {"d", params->d}}},
           {"mode", cfg.mode == SeesawMode::UnitaryOnly ? "unitary" : "channel"},
           {"restarts", cfg.restarts},
           {"seed", cfg.seed},
           {"best_restart", r.best_restart},
           {"trace_length", r.trace.size()},
           {"converged", r.converged}};
  if (a.probe) {
    const auto probe = conjecture_probe(initial ? initial->state() : *state, *params, cfg);
    out["probe"] = {{"seesaw_best", probe.seesaw_best}, {"egf_estimate", probe.egf_estimate}, {"gap", probe.gap}};
  }
  if (!a.out.empty()) {
    std::ofstream f(a.out, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + a.out);
    f << io::scenario_to_json(r.best_strategy).dump(1) << "\n";
    out["strategy_file"] = a.out;
  }
  emit(out);
  return kOk;
}

int fail(int code, const std::string& what) {
  std::cerr << "error: " << what << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  kernels::configure_threads_from_env();

  CLI::App app{"Semi-device-independent entanglement certification toolkit"};
  app.require_subcommand(1);

  ScoreArgs score_args;
  auto* sc = app.add_subcommand("score", "Score a scenario file");
  sc->add_option("scenario", score_args.scenario, "Scenario JSON")->required();
  sc->add_flag("--per-input", score_args.per_input, "Include the win probability of every input tuple");

  CertifyArgs cert_args;
  auto* ce = app.add_subcommand("certify", "Certify entanglement from a score or an observed distribution");
  ce->add_option("--score", cert_args.score, "Observed score");
  ce->add_option("--distribution", cert_args.distribution, "CSV with columns x_1..x_n,y_1..y_n,b_1..b_n,p");
  ce->add_option("--n", cert_args.n, "Number of parties")->required();
  ce->add_option("--d", cert_args.d, "Local dimension")->required();
  ce->add_option("--margin", cert_args.margin, "Error bar subtracted before comparing with each bound")
      ->check(CLI::NonNegativeNumber);

  SweepArgs sweep_args;
  auto* sw = app.add_subcommand("sweep", "Visibility sweep to CSV");
  sw->add_option("spec", sweep_args.spec, "Sweep specification JSON")->required();
  sw->add_option("--out", sweep_args.out, "Output CSV")->required();
  sw->add_flag("--force", sweep_args.force, "Overwrite an existing output file");

  VerifyArgs verify_args;
  auto* ve = app.add_subcommand("verify", "Run a reproduction or property suite");
  ve->add_option("--suite", verify_args.suite, "paper, bounds or oracle")
      ->check(CLI::IsMember({"paper", "bounds", "oracle"}));
  ve->add_option("--seed", verify_args.seed, "Seed for randomised checks");

  OptimizeArgs opt_args;
  auto* op = app.add_subcommand("optimize", "Seesaw search for the best score of a state");
  op->add_option("scenario", opt_args.scenario, "Scenario JSON used as the first starting point");
  op->add_option("--state", opt_args.state,
                 "ghz:n:d | noisy_ghz:n:d:v | w[:v] | dicke[:v] | maximally_mixed:n:d | max_entangled:d");
  op->add_option("--mode", opt_args.mode, "unitary (default) or channel");
  op->add_option("--restarts", opt_args.restarts, "Random restarts")->check(CLI::PositiveNumber);
  op->add_option("--max-iter", opt_args.max_iter, "Iterations per restart")->check(CLI::PositiveNumber);
  op->add_option("--seed", opt_args.seed, "Seed");
  op->add_option("--out", opt_args.out, "Write the best strategy as a scenario file");
  op->add_flag("--probe", opt_args.probe, "Also compare the channel seesaw with the extractable GHZ fraction");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  try {
    if (*sc) return cmd_score(score_args);
    if (*ce) return cmd_certify(cert_args);
    if (*sw) return cmd_sweep(sweep_args);
    if (*ve) return cmd_verify(verify_args);
    if (*op) return cmd_optimize(opt_args);
  } catch (const io::SizeGuardError& e) {
    return fail(kSizeGuard, e.what());
  } catch (const io::ParseError& e) {
    return fail(kParse, e.what());
  } catch (const DistributionError& e) {
    return fail(kBadDistribution, e.what());
  } catch (const InvariantError& e) {
    return fail(kInvariant, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kParse, e.what());
  } catch (const std::exception& e) {
    return fail(kInvariant, e.what());
  }
  return kParse;
}
