#include "sdicert/optimize.hpp"

#include <cmath>
#include <exception>
#include <string>

#include "sdicert/kernels.hpp"
#include "sdicert/stiefel.hpp"

namespace sdicert {

void SeesawConfig::validate() const {
  if (restarts < 1) throw std::invalid_argument("seesaw: restarts must be >= 1");
  if (max_iter < 1) throw std::invalid_argument("seesaw: max_iter must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("seesaw: tol must be > 0");
  if (kraus_rank < 0) throw std::invalid_argument("seesaw: kraus_rank must be >= 0");
  if (povm_iter < 1) throw std::invalid_argument("seesaw: povm_iter must be >= 1");
}

// ---- measurement step -----------------------------------------------------

namespace {

double povm_objective(const std::vector<Matrix>& w, const std::vector<Matrix>& m) {
  double acc = 0.0;
  for (std::size_t b = 0; b < w.size(); ++b) acc += (w[b].cwiseProduct(m[b].transpose())).sum().real();
  return acc;
}

/// Restores exact completeness: M_b <- S^-1/2 M_b S^-1/2 with S = sum M_b.
std::vector<Matrix> renormalise(std::vector<Matrix> m) {
  Matrix s = Matrix::Zero(m.front().rows(), m.front().cols());
  for (const auto& e : m) s += e;
  const Matrix s_inv = psd_inv_sqrt(s, 1e-300);
  for (auto& e : m) {
    e = s_inv * e * s_inv;
    e = 0.5 * (e + e.adjoint());
  }
  return m;
}

Rng restart_rng(std::uint64_t seed, int restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart), 0x5ee5a3u};
  return Rng(seq);
}

}  // namespace

PovmStepResult optimal_povm_step(const std::vector<Matrix>& w, const Povm* warm, int max_iter, double tol) {
  if (w.empty()) throw std::invalid_argument("optimal_povm_step: no weights");
  const int outcomes = static_cast<int>(w.size());
  const int dim = static_cast<int>(w.front().rows());
  const Matrix id = identity(dim);

  std::vector<Matrix> m(outcomes);
  constexpr double kMix = 0.05;
  for (int b = 0; b < outcomes; ++b) {
    m[b] = id / static_cast<double>(outcomes);
    if (warm) m[b] = (1.0 - kMix) * (*warm)[b] + kMix * m[b];
  }

  double value = povm_objective(w, m);
  bool fallback = false;
  int it = 0;
  for (; it < max_iter; ++it) {
    Matrix r2 = Matrix::Zero(dim, dim);
    std::vector<Matrix> wmw(outcomes);
    for (int b = 0; b < outcomes; ++b) {
      wmw[b] = w[b] * m[b] * w[b];
      r2 += wmw[b];
    }
    const double scale = r2.trace().real();
    if (!(scale > 1e-300)) {
      fallback = true;
      break;
    }
    const Matrix r_inv = psd_inv_sqrt(r2, 1e-13 * scale);
    std::vector<Matrix> next(outcomes);
    Matrix support = Matrix::Zero(dim, dim);
    for (int b = 0; b < outcomes; ++b) {
      next[b] = r_inv * wmw[b] * r_inv;
      next[b] = 0.5 * (next[b] + next[b].adjoint());
      support += next[b];
    }
    // hand the kernel of R back so the iterate stays complete
    const Matrix complement = (id - support) / static_cast<double>(outcomes);
    for (auto& e : next) e += 0.5 * (complement + complement.adjoint());

    const double next_value = povm_objective(w, next);
    if (next_value < value - 1e-14) {
      fallback = true;
      break;
    }
    const double gain = next_value - value;
    m = std::move(next);
    value = next_value;
    if (gain < tol) {
      ++it;
      break;
    }
  }

  m = renormalise(std::move(m));
  // clip round-off negativity before validation
  for (auto& e : m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(e);
    const RealVector lam = es.eigenvalues().cwiseMax(0.0);
    e = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
  }
  m = renormalise(std::move(m));
  value = povm_objective(w, m);

  if (warm) {
    const double warm_value = povm_objective(w, warm->elements());
    if (warm_value >= value) return PovmStepResult{*warm, warm_value, it, fallback};
  }
  return PovmStepResult{Povm(std::move(m)), value, it, fallback};
}

PovmStepResult optimal_povm_step(const Strategy& s, int max_iter, double tol) {
  const auto w = kernels::effective_operators(s.params(), s.state().matrix(), s.input_dims(), s.channels());
  return optimal_povm_step(w, &s.povm(), max_iter, tol);
}

// ---- seesaw ---------------------------------------------------------------

Strategy random_strategy(const DensityMatrix& state, const Dims& input_dims, const GameParams& params,
                         SeesawMode mode, int kraus_rank, Rng& rng) {
  std::vector<ChannelFamily> channels;
  for (int k = 0; k < params.n; ++k) {
    const int din = input_dims[k];
    std::vector<KrausChannel> maps;
    for (int a = 0; a < params.channel_inputs(); ++a) {
      if (mode == SeesawMode::UnitaryOnly) {
        maps.push_back(KrausChannel::unitary(haar_unitary(params.d, rng)));
      } else {
        const int rank = std::max(kraus_rank > 0 ? kraus_rank : params.d, (din + params.d - 1) / params.d);
        maps.emplace_back(random_kraus(params.d, din, rank, rng));
      }
    }
    channels.emplace_back(k, params.d, std::move(maps));
  }
  const Matrix basis = haar_unitary(params.outcomes(), rng);
  std::vector<Matrix> elements;
  for (int b = 0; b < params.outcomes(); ++b) elements.push_back(basis.col(b) * basis.col(b).adjoint());
  return Strategy(params, state, input_dims, std::move(channels), Povm(std::move(elements)));
}

namespace {

struct Run {
  std::optional<Strategy> strategy;
  double value = -1.0;
  std::vector<double> trace;
  bool converged = false;
};

Run seesaw_run(Strategy s, const SeesawConfig& cfg) {
  const auto& p = s.params();
  Run run;
  run.value = score(s).score;
  for (int it = 0; it < cfg.max_iter; ++it) {
    // measurement
    auto step = optimal_povm_step(s, cfg.povm_iter, 0.01 * cfg.tol);
    s = s.with_povm(std::move(step.povm));

    // local maps, one party at a time
    double value = step.objective;
    for (int k = 0; k < p.n; ++k) {
      const auto grams = kernels::party_grams(s, k);
      std::vector<KrausChannel> maps;
      value = 0.0;
      for (int a = 0; a < p.channel_inputs(); ++a) {
        auto res = polar_ascent(grams[a], s.channels()[k].at(a).kraus(), 20, 0.01 * cfg.tol);
        value += res.value;
        maps.emplace_back(std::move(res.kraus));
      }
      auto channels = s.channels();
      channels[k] = ChannelFamily(k, p.d, std::move(maps));
      s = s.with_channels(std::move(channels));
    }

    run.trace.push_back(value);
    const double gain = value - run.value;
    run.value = std::max(run.value, value);
    if (gain < cfg.tol) {
      run.converged = true;
      break;
    }
  }
  run.strategy.emplace(std::move(s));
  return run;
}

// Random unitaries written as Kraus lists of the working rank, so the channel
// updates can still leave the unitary set.
Strategy padded_unitary_start(const DensityMatrix& state, const GameParams& params, int kraus_rank, Rng& rng) {
  const Strategy u = random_strategy(state, Dims(params.n, params.d), params, SeesawMode::UnitaryOnly, 0, rng);
  const int rank = kraus_rank > 0 ? kraus_rank : params.d;
  std::vector<ChannelFamily> channels;
  for (int k = 0; k < params.n; ++k) {
    std::vector<KrausChannel> maps;
    for (int a = 0; a < params.channel_inputs(); ++a) {
      std::vector<Matrix> ops(rank, Matrix::Zero(params.d, params.d));
      ops[0] = u.channels()[k].at(a).kraus()[0];
      maps.emplace_back(std::move(ops));
    }
    channels.emplace_back(k, params.d, std::move(maps));
  }
  return u.with_channels(std::move(channels));
}

SeesawResult run_restarts(const DensityMatrix& state, const Dims& input_dims, const GameParams& params,
                          const SeesawConfig& cfg, const Strategy* initial) {
  cfg.validate();
  if (cfg.mode == SeesawMode::UnitaryOnly && input_dims != Dims(params.n, params.d))
    throw std::invalid_argument("seesaw: unitary mode needs d-dimensional inputs for every party");

  const bool square = input_dims == Dims(params.n, params.d);
  std::vector<Run> runs(cfg.restarts);
  std::vector<std::exception_ptr> errors(cfg.restarts);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < cfg.restarts; ++r) {
    try {
      Rng rng = restart_rng(cfg.seed, r);
      Strategy start = (r == 0 && initial) ? *initial
                       : (r % 2 && cfg.mode == SeesawMode::GeneralChannel && square)
                           ? padded_unitary_start(state, params, cfg.kraus_rank, rng)
                           : random_strategy(state, input_dims, params, cfg.mode, cfg.kraus_rank, rng);
      runs[r] = seesaw_run(std::move(start), cfg);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  int best = 0;
  for (int r = 1; r < cfg.restarts; ++r)
    if (runs[r].value > runs[best].value) best = r;
  std::vector<double> scores;
  for (const auto& r : runs) scores.push_back(r.value);
  auto& b = runs[best];
  return SeesawResult{b.value, std::move(*b.strategy), std::move(b.trace), b.converged, best, std::move(scores)};
}

}  // namespace

SeesawResult seesaw(const DensityMatrix& state, const GameParams& params, const SeesawConfig& config,
                    Dims input_dims) {
  if (input_dims.empty()) input_dims.assign(params.n, params.d);
  if (static_cast<int>(input_dims.size()) != params.n || product(input_dims) != state.dim())
    throw std::invalid_argument("seesaw: state dimension does not match the party dimensions");
  return run_restarts(state, input_dims, params, config, nullptr);
}

SeesawResult seesaw(const Strategy& initial, const SeesawConfig& config) {
  return run_restarts(initial.state(), initial.input_dims(), initial.params(), config, &initial);
}

double seesaw_threshold(const std::function<DensityMatrix(double)>& family, const GameParams& params, double bound,
                        const SeesawConfig& config, double lo, double hi, double resolution) {
  if (!(lo < hi) || !(resolution > 0.0)) throw std::invalid_argument("seesaw_threshold: bad bracket");
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    if (seesaw(family(mid), params, config).best_score > bound)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// ---- compression ----------------------------------------------------------

double compression_oracle(int n_inputs, int d) {
  if (n_inputs < 1 || d < 1) throw std::invalid_argument("compression_oracle: need N >= 1 and d >= 1");
  double space = std::pow(static_cast<double>(d), n_inputs);
  if (space > 1e7) throw SearchGuardError("compression_oracle: d^N = " + std::to_string(space) + " exceeds 1e7");
  if (std::pow(static_cast<double>(n_inputs), d) > 1e7)
    throw SearchGuardError("compression_oracle: decoding space N^d exceeds 1e7");

  // encodings as restricted growth strings: message labels up to relabelling
  std::vector<int> enc(n_inputs, 0), prefix_max(n_inputs, 0);
  std::vector<int> dec(d, 0);
  int best = 0;
  for (;;) {
    // every decoding
    std::fill(dec.begin(), dec.end(), 0);
    for (;;) {
      int hits = 0;
      for (int x = 0; x < n_inputs; ++x) hits += dec[enc[x]] == x;
      best = std::max(best, hits);
      int k = d - 1;
      while (k >= 0 && ++dec[k] == n_inputs) dec[k--] = 0;
      if (k < 0) break;
    }
    // next restricted growth string with values < d
    int i = n_inputs - 1;
    for (; i >= 1; --i) {
      const int limit = std::min(d - 1, prefix_max[i - 1] + 1);
      if (enc[i] < limit) break;
    }
    if (i < 1) break;
    ++enc[i];
    prefix_max[i] = std::max(prefix_max[i - 1], enc[i]);
    for (int j = i + 1; j < n_inputs; ++j) {
      enc[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
  }
  return static_cast<double>(best) / n_inputs;
}

double random_quantum_compression(int n_inputs, int d, int samples, Rng& rng) {
  if (n_inputs < 1 || d < 1 || samples < 1) throw std::invalid_argument("random_quantum_compression: bad arguments");
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    std::vector<Matrix> g(n_inputs);
    Matrix total = Matrix::Zero(d, d);
    for (auto& e : g) {
      const Matrix a = haar_unitary(d, rng).leftCols(1 + static_cast<int>(rng() % d));
      std::uniform_real_distribution<double> u(0.0, 1.0);
      e = u(rng) * a * a.adjoint();
      total += e;
    }
    const Matrix t_inv = psd_inv_sqrt(total, 1e-14);
    double random_enc = 0.0, best_response = 0.0;
    for (int x = 0; x < n_inputs; ++x) {
      const Matrix m = t_inv * g[x] * t_inv;
      const Vector psi = random_pure_state(d, rng);
      random_enc += psi.dot(m * psi).real();
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
      best_response += es.eigenvalues()(d - 1);
    }
    best = std::max({best, random_enc / n_inputs, best_response / n_inputs});
  }
  return best;
}

// ---- conjecture probe -----------------------------------------------------

ConjectureProbe conjecture_probe(const DensityMatrix& state, const GameParams& params, const SeesawConfig& config) {
  const bool supported = (params.n == 2 && (params.d == 2 || params.d == 3)) || (params.n == 3 && params.d == 2);
  if (!supported)
    throw std::invalid_argument("conjecture_probe: only (n, d) in {(2,2), (2,3), (3,2)} are supported");
  SeesawConfig cfg = config;
  cfg.mode = SeesawMode::GeneralChannel;
  const auto sw = seesaw(state, params, cfg);

  FractionOptions fopt;
  fopt.restarts = config.restarts;
  fopt.seed = config.seed;
  fopt.kraus_rank = config.kraus_rank;
  fopt.tol = std::min(config.tol, 1e-10);
  const auto egf = extractable_ghz_fraction(state, params, fopt);
  return ConjectureProbe{sw.best_score, egf.value, sw.best_score - egf.value};
}

}  // namespace sdicert
