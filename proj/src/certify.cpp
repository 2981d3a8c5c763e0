#include "sdicert/certify.hpp"

#include <cmath>
#include <exception>
#include <string>

#include "sdicert/catalog.hpp"
#include "sdicert/kernels.hpp"
#include "sdicert/stiefel.hpp"

namespace sdicert {

double biseparable_bound(const GameParams& params) { return 1.0 / params.d; }

double separable_measurement_bound(const GameParams& params, int k) {
  const int total = params.outcomes();
  if (k < 0 || k > total)
    throw std::invalid_argument("separable_measurement_bound: k must lie in [0, d^n], got " + std::to_string(k));
  return (total - k + static_cast<double>(k) / params.d) / total;
}

double ghz_visibility_threshold(int n, int d) {
  const GameParams p(n, d);
  const double dn = p.outcomes();
  return (dn / d - 1.0) / (dn - 1.0);
}

CertificationReport certify(double score, const GameParams& params, double margin) {
  if (!(score >= -kStructTol && score <= 1.0 + kStructTol))
    throw std::invalid_argument("certify: score must lie in [0, 1], got " + std::to_string(score));
  if (!(margin >= 0.0)) throw std::invalid_argument("certify: margin must be non-negative");

  CertificationReport r{score, margin, params, false, 0, {}};
  const int total = params.outcomes();
  for (int k = 0; k <= total; ++k) r.thresholds.emplace_back(k, separable_measurement_bound(params, k));

  r.gme_certified = score > biseparable_bound(params) + margin;
  for (int k = 1; k <= total; ++k) {
    if (score > r.thresholds[k].second + margin) {
      r.certified_entangled_ops = total - k + 1;
      break;
    }
  }
  return r;
}

// ---- GHZ fraction ---------------------------------------------------------

namespace {

/// Applies every party's Kraus list except `skip` (pass -1 to apply all).
Matrix apply_kraus_lists(const Matrix& rho, Dims dims, const std::vector<std::vector<Matrix>>& kraus, int skip) {
  Matrix cur = rho;
  for (int k = 0; k < static_cast<int>(kraus.size()); ++k) {
    if (k == skip) continue;
    Matrix next;
    for (const auto& kr : kraus[k]) {
      Matrix term = apply_local(cur, dims, k, kr);
      if (next.size() == 0)
        next = std::move(term);
      else
        next += term;
    }
    cur = std::move(next);
    dims[k] = static_cast<int>(kraus[k].front().rows());
  }
  return cur;
}

struct AscentRun {
  double value = -1.0;
  bool converged = false;
  std::vector<double> trace;
  std::vector<std::vector<Matrix>> kraus;
};

/// Blockwise polar ascent of <GHZ| (x)Lambda_k [rho] |GHZ> from `start`.
AscentRun fraction_ascent(const Matrix& rho, const Dims& input_dims, const Matrix& ghz_proj,
                          std::vector<std::vector<Matrix>> start, const GameParams& params, const FractionOptions& opt) {
  const Dims out_dims(params.n, params.d);
  AscentRun run;
  run.kraus = std::move(start);
  run.value = ghz_overlap(rho, input_dims, run.kraus, params);
  for (int it = 0; it < opt.max_iter; ++it) {
    double value = run.value;
    for (int k = 0; k < params.n; ++k) {
      Dims mixed = out_dims;
      mixed[k] = input_dims[k];
      const Matrix partial = apply_kraus_lists(rho, input_dims, run.kraus, k);
      const Matrix q = kernels::kraus_gram(partial, mixed, ghz_proj, out_dims, k);
      auto step = polar_ascent(q, run.kraus[k], 50, 0.01 * opt.tol);
      run.kraus[k] = std::move(step.kraus);
      value = step.value;
    }
    run.trace.push_back(value);
    const double gain = value - run.value;
    run.value = std::max(run.value, value);
    if (gain < opt.tol) {
      run.converged = true;
      break;
    }
  }
  return run;
}

Rng restart_rng(std::uint64_t seed, int restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  return Rng(seq);
}

/// Runs `restarts` independent ascents in parallel; ties go to the lower index.
template <typename Init>
std::pair<AscentRun, int> best_of_restarts(int restarts, Init&& init, const Matrix& rho, const Dims& input_dims,
                                           const Matrix& ghz_proj, const GameParams& params,
                                           const FractionOptions& opt) {
  std::vector<AscentRun> runs(restarts);
  std::vector<std::exception_ptr> errors(restarts);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < restarts; ++r) {
    try {
      Rng rng = restart_rng(opt.seed, r);
      runs[r] = fraction_ascent(rho, input_dims, ghz_proj, init(r, rng), params, opt);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  int best = 0;
  for (int r = 1; r < restarts; ++r)
    if (runs[r].value > runs[best].value) best = r;
  return {std::move(runs[best]), best};
}

void check_fraction_inputs(const DensityMatrix& state, const GameParams& params, const FractionOptions& opt,
                           const Dims& input_dims) {
  if (opt.restarts < 1) throw std::invalid_argument("fraction: restarts must be >= 1");
  if (opt.max_iter < 1) throw std::invalid_argument("fraction: max_iter must be >= 1");
  if (!(opt.tol > 0.0)) throw std::invalid_argument("fraction: tol must be > 0");
  if (static_cast<int>(input_dims.size()) != params.n || product(input_dims) != state.dim())
    throw std::invalid_argument("fraction: state dimension does not match the party dimensions");
}

}  // namespace

double ghz_overlap(const Matrix& state, const Dims& input_dims, const std::vector<std::vector<Matrix>>& kraus,
                   const GameParams& params) {
  const Vector ghz = catalog::ghz_state(params.n, params.d).amplitudes();
  const Matrix out = apply_kraus_lists(state, input_dims, kraus, -1);
  return ghz.dot(out * ghz).real();
}

GhzFractionResult ghz_fraction(const DensityMatrix& state, const GameParams& params, const FractionOptions& opt) {
  const Dims dims(params.n, params.d);
  check_fraction_inputs(state, params, opt, dims);
  const Matrix proj = catalog::ghz_state(params.n, params.d).projector();
  auto init = [&](int r, Rng& rng) {
    std::vector<std::vector<Matrix>> v(params.n);
    for (int k = 0; k < params.n; ++k) v[k] = {r == 0 ? identity(params.d) : haar_unitary(params.d, rng)};
    return v;
  };
  auto [run, best] = best_of_restarts(opt.restarts, init, state.matrix(), dims, proj, params, opt);
  GhzFractionResult out{run.value, run.converged, std::move(run.trace), {}, best};
  for (auto& k : run.kraus) out.unitaries.push_back(std::move(k.front()));
  return out;
}

ExtractableFractionResult extractable_ghz_fraction(const DensityMatrix& state, const GameParams& params,
                                                   const FractionOptions& opt, Dims input_dims) {
  if (input_dims.empty()) input_dims.assign(params.n, params.d);
  check_fraction_inputs(state, params, opt, input_dims);
  const int rank = opt.kraus_rank > 0 ? opt.kraus_rank : params.d;

  // unitary warm start, only meaningful when the inputs are d-dimensional
  std::vector<Matrix> warm;
  double gf = 0.0;
  const bool square = input_dims == Dims(params.n, params.d);
  if (square) {
    const auto g = ghz_fraction(state, params, opt);
    warm = g.unitaries;
    gf = g.value;
  }

  const Matrix proj = catalog::ghz_state(params.n, params.d).projector();
  auto init = [&](int r, Rng& rng) {
    std::vector<std::vector<Matrix>> kraus(params.n);
    for (int k = 0; k < params.n; ++k) {
      const int din = input_dims[k];
      const int rk = std::max(rank, (din + params.d - 1) / params.d);
      if (r == 0 && square) {
        kraus[k].push_back(warm[k]);
        for (int i = 1; i < rk; ++i) kraus[k].push_back(Matrix::Zero(params.d, din));
      } else {
        kraus[k] = random_kraus(params.d, din, rk, rng);
      }
    }
    return kraus;
  };
  auto [run, best] = best_of_restarts(opt.restarts, init, state.matrix(), input_dims, proj, params, opt);
  return ExtractableFractionResult{run.value, gf, run.converged, std::move(run.trace), std::move(run.kraus), best};
}

// ---- PPT oracle -----------------------------------------------------------

NptReport count_npt_operators(const Povm& povm, const Dims& dims) {
  if (dims.size() < 2) throw std::invalid_argument("count_npt_operators: need at least two subsystems");
  if (product(dims) != povm.dim())
    throw std::invalid_argument("count_npt_operators: product of dims does not match element dimension");
  const int n = static_cast<int>(dims.size());

  NptReport r{0, {}, {}, {}, n == 2 && dims[0] * dims[1] <= 6};
  for (int mask = 0; mask < (1 << (n - 1)); ++mask) {
    std::vector<int> s{0};
    for (int k = 1; k < n; ++k)
      if (mask & (1 << (k - 1))) s.push_back(k);
    if (static_cast<int>(s.size()) == n) continue;
    r.bipartitions.push_back(std::move(s));
  }

  for (int b = 0; b < povm.size(); ++b) {
    std::vector<bool> flags(r.bipartitions.size(), false);
    const double tr = povm[b].trace().real();
    if (tr <= kStructTol) {
      r.inconclusive.push_back(b);
      r.flags.push_back(std::move(flags));
      continue;
    }
    const Matrix normalised = povm[b] / tr;
    bool any = false;
    for (std::size_t s = 0; s < r.bipartitions.size(); ++s) {
      const Matrix pt = partial_transpose(normalised, dims, r.bipartitions[s]);
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (pt + pt.adjoint()), Eigen::EigenvaluesOnly);
      flags[s] = es.eigenvalues()(0) < -kStructTol;
      any = any || flags[s];
    }
    if (any) ++r.count;
    r.flags.push_back(std::move(flags));
  }
  return r;
}

}  // namespace sdicert
