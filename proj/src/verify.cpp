#include "sdicert/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "sdicert/catalog.hpp"
#include "sdicert/certify.hpp"
#include "sdicert/kernels.hpp"
#include "sdicert/optimize.hpp"
#include "sdicert/stiefel.hpp"

namespace sdicert::verify {

int SuiteReport::failures() const {
  int f = 0;
  for (const auto& c : checks) f += !c.pass;
  return f;
}

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

using catalog::Visibility;

constexpr double kExact = 1e-9;
constexpr double kSweepMargin = 1e-9;

const std::vector<std::pair<int, int>> kCases = {{2, 2}, {2, 3}, {3, 2}, {3, 3}};

Rng suite_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return Rng(seq);
}

double uniform(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }
int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// Reorders the tensor factors of `op`: factor i of `op` belongs to party order[i].
Matrix to_party_order(const Matrix& op, int n, int d, const std::vector<int>& order) {
  const int dim = static_cast<int>(op.rows());
  std::vector<int> src(dim);
  for (int i = 0; i < dim; ++i) {
    std::vector<int> digit(n);
    for (int k = n - 1, r = i; k >= 0; --k, r /= d) digit[k] = r % d;
    int j = 0;
    for (int f = 0; f < n; ++f) j = j * d + digit[order[f]];
    src[i] = j;
  }
  Matrix out(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) out(i, j) = op(src[i], src[j]);
  return out;
}

/// rho_S (x) rho_Sbar across a random proper bipartition, arbitrary within each side.
Matrix random_biseparable_term(int n, int d, Rng& rng) {
  std::vector<int> side_a, side_b;
  while (side_a.empty() || side_b.empty()) {
    side_a.clear();
    side_b.clear();
    for (int k = 0; k < n; ++k) (uniform(rng) < 0.5 ? side_a : side_b).push_back(k);
  }
  auto block = [&](int parties) {
    int dim = 1;
    for (int i = 0; i < parties; ++i) dim *= d;
    return random_density_matrix(dim, uniform_int(rng, 1, dim), rng);
  };
  const Matrix joint = kron(block(static_cast<int>(side_a.size())), block(static_cast<int>(side_b.size())));
  std::vector<int> order = side_a;
  order.insert(order.end(), side_b.begin(), side_b.end());
  return to_party_order(joint, n, d, order);
}

DensityMatrix random_biseparable_state(int n, int d, Rng& rng) {
  Matrix rho = random_biseparable_term(n, d, rng);
  if (uniform(rng) < 0.5) {
    const double w = uniform(rng);
    rho = w * rho + (1.0 - w) * random_biseparable_term(n, d, rng);
  }
  return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

/// Projective measurement with k product rank-one elements (from a random
/// local-basis product) and the rest spread by a random unitary over the
/// complement; outcome labels shuffled.
Povm povm_with_separable_elements(int n, int d, int k, Rng& rng) {
  std::vector<Matrix> locals;
  for (int i = 0; i < n; ++i) locals.push_back(haar_unitary(d, rng));
  const Matrix product_basis = tensor(locals);
  const int dim = static_cast<int>(product_basis.rows());
  std::vector<int> idx(dim);
  for (int i = 0; i < dim; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);

  std::vector<Vector> vecs;
  for (int i = 0; i < k; ++i) vecs.push_back(product_basis.col(idx[i]));
  if (dim > k) {
    Matrix rest(dim, dim - k);
    for (int i = k; i < dim; ++i) rest.col(i - k) = product_basis.col(idx[i]);
    const Matrix mixed = rest * haar_unitary(dim - k, rng);
    for (int i = 0; i < dim - k; ++i) vecs.push_back(mixed.col(i));
  }
  std::shuffle(vecs.begin(), vecs.end(), rng);
  std::vector<Matrix> elements;
  for (const auto& v : vecs) elements.push_back(v * v.adjoint());
  return Povm(std::move(elements));
}

/// Ascent over the parties' maps with the measurement held fixed.
Strategy improve_channels(Strategy s, int sweeps) {
  const auto& p = s.params();
  for (int it = 0; it < sweeps; ++it)
    for (int k = 0; k < p.n; ++k) {
      const auto grams = kernels::party_grams(s, k);
      std::vector<KrausChannel> maps;
      for (int a = 0; a < p.channel_inputs(); ++a)
        maps.emplace_back(polar_ascent(grams[a], s.channels()[k].at(a).kraus(), 10, 1e-12).kraus);
      auto channels = s.channels();
      channels[k] = ChannelFamily(k, p.d, std::move(maps));
      s = s.with_channels(std::move(channels));
    }
  return s;
}

void add(SuiteReport& r, std::string name, std::string detail, bool pass) {
  r.checks.push_back({std::move(name), std::move(detail), pass});
}

// ---- reproduction ---------------------------------------------------------

void ideal_scores(SuiteReport& r) {
  for (auto [n, d] : kCases) {
    const double a = score(catalog::ghz_strategy(n, d)).score;
    add(r, fmt("ideal score n=%d d=%d", n, d), fmt("score %.12f, expected 1", a), std::abs(a - 1.0) <= kExact);
  }
}

void noisy_ghz_lines(SuiteReport& r) {
  const double expected_thr[] = {1.0 / 3.0, 1.0 / 4.0, 3.0 / 7.0, 4.0 / 13.0};
  for (std::size_t c = 0; c < kCases.size(); ++c) {
    const auto [n, d] = kCases[c];
    const GameParams p(n, d);
    const double thr = ghz_visibility_threshold(n, d);
    double worst = 0.0;
    bool flips = true;
    for (int i = 0; i <= 10; ++i) {
      const double v = i / 10.0;
      const double a = score(catalog::ghz_strategy(n, d, Visibility(v))).score;
      worst = std::max(worst, std::abs(a - (v + (1.0 - v) / p.outcomes())));
      flips = flips && certify(a, p, kSweepMargin).gme_certified == (v > thr);
    }
    add(r, fmt("noisy GHZ line n=%d d=%d", n, d), fmt("max |score - (v + (1-v)/d^n)| = %.2e over 11 points", worst),
        worst <= kExact);
    add(r, fmt("GME threshold n=%d d=%d", n, d),
        fmt("threshold %.9f (expected %.9f), flag flips above it: %s", thr, expected_thr[c], flips ? "yes" : "no"),
        std::abs(thr - expected_thr[c]) <= 1e-12 && flips);
    for (double dv : {-1e-6, 1e-6}) {
      const double a = score(catalog::ghz_strategy(n, d, Visibility(thr + dv))).score;
      const bool gme = certify(a, p).gme_certified;
      add(r, fmt("GME flag at threshold %+.0e n=%d d=%d", dv, n, d), fmt("gme %s", gme ? "true" : "false"),
          gme == (dv > 0));
    }
  }
}

void separable_bounds(SuiteReport& r) {
  const GameParams p(2, 2);
  const double k4 = separable_measurement_bound(p, 4), k1 = separable_measurement_bound(p, 1);
  add(r, "separable bound n=2 d=2 k=4", fmt("%.12f, expected 1/2", k4), std::abs(k4 - 0.5) <= kExact);
  add(r, "separable bound n=2 d=2 k=1", fmt("%.12f, expected 7/8", k1), std::abs(k1 - 0.875) <= kExact);
  for (int d : {2, 3})
    for (int m = 0; m <= d; ++m) {
      const GameParams pd(2, d);
      const Strategy s(pd, DensityMatrix(catalog::max_entangled(d)), Dims(2, d), catalog::hybrid_channels(d),
                       catalog::hybrid_measurement(d, m));
      const double a = score(s).score;
      const double closed = double(d - m) / d + double(m) / (d * d);
      const double bound = separable_measurement_bound(pd, m * d);
      add(r, fmt("product-element strategy d=%d m=%d", d, m),
          fmt("score %.12f, closed form %.12f, bound at k=%d %.12f", a, closed, m * d, bound),
          std::abs(a - closed) <= kExact && std::abs(a - bound) <= kExact);
    }
}

Strategy coloured_strategy(double v) {
  return Strategy(GameParams(2, 2), DensityMatrix(catalog::max_entangled(2)), Dims(2, 2),
                  catalog::clock_shift_channels(2, 2), catalog::coloured_noise_bsm(Visibility(v)));
}

void coloured_noise(SuiteReport& r) {
  const GameParams p(2, 2);
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double v = i / 100.0;
    worst = std::max(worst, std::abs(score(coloured_strategy(v)).score - (1.0 + v) / 2.0));
  }
  add(r, "coloured noise score line", fmt("max |score - (1+v)/2| = %.2e over 101 points", worst), worst <= kExact);

  struct Point {
    double v;
    int count;
  };
  const Point points[] = {{0.0, 0},        {1e-6, 1},       {0.25, 1}, {0.25 + 1e-6, 2}, {0.5, 2},
                          {0.5 + 1e-6, 3}, {0.75, 3},       {0.75 + 1e-6, 4}, {1.0, 4}};
  for (const auto& pt : points) {
    const int got = certify(score(coloured_strategy(pt.v)).score, p, kSweepMargin).certified_entangled_ops;
    add(r, fmt("coloured noise certified count v=%.6f", pt.v), fmt("%d, expected %d", got, pt.count),
        got == pt.count);
  }
  const Point ppt[] = {{0.0, 1}, {0.2, 2}, {1.0 / 3.0, 2}, {1.0 / 3.0 + 1e-6, 4}, {0.6, 4}, {1.0, 4}};
  for (const auto& pt : ppt) {
    const int got = count_npt_operators(catalog::coloured_noise_bsm(Visibility(pt.v)), Dims{2, 2}).count;
    add(r, fmt("coloured noise NPT count v=%.6f", pt.v), fmt("%d, expected %d", got, pt.count), got == pt.count);
  }
}

void noisy_bsm(SuiteReport& r) {
  for (int d : {2, 3}) {
    const GameParams p(2, d);
    double first = -1.0;
    bool monotone = true;
    for (int i = 0; i <= 1000; ++i) {
      const double v = i / 1000.0;
      const Strategy s(p, DensityMatrix(catalog::max_entangled(d)), Dims(2, d), catalog::clock_shift_channels(2, d),
                       catalog::noisy_bsm(d, Visibility(v)));
      const bool ok = certify(score(s).score, p, kSweepMargin).certified_entangled_ops >= 1;
      if (ok && first < 0.0) first = v;
      if (!ok && first >= 0.0) monotone = false;
    }
    const double thr = 1.0 / (d + 1);
    add(r, fmt("noisy BSM entanglement threshold d=%d", d),
        fmt("first certified grid point %.3f, expected first point above %.6f", first, thr),
        monotone && first > thr && first - thr <= 1e-3 + 1e-12);
  }
  const GameParams p(2, 2);
  double first = -1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = i / 1000.0;
    const Strategy s(p, DensityMatrix(catalog::max_entangled(2)), Dims(2, 2), catalog::clock_shift_channels(2, 2),
                     catalog::noisy_bsm(2, Visibility(v)));
    if (certify(score(s).score, p, kSweepMargin).certified_entangled_ops == 4 && first < 0.0) first = v;
  }
  add(r, "noisy BSM all-four threshold d=2", fmt("first grid point with 4 certified %.3f, expected above 5/6", first),
      first > 5.0 / 6.0 && first - 5.0 / 6.0 <= 1e-3);
}

void seesaw_reproductions(SuiteReport& r, std::uint64_t seed) {
  SeesawConfig cfg;
  cfg.seed = seed;
  for (double v : {0.25, 0.5, 0.75, 1.0}) {
    const double best = seesaw(catalog::noisy_w(Visibility(v)), GameParams(3, 2), cfg).best_score;
    const double target = (1.0 + 5.0 * v) / 8.0;
    add(r, fmt("W seesaw v=%.2f", v), fmt("best %.6f, target (1+5v)/8 = %.6f", best, target), best >= target - 1e-3);
  }

  SeesawConfig dicke = cfg;
  dicke.restarts = 8;
  const double thr = seesaw_threshold([](double v) { return catalog::noisy_dicke(Visibility(v)); }, GameParams(4, 2),
                                      0.5, dicke, 0.55, 0.75, 2e-3);
  add(r, "Dicke GME threshold", fmt("bisection %.4f, expected 7/11 = %.4f", thr, 7.0 / 11.0),
      std::abs(thr - 7.0 / 11.0) <= 0.01);

  SeesawConfig ghz = cfg;
  ghz.restarts = 5;
  const double g = seesaw(DensityMatrix(catalog::ghz_state(3, 2)), GameParams(3, 2), ghz).best_score;
  add(r, "seesaw on GHZ n=3 d=2", fmt("best %.9f, expected 1", g), std::abs(g - 1.0) <= 1e-6);
}

void fractions(SuiteReport& r, std::uint64_t seed) {
  FractionOptions opt;
  opt.seed = seed;
  opt.restarts = 5;
  for (auto [n, d] : kCases) {
    const GameParams p(n, d);
    for (double v : {0.3, 0.7}) {
      const double gf = ghz_fraction(catalog::noisy_ghz(n, d, Visibility(v)), p, opt).value;
      const double expected = v + (1.0 - v) / p.outcomes();
      add(r, fmt("GHZ fraction n=%d d=%d v=%.1f", n, d, v), fmt("%.9f, expected %.9f", gf, expected),
          std::abs(gf - expected) <= 1e-6);
    }
  }
  SeesawConfig cfg;
  cfg.seed = seed;
  cfg.restarts = 10;
  for (auto [n, d] : {std::pair{2, 2}, {2, 3}, {3, 2}}) {
    const auto probe = conjecture_probe(catalog::noisy_ghz(n, d, Visibility(0.5)), GameParams(n, d), cfg);
    add(r, fmt("conjecture probe noisy GHZ n=%d d=%d v=0.5", n, d),
        fmt("seesaw %.6f, EGF %.6f, |gap| %.1e", probe.seesaw_best, probe.egf_estimate, std::abs(probe.gap)),
        std::abs(probe.gap) < 1e-3);
  }
}

// ---- bounds ---------------------------------------------------------------

void biseparable_samples(SuiteReport& r, std::uint64_t seed, int samples) {
  for (auto [n, d] : {std::pair{2, 2}, {3, 2}}) {
    const GameParams p(n, d);
    Rng rng = suite_rng(seed, static_cast<std::uint32_t>(100 + 10 * n + d));
    int violations = 0;
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
      const DensityMatrix rho = random_biseparable_state(n, d, rng);
      const auto mode = s % 2 == 0 ? SeesawMode::UnitaryOnly : SeesawMode::GeneralChannel;
      Strategy strat = random_strategy(rho, Dims(n, d), p, mode, 0, rng);
      strat = strat.with_povm(optimal_povm_step(strat).povm);
      double a = score(strat).score;
      if (s % 4 >= 2) {
        SeesawConfig cfg;
        cfg.restarts = 1;
        cfg.max_iter = 25;
        cfg.mode = mode;
        a = std::max(a, seesaw(strat, cfg).best_score);
      }
      worst = std::max(worst, a);
      violations += a > biseparable_bound(p) + 1e-6;
    }
    add(r, fmt("biseparable strategies n=%d d=%d", n, d),
        fmt("%d violations in %d samples, largest score %.6f vs bound %.6f", violations, samples, worst,
            biseparable_bound(p)),
        violations == 0);
  }
}

void separable_element_samples(SuiteReport& r, std::uint64_t seed, int samples) {
  for (auto [n, d] : {std::pair{2, 2}, {2, 3}}) {
    const GameParams p(n, d);
    Rng rng = suite_rng(seed, static_cast<std::uint32_t>(200 + 10 * n + d));
    int violations = 0;
    double worst_gap = -1.0;
    for (int s = 0; s < samples; ++s) {
      const int k = uniform_int(rng, 1, p.outcomes());
      const Povm povm = povm_with_separable_elements(n, d, k, rng);
      Strategy strat(p, catalog::noisy_ghz(n, d, Visibility(uniform(rng) < 0.5 ? 1.0 : uniform(rng))), Dims(n, d),
                     catalog::clock_shift_channels(n, d), povm);
      strat = improve_channels(std::move(strat), 10);
      const double gap = score(strat).score - separable_measurement_bound(p, k);
      worst_gap = std::max(worst_gap, gap);
      violations += gap > 1e-6;
    }
    add(r, fmt("measurements with separable elements n=%d d=%d", n, d),
        fmt("%d violations in %d samples, largest score - bound %.2e", violations, samples, worst_gap),
        violations == 0);
  }
}

// ---- oracle ---------------------------------------------------------------

void compression(SuiteReport& r, std::uint64_t seed) {
  int mismatches = 0;
  for (int d = 1; d <= 3; ++d)
    for (int n = 1; n <= 9; ++n) mismatches += compression_oracle(n, d) != std::min(1.0, double(d) / n);
  add(r, "compression optimum N<=9 d<=3", fmt("%d mismatches against min(1, d/N)", mismatches), mismatches == 0);
  for (auto [n, d] : {std::pair{4, 2}, {8, 2}, {9, 3}}) {
    const double got = compression_oracle(n, d);
    const double expected = double(d) / n;
    add(r, fmt("compression N=%d d=%d", n, d), fmt("%.6g == %.6g", got, expected), got == expected);
    Rng rng = suite_rng(seed, static_cast<std::uint32_t>(300 + 10 * n + d));
    const double quantum = random_quantum_compression(n, d, 500, rng);
    add(r, fmt("random quantum compression N=%d d=%d", n, d),
        fmt("best of 500 samples %.6f <= %.6f", quantum, expected), quantum <= expected + 1e-9);
  }
}

void ppt(SuiteReport& r) {
  for (int d : {2, 3}) {
    const double thr = 1.0 / (d + 1);
    for (double dv : {-1e-3, 1e-3}) {
      const int got = count_npt_operators(catalog::noisy_bsm(d, Visibility(thr + dv)), Dims{d, d}).count;
      const int expected = dv > 0 ? d * d : 0;
      add(r, fmt("noisy BSM NPT count d=%d v=1/(d+1)%+.0e", d, dv), fmt("%d, expected %d", got, expected),
          got == expected);
    }
    for (int m = 0; m <= d; ++m) {
      const auto rep = count_npt_operators(catalog::hybrid_measurement(d, m), Dims{d, d});
      add(r, fmt("product-element measurement NPT count d=%d m=%d", d, m),
          fmt("%d, expected %d", rep.count, (d - m) * d), rep.count == (d - m) * d);
    }
  }
  const auto ghz = count_npt_operators(catalog::ghz_basis_measurement(3, 2), Dims{2, 2, 2});
  add(r, "GHZ basis NPT count n=3 d=2", fmt("%d of 8 elements, %zu bipartitions", ghz.count, ghz.bipartitions.size()),
      ghz.count == 8 && ghz.bipartitions.size() == 3);
}

}  // namespace

SuiteReport reproduction_suite(std::uint64_t seed) {
  SuiteReport r{"paper", seed, {}};
  ideal_scores(r);
  noisy_ghz_lines(r);
  separable_bounds(r);
  coloured_noise(r);
  noisy_bsm(r);
  add(r, "compression N=4 d=2", fmt("%.6g == %.6g", compression_oracle(4, 2), 0.5), compression_oracle(4, 2) == 0.5);
  fractions(r, seed);
  seesaw_reproductions(r, seed);
  return r;
}

SuiteReport bounds_suite(std::uint64_t seed, int samples) {
  if (samples < 1) throw std::invalid_argument("bounds suite: samples must be >= 1");
  SuiteReport r{"bounds", seed, {}};
  biseparable_samples(r, seed, samples);
  separable_element_samples(r, seed, samples / 2);
  return r;
}

SuiteReport oracle_suite(std::uint64_t seed) {
  SuiteReport r{"oracle", seed, {}};
  compression(r, seed);
  ppt(r);
  return r;
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "paper") return reproduction_suite(seed);
  if (name == "bounds") return bounds_suite(seed);
  if (name == "oracle") return oracle_suite(seed);
  throw std::invalid_argument("unknown suite \"" + name + "\" (expected paper, bounds or oracle)");
}

void print_report(const SuiteReport& report, std::ostream& out) {
  out << "suite " << report.suite << " (seed " << report.seed << ")\n";
  for (const auto& c : report.checks) out << (c.pass ? "PASS  " : "FAIL  ") << c.name << ": " << c.detail << "\n";
  const int failed = report.failures();
  out << "summary: " << report.checks.size() - failed << " passed, " << failed << " failed\n";
}

}  // namespace sdicert::verify
