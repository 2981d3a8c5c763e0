#include <doctest.h>

#include "sdicert/catalog.hpp"
#include "sdicert/certify.hpp"
#include "support.hpp"

using namespace sdicert;
using catalog::Visibility;

namespace {

/// Separable-measurement bound recomputed by counting:
/// k separable elements win with probability at most 1/d each, the rest at most 1.
double counted_bound(int outcomes, int d, int k) { return (double(outcomes - k) + double(k) / d) / outcomes; }

Strategy coloured(double v) {
  return Strategy(GameParams(2, 2), DensityMatrix(catalog::max_entangled(2)), Dims(2, 2),
                  catalog::clock_shift_channels(2, 2), catalog::coloured_noise_bsm(Visibility(v)));
}

}  // namespace

TEST_CASE("biseparable bound") {
  CHECK(biseparable_bound(GameParams(2, 2)) == 0.5);
  CHECK(biseparable_bound(GameParams(5, 2)) == 0.5);
  CHECK(biseparable_bound(GameParams(2, 3)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("separable measurement bound") {
  const GameParams p(2, 2);
  CHECK(separable_measurement_bound(p, 4) == 0.5);
  CHECK(separable_measurement_bound(p, 1) == 0.875);
  CHECK(separable_measurement_bound(p, 2) == 0.75);
  CHECK_THROWS_AS(separable_measurement_bound(p, 5), std::invalid_argument);
  CHECK_THROWS_AS(separable_measurement_bound(p, -1), std::invalid_argument);
  for (auto [n, d] : {std::pair{2, 2}, {2, 3}, {3, 2}, {3, 3}}) {
    const GameParams q(n, d);
    const int total = q.outcomes();
    for (int k = 0; k <= total; ++k) {
      CHECK(separable_measurement_bound(q, k) == doctest::Approx(counted_bound(total, d, k)).epsilon(1e-15));
      if (k > 0) CHECK(separable_measurement_bound(q, k) < separable_measurement_bound(q, k - 1));
    }
    CHECK(separable_measurement_bound(q, total) == doctest::Approx(biseparable_bound(q)).epsilon(1e-15));
    CHECK(separable_measurement_bound(q, 1) ==
          doctest::Approx(1.0 - (d - 1.0) / (double(total) * d)).epsilon(1e-15));
  }
}

TEST_CASE("certification examples") {
  const GameParams p(2, 2);
  auto ops = [&](double v) { return certify((1 + v) / 2, p).certified_entangled_ops; };
  CHECK(ops(0.8) == 4);
  CHECK(ops(0.3) == 2);
  CHECK(ops(0.1) == 1);
  CHECK(ops(0.0) == 0);

  const auto at_bound = certify(0.5, p);
  CHECK_FALSE(at_bound.gme_certified);
  CHECK(at_bound.certified_entangled_ops == 0);
  CHECK(at_bound.thresholds.size() == 5);

  const auto high = certify(0.9, p);
  CHECK(high.gme_certified);
  CHECK(high.certified_entangled_ops == 4);
  const auto mid = certify(0.55, p);
  CHECK(mid.gme_certified);
  CHECK(mid.certified_entangled_ops == 1);

  // a margin turns a marginal violation into none
  CHECK_FALSE(certify(0.5005, p, 1e-3).gme_certified);
  CHECK_THROWS(certify(1.5, p));
  CHECK_THROWS(certify(0.5, p, -1.0));
}

TEST_CASE("certified count follows the definition") {
  for (auto [n, d] : {std::pair{2, 2}, {2, 3}, {3, 2}}) {
    const GameParams p(n, d);
    for (int i = 0; i <= 200; ++i) {
      const double a = i / 200.0;
      const auto r = certify(a, p);
      int expected = 0;
      for (int k = 1; k <= p.outcomes(); ++k)
        if (a > counted_bound(p.outcomes(), d, k)) {
          expected = p.outcomes() - k + 1;
          break;
        }
      CHECK(r.certified_entangled_ops == expected);
      CHECK(r.gme_certified == (a > 1.0 / d));
    }
  }
}

TEST_CASE("visibility thresholds") {
  for (int d = 2; d <= 5; ++d) CHECK(ghz_visibility_threshold(2, d) == doctest::Approx(1.0 / (d + 1)).epsilon(1e-15));
  CHECK(ghz_visibility_threshold(3, 2) == doctest::Approx(3.0 / 7.0).epsilon(1e-15));
  CHECK(ghz_visibility_threshold(3, 3) == doctest::Approx(4.0 / 13.0).epsilon(1e-15));
}

TEST_CASE("GHZ fraction") {
  for (auto [n, d] : {std::pair{2, 2}, {2, 3}, {3, 2}}) {
    const GameParams p(n, d);
    const auto pure = ghz_fraction(DensityMatrix(catalog::ghz_state(n, d)), p);
    CHECK(pure.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(pure.unitaries.size() == std::size_t(n));
    const auto mixed = ghz_fraction(DensityMatrix::maximally_mixed(p.outcomes()), p);
    CHECK(mixed.value == doctest::Approx(1.0 / p.outcomes()).epsilon(1e-10));
    for (double v : {0.2, 0.5, 0.9}) {
      const auto r = ghz_fraction(catalog::noisy_ghz(n, d, Visibility(v)), p);
      CHECK(std::abs(r.value - (v + (1 - v) / p.outcomes())) <= 1e-6);
      for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] >= r.trace[i - 1] - 1e-12);
    }
  }
}

TEST_CASE("GHZ fraction is invariant under local unitaries") {
  Rng rng(13);
  const GameParams p(2, 2);
  for (int trial = 0; trial < 3; ++trial) {
    const DensityMatrix rho(random_density_matrix(4, 2, rng));
    const Matrix u = kron(haar_unitary(2, rng), haar_unitary(2, rng));
    const DensityMatrix rotated(Matrix(u * rho.matrix() * u.adjoint()));
    FractionOptions opt;
    opt.restarts = 10;
    const double a = ghz_fraction(rho, p, opt).value;
    opt.seed = 77;
    const double b = ghz_fraction(rotated, p, opt).value;
    CHECK(std::abs(a - b) <= 1e-6);
  }
}

TEST_CASE("GHZ overlap of explicit maps") {
  const GameParams p(2, 2);
  const Matrix rho = catalog::ghz_state(2, 2).projector();
  CHECK(ghz_overlap(rho, Dims{2, 2}, {{identity(2)}, {identity(2)}}, p) == doctest::Approx(1.0));
  CHECK(ghz_overlap(rho, Dims{2, 2}, {{identity(2)}, {shift(2).matrix()}}, p) == doctest::Approx(0.0));
}

TEST_CASE("extractable GHZ fraction") {
  const GameParams p(2, 2);
  CHECK(extractable_ghz_fraction(DensityMatrix(catalog::ghz_state(2, 2)), p).value ==
        doctest::Approx(1.0).epsilon(1e-10));

  Rng rng(19);
  FractionOptions opt;
  opt.restarts = 4;
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix rho(random_density_matrix(4, 1 + trial % 4, rng));
    const auto r = extractable_ghz_fraction(rho, p, opt);
    CHECK(r.value >= r.ghz_fraction - 1e-8);
    CHECK(r.value >= ghz_fraction(rho, p, opt).value - 1e-8);
  }
}

TEST_CASE("local channels can beat local unitaries") {
  // 0.3 |psi-><psi-| + 0.7 |00><00|: unitaries cannot reach 1/2, resetting both qubits to |0> can
  const double q = 0.3;
  const DensityMatrix rho(Matrix(q * catalog::psi_minus().projector() + (1 - q) * Ket::basis(4, 0).projector()));
  const GameParams p(2, 2);
  const auto gf = ghz_fraction(rho, p);
  const auto egf = extractable_ghz_fraction(rho, p);
  CHECK(gf.value < 0.5 - 0.1);
  CHECK(egf.value - gf.value > 1e-4);

  const Matrix k0{{1.0, 0.0}, {0.0, 0.0}}, k1{{0.0, 1.0}, {0.0, 0.0}};
  const KrausChannel reset({k0, k1});
  Matrix out = apply_local(rho.matrix(), {2, 2}, 0, k0) + apply_local(rho.matrix(), {2, 2}, 0, k1);
  out = apply_local(out, {2, 2}, 1, k0) + apply_local(out, {2, 2}, 1, k1);
  const Vector phi = testing::ghz(2, 2);
  const double direct = phi.dot(out * phi).real();
  CHECK(direct == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(direct > gf.value + 1e-4);
  CHECK(ghz_overlap(rho.matrix(), {2, 2}, {{k0, k1}, {k0, k1}}, p) == doctest::Approx(direct));
}

TEST_CASE("NPT counting") {
  CHECK(count_npt_operators(catalog::coloured_noise_bsm(Visibility(0.5)), Dims{2, 2}).count == 4);
  CHECK(count_npt_operators(catalog::coloured_noise_bsm(Visibility(0.2)), Dims{2, 2}).count == 2);
  CHECK(count_npt_operators(catalog::coloured_noise_bsm(Visibility(0.0)), Dims{2, 2}).count == 1);
  const auto at_v = count_npt_operators(catalog::coloured_noise_bsm(Visibility(0.2)), Dims{2, 2});
  CHECK(at_v.flags[1][0]);  // E_01
  CHECK(at_v.flags[3][0]);  // E_11
  CHECK_FALSE(at_v.flags[0][0]);
  CHECK(at_v.exact);

  CHECK(count_npt_operators(catalog::hybrid_measurement(3, 2), Dims{3, 3}).count == 3);
  CHECK(count_npt_operators(catalog::noisy_bsm(2, Visibility(0.2)), Dims{2, 2}).count == 0);

  const auto ghz = count_npt_operators(catalog::ghz_basis_measurement(3, 2), Dims{2, 2, 2});
  CHECK(ghz.bipartitions.size() == 3);
  CHECK_FALSE(ghz.exact);

  std::vector<Matrix> with_zero{Matrix(identity(4)), Matrix(Matrix::Zero(4, 4))};
  const auto rep = count_npt_operators(Povm(with_zero), Dims{2, 2});
  CHECK(rep.inconclusive == std::vector<int>{1});
  CHECK_THROWS(count_npt_operators(Povm(with_zero), Dims{2, 3}));
}

TEST_CASE("the witness never over-claims against the PPT ground truth") {
  for (int i = 0; i <= 20; ++i) {
    const double v = i / 20.0;
    const int npt = count_npt_operators(catalog::coloured_noise_bsm(Visibility(v)), Dims{2, 2}).count;
    CHECK(certify(score(coloured(v)).score, GameParams(2, 2), 1e-9).certified_entangled_ops <= npt);

    const Strategy noisy(GameParams(2, 2), DensityMatrix(catalog::max_entangled(2)), Dims(2, 2),
                         catalog::clock_shift_channels(2, 2), catalog::noisy_bsm(2, Visibility(v)));
    const int npt_noisy = count_npt_operators(noisy.povm(), Dims{2, 2}).count;
    CHECK(certify(score(noisy).score, GameParams(2, 2), 1e-9).certified_entangled_ops <= npt_noisy);
  }
  for (int m = 0; m <= 2; ++m) {
    const Strategy s(GameParams(2, 2), DensityMatrix(catalog::max_entangled(2)), Dims(2, 2),
                     catalog::hybrid_channels(2), catalog::hybrid_measurement(2, m));
    const int npt = count_npt_operators(s.povm(), Dims{2, 2}).count;
    CHECK(certify(score(s).score, GameParams(2, 2), 1e-9).certified_entangled_ops <= npt);
  }
}
