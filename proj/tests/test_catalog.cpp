#include <doctest.h>

#include <array>

#include "sdicert/catalog.hpp"
#include "sdicert/certify.hpp"
#include "support.hpp"

using namespace sdicert;
using catalog::Visibility;
using testing::max_diff;

namespace {

const std::vector<std::pair<int, int>> kCases = {{2, 2}, {2, 3}, {3, 2}, {3, 3}};

Matrix gram(const Povm& povm) {
  const int n = povm.size();
  // rank-one projectors: <M_b|M_b'> squared equals Tr[P_b P_b']
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = (povm[i] * povm[j]).trace();
  return g;
}

Matrix bell(int which) {
  const double s = 1.0 / std::sqrt(2.0);
  Vector v = Vector::Zero(4);
  switch (which) {
    case 0: v << s, 0, 0, s; break;   // phi+
    case 1: v << s, 0, 0, -s; break;  // phi-
    case 2: v << 0, s, s, 0; break;   // psi+
    default: v << 0, s, -s, 0; break; // psi-
  }
  return v * v.adjoint();
}

}  // namespace

TEST_CASE("visibility is validated") {
  CHECK_THROWS_AS(Visibility(-0.01), std::invalid_argument);
  CHECK_THROWS_AS(Visibility(1.01), std::invalid_argument);
  CHECK(double(Visibility(0.3)) == 0.3);
}

TEST_CASE("GHZ states") {
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(max_diff(catalog::ghz_state(2, 2).amplitudes(), Vector{{s, 0.0, 0.0, s}}) < 1e-15);
  for (auto [n, d] : kCases) {
    const Ket g = catalog::ghz_state(n, d);
    CHECK(g.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_diff(g.amplitudes(), testing::ghz(n, d)) < 1e-15);
    const Dims dims(n, d);
    for (int k = 0; k < n; ++k) {
      const std::array<int, 1> keep{k};
      CHECK(max_diff(partial_trace(g.projector(), dims, keep), identity(d) / double(d)) < 1e-12);
    }
  }
}

TEST_CASE("noisy GHZ endpoints and threshold saturation") {
  CHECK(max_diff(catalog::noisy_ghz(2, 3, Visibility(0.0)).matrix(), identity(9) / 9.0) < 1e-15);
  CHECK(max_diff(catalog::noisy_ghz(3, 2, Visibility(1.0)).matrix(), catalog::ghz_state(3, 2).projector()) < 1e-15);
  const double a = score(catalog::ghz_strategy(3, 2, Visibility(3.0 / 7.0))).score;
  CHECK(std::abs(a - 0.5) < 1e-12);
  // two-qudit noisy GHZ: partial transpose negative exactly above 1/(d+1)
  for (int d : {2, 3}) {
    const double thr = 1.0 / (d + 1);
    CHECK(partial_transpose(catalog::noisy_ghz(2, d, Visibility(thr + 1e-4)), d, d).min_eigenvalue() < 0.0);
    CHECK(partial_transpose(catalog::noisy_ghz(2, d, Visibility(thr - 1e-4)), d, d).min_eigenvalue() > 0.0);
  }
}

TEST_CASE("W and Dicke states") {
  const Vector w = catalog::w_state().amplitudes();
  const Vector dk = catalog::dicke_state().amplitudes();
  CHECK(w.norm() == doctest::Approx(1.0));
  CHECK(dk.norm() == doctest::Approx(1.0));
  int nw = 0, nd = 0;
  for (int i = 0; i < 8; ++i)
    if (std::abs(w(i)) > 1e-12) {
      ++nw;
      CHECK(std::abs(w(i) - 1.0 / std::sqrt(3.0)) < 1e-12);
      CHECK(__builtin_popcount(i) == 1);
    }
  for (int i = 0; i < 16; ++i)
    if (std::abs(dk(i)) > 1e-12) {
      ++nd;
      CHECK(std::abs(dk(i) - 1.0 / std::sqrt(6.0)) < 1e-12);
      CHECK(__builtin_popcount(i) == 2);
    }
  CHECK(nw == 3);
  CHECK(nd == 6);
  CHECK(catalog::noisy_w(Visibility(0.4)).trace() == doctest::Approx(1.0));
  CHECK(catalog::noisy_dicke(Visibility(0.4)).min_eigenvalue() == doctest::Approx(0.6 / 16));
}

TEST_CASE("clock-shift channels") {
  const auto fams = catalog::clock_shift_channels(2, 2);
  REQUIRE(fams.size() == 2);
  CHECK(max_diff(fams[0].at(0, 0).kraus()[0], identity(2)) < 1e-15);
  // {I, X, Z, ZX}: ZX is i times the Pauli Y
  const Matrix y{{0.0, cplx(0, -1)}, {cplx(0, 1), 0.0}};
  CHECK(max_diff(fams[1].at(0, 1).kraus()[0], testing::shift_op(2)) < 1e-15);
  CHECK(max_diff(fams[1].at(1, 0).kraus()[0], testing::clock_op(2)) < 1e-15);
  CHECK(max_diff(fams[1].at(1, 1).kraus()[0], cplx(0, 1) * y) < 1e-15);

  Rng rng(3);
  const Matrix rho = random_density_matrix(3, 3, rng);
  for (const auto& fam : catalog::clock_shift_channels(2, 3))
    for (const auto& m : fam.maps()) CHECK(std::abs(m.apply(rho).trace() - cplx(1.0)) < 1e-12);
}

TEST_CASE("GHZ-basis measurement") {
  // n = d = 2 is the Bell measurement
  const Povm bsm = catalog::ghz_basis_measurement(2, 2);
  CHECK(max_diff(bsm[0], bell(0)) < 1e-12);  // b = 00
  CHECK(max_diff(bsm[1], bell(2)) < 1e-12);  // b = 01: X on party 1
  CHECK(max_diff(bsm[2], bell(1)) < 1e-12);  // b = 10: Z on party 0
  CHECK(max_diff(bsm[3], bell(3)) < 1e-12);  // b = 11

  for (auto [n, d] : kCases) {
    const Povm m = catalog::ghz_basis_measurement(n, d);
    CHECK(m.size() == testing::prod(Dims(n, d)));
    CHECK(max_diff(gram(m), identity(m.size())) < 1e-10);
    CHECK(m.completeness_defect() < 1e-12);
    // oracle vectors: Z^b0 (x) X^b1 (x) ... applied to GHZ
    for (int b = 0; b < m.size(); ++b) {
      const auto dg = testing::digits_of(b, Dims(n, d));
      Matrix op = testing::power(testing::clock_op(d), dg[0]);
      for (int k = 1; k < n; ++k) op = testing::naive_kron(op, testing::power(testing::shift_op(d), dg[k]));
      const Vector v = op * testing::ghz(n, d);
      CHECK(max_diff(m[b], v * v.adjoint()) < 1e-12);
    }
  }
}

TEST_CASE("noisy Bell measurement") {
  for (int d : {2, 3}) {
    CHECK(max_diff(catalog::noisy_bsm(d, Visibility(1.0))[1], catalog::ghz_basis_measurement(2, d)[1]) < 1e-15);
    const Povm zero = catalog::noisy_bsm(d, Visibility(0.0));
    for (int b = 0; b < d * d; ++b) CHECK(max_diff(zero[b], identity(d * d) / double(d * d)) < 1e-15);
    CHECK(zero.completeness_defect() < 1e-12);
  }
}

TEST_CASE("coloured-noise Bell measurement") {
  for (double v : {0.0, 0.37, 1.0}) {
    const Povm e = catalog::coloured_noise_bsm(Visibility(v));
    const double c = (1 - v) / 4;
    CHECK(max_diff(e[0], v * bell(0) + c * (bell(0) + 2 * bell(1) + bell(2))) < 1e-15);
    CHECK(max_diff(e[1], v * bell(2) + c * (bell(0) + bell(1) + 2 * bell(2))) < 1e-15);
    CHECK(max_diff(e[2], v * bell(1) + c * (2 * bell(0) + bell(1) + bell(2))) < 1e-15);
    CHECK(max_diff(e[3], bell(3)) < 1e-15);
    CHECK(max_diff(e[0] + e[1] + e[2] + e[3], identity(4)) < 1e-9);
  }
  const Povm ideal = catalog::coloured_noise_bsm(Visibility(1.0));
  const Povm bsm = catalog::ghz_basis_measurement(2, 2);
  for (int b = 0; b < 4; ++b) CHECK(max_diff(ideal[b], bsm[b]) < 1e-12);
}

TEST_CASE("measurement with product elements") {
  for (int d : {2, 3})
    for (int m = 0; m <= d; ++m) {
      const Povm povm = catalog::hybrid_measurement(d, m);
      CHECK(max_diff(gram(povm), identity(d * d)) < 1e-10);
      int product = 0;
      for (int b = 0; b < d * d; ++b) {
        const std::array<int, 1> keep{0};
        const Matrix marginal = partial_trace(povm[b], Dims{d, d}, keep);
        // a rank-one projector is product iff its marginal is pure
        product += std::abs((marginal * marginal).trace().real() - 1.0) < 1e-10;
      }
      CHECK(product == m * d);
    }
  CHECK_THROWS(catalog::hybrid_measurement(2, 3));
  CHECK(max_diff(catalog::hybrid_measurement(2, 2)[1], Ket::basis(4, 1).projector()) < 1e-15);
}

TEST_CASE("strategy with product elements attains its closed form") {
  for (int d : {2, 3})
    for (int m = 0; m <= d; ++m) {
      const Strategy s(GameParams(2, d), DensityMatrix(catalog::max_entangled(d)), Dims(2, d),
                       catalog::hybrid_channels(d), catalog::hybrid_measurement(d, m));
      const double a = score(s).score;
      CHECK(std::abs(a - (double(d - m) / d + double(m) / (d * d))) <= 1e-9);
      CHECK(std::abs(a - separable_measurement_bound(GameParams(2, d), m * d)) <= 1e-9);
    }
}

TEST_CASE("forwarding strategy is a valid distribution") {
  const GameParams p(3, 3);
  const Distribution dist = catalog::forwarding_distribution(p);
  for (int t = 0; t < p.tuples(); ++t) {
    double sum = 0.0;
    for (int b = 0; b < p.outcomes(); ++b) sum += dist.at(t, b);
    CHECK(sum == doctest::Approx(1.0));
  }
}
