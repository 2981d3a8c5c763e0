#include "sdicert/catalog.hpp"

#include <cmath>
#include <string>

namespace sdicert::catalog {

namespace {

void check_params(int n, int d) { GameParams(n, d); }

Matrix white_mix(const Matrix& target, double v) {
  const int dim = static_cast<int>(target.rows());
  return v * target + (1.0 - v) * identity(dim) / static_cast<double>(dim);
}

ChannelFamily unitary_family(int party, int d, auto&& exponents) {
  std::vector<KrausChannel> maps;
  maps.reserve(d * d);
  for (int x = 0; x < d; ++x)
    for (int y = 0; y < d; ++y) {
      const auto [a, b] = exponents(x, y);
      maps.push_back(KrausChannel::unitary(clock_shift_power(d, a, b)));
    }
  return ChannelFamily(party, d, std::move(maps));
}

Povm projective(const std::vector<Vector>& basis) {
  std::vector<Matrix> elements;
  elements.reserve(basis.size());
  for (const auto& v : basis) elements.push_back(v * v.adjoint());
  return Povm(std::move(elements));
}

std::vector<Vector> ghz_basis_vectors(int n, int d) {
  const GameParams p(n, d);
  const Vector ghz = ghz_state(n, d).amplitudes();
  std::vector<Vector> basis;
  basis.reserve(p.outcomes());
  for (int b = 0; b < p.outcomes(); ++b) {
    const auto digits = decode_outcome(b, p);
    std::vector<Matrix> factors;
    factors.push_back(clock_shift_power(d, digits[0], 0));
    for (int k = 1; k < n; ++k) factors.push_back(clock_shift_power(d, 0, digits[k]));
    basis.push_back(tensor(factors) * ghz);
  }
  return basis;
}

}  // namespace

Visibility::Visibility(double v) : v_(v) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("visibility must lie in [0, 1], got " + std::to_string(v));
}

Ket ghz_state(int n, int d) {
  check_params(n, d);
  const GameParams p(n, d);
  Vector amp = Vector::Zero(p.outcomes());
  int stride_sum = 0;  // index of |1...1>
  for (int k = 0; k < n; ++k) stride_sum = stride_sum * d + 1;
  for (int i = 0; i < d; ++i) amp(i * stride_sum) = 1.0;
  return Ket(amp);
}

DensityMatrix noisy_ghz(int n, int d, Visibility v) {
  return DensityMatrix(white_mix(ghz_state(n, d).projector(), v));
}

Ket max_entangled(int d) { return ghz_state(2, d); }

Ket w_state() {
  Vector amp = Vector::Zero(8);
  amp(1) = amp(2) = amp(4) = 1.0;
  return Ket(amp);
}

Ket dicke_state() {
  // |0011>, |0101>, |0110>, |1001>, |1010>, |1100>
  Vector amp = Vector::Zero(16);
  for (int idx : {3, 5, 6, 9, 10, 12}) amp(idx) = 1.0;
  return Ket(amp);
}

DensityMatrix noisy_w(Visibility v) { return DensityMatrix(white_mix(w_state().projector(), v)); }
DensityMatrix noisy_dicke(Visibility v) { return DensityMatrix(white_mix(dicke_state().projector(), v)); }

Ket phi_plus() { return Ket(Vector{{1.0, 0.0, 0.0, 1.0}}); }
Ket phi_minus() { return Ket(Vector{{1.0, 0.0, 0.0, -1.0}}); }
Ket psi_plus() { return Ket(Vector{{0.0, 1.0, 1.0, 0.0}}); }
Ket psi_minus() { return Ket(Vector{{0.0, 1.0, -1.0, 0.0}}); }

std::vector<ChannelFamily> clock_shift_channels(int n, int d) {
  check_params(n, d);
  std::vector<ChannelFamily> out;
  for (int k = 0; k < n; ++k) out.push_back(unitary_family(k, d, [](int x, int y) { return std::pair{x, y}; }));
  return out;
}

Povm ghz_basis_measurement(int n, int d) {
  check_params(n, d);
  return projective(ghz_basis_vectors(n, d));
}

Povm noisy_bsm(int d, Visibility v) {
  const auto basis = ghz_basis_vectors(2, d);
  std::vector<Matrix> elements;
  for (const auto& m : basis) elements.push_back(v * (m * m.adjoint()) + (1.0 - v) * identity(d * d) / double(d * d));
  return Povm(std::move(elements));
}

Povm coloured_noise_bsm(Visibility vis) {
  const double v = vis;
  const double c = (1.0 - v) / 4.0;
  const Matrix pp = phi_plus().projector(), pm = phi_minus().projector();
  const Matrix sp = psi_plus().projector(), sm = psi_minus().projector();
  std::vector<Matrix> e;
  e.push_back(v * pp + c * (pp + 2.0 * pm + sp));
  e.push_back(v * sp + c * (pp + pm + 2.0 * sp));
  e.push_back(v * pm + c * (2.0 * pp + pm + sp));
  e.push_back(sm);
  return Povm(std::move(e));
}

Povm hybrid_measurement(int d, int m) {
  check_params(2, d);
  if (m < 0 || m > d) throw std::invalid_argument("hybrid_measurement: need 0 <= m <= d, got " + std::to_string(m));
  const Vector phi = max_entangled(d).amplitudes();
  std::vector<Vector> basis;
  for (int b0 = 0; b0 < d; ++b0)
    for (int b1 = 0; b1 < d; ++b1) {
      const int diff = ((b1 - b0) % d + d) % d;
      if (diff < m) {
        basis.push_back(Ket::basis(d * d, b0 * d + b1).amplitudes());
      } else {
        const Matrix u = kron(clock_shift_power(d, b0, 0), clock_shift_power(d, 0, diff));
        basis.push_back(u * phi);
      }
    }
  return projective(basis);
}

std::vector<ChannelFamily> hybrid_channels(int d) {
  check_params(2, d);
  std::vector<ChannelFamily> out;
  out.push_back(unitary_family(0, d, [](int x, int y) { return std::pair{x, y + x}; }));
  out.push_back(unitary_family(1, d, [](int x, int y) { return std::pair{x, y - x}; }));
  return out;
}

Strategy ghz_strategy(int n, int d, Visibility v) {
  return Strategy(GameParams(n, d), noisy_ghz(n, d, v), Dims(n, d), clock_shift_channels(n, d),
                  ghz_basis_measurement(n, d));
}

Distribution forwarding_distribution(const GameParams& params) {
  Distribution p(params);
  const double guess = 1.0 / params.d;
  for (int t = 0; t < params.tuples(); ++t) {
    const auto in = decode_tuple(t, params);
    std::vector<int> b(params.n);
    for (int k = 1; k < params.n; ++k) b[k] = ((in.y[k] - in.y[0]) % params.d + params.d) % params.d;
    for (int g = 0; g < params.d; ++g) {
      b[0] = g;
      p.at(t, encode_outcome(b, params)) = guess;
    }
  }
  return p;
}

}  // namespace sdicert::catalog
