#pragma once

// Named states, channel families and measurements used by the game.

#include <vector>

#include "sdicert/scenario.hpp"

namespace sdicert::catalog {

/// Mixing weight against noise, validated to [0, 1].
class Visibility {
 public:
  explicit Visibility(double v);
  double value() const { return v_; }
  operator double() const { return v_; }

 private:
  double v_;
};

/// (1/sqrt d) sum_i |i>^(x n)
Ket ghz_state(int n, int d);
/// v |GHZ><GHZ| + (1 - v) I / d^n
DensityMatrix noisy_ghz(int n, int d, Visibility v);
/// Two-qudit maximally entangled state, the n = 2 GHZ state.
Ket max_entangled(int d);

/// (|001> + |010> + |100>) / sqrt 3
Ket w_state();
/// Four-qubit weight-two Dicke state: the six basis states with two
/// excitations, each with amplitude 1/sqrt 6.
Ket dicke_state();
DensityMatrix noisy_w(Visibility v);
DensityMatrix noisy_dicke(Visibility v);

/// Bell basis on two qubits.
Ket phi_plus();
Ket phi_minus();
Ket psi_plus();
Ket psi_minus();

/// Every party applies Z^x X^y.
std::vector<ChannelFamily> clock_shift_channels(int n, int d);

/// Projectors onto Z^b_0 (x) X^b_1 (x) ... (x) X^b_{n-1} |GHZ>.
Povm ghz_basis_measurement(int n, int d);
/// v |M_b><M_b| + (1 - v) I / d^2 over the two-qudit GHZ basis.
Povm noisy_bsm(int d, Visibility v);
/// Two-qubit Bell measurement with coloured noise; outcome order 00, 01, 10, 11.
Povm coloured_noise_bsm(Visibility v);

/// Two-qudit basis with m*d product elements |b_0, b_1> (when b_1 - b_0 mod d < m)
/// and (d-m)*d maximally entangled elements Z^b_0 (x) X^(b_1 - b_0) |phi_max>.
Povm hybrid_measurement(int d, int m);
/// Party 0 applies Z^x X^(y+x), party 1 applies Z^x X^(y-x).
std::vector<ChannelFamily> hybrid_channels(int d);

/// Ideal strategy on pure product / entangled inputs: state, clock/shift maps and
/// GHZ-basis measurement.
Strategy ghz_strategy(int n, int d, Visibility v = Visibility(1.0));

/// Classical strategy saturating the biseparable bound: every party forwards
/// y_k, the measurement outputs b_k = y_k - y_0 and guesses b_0 uniformly.
Distribution forwarding_distribution(const GameParams& params);

}  // namespace sdicert::catalog
