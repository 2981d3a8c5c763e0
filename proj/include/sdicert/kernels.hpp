#pragma once

// Hot loops of the library. `kernels::` runs the input-tuple and outcome
// loops under OpenMP; every reduction happens afterwards in fixed index
// order so results are bit-identical for any thread count. `reference::`
// is a deliberately naive serial path (explicit Kronecker products) kept
// as a test oracle and benchmark baseline.

#include <vector>

#include "sdicert/scenario.hpp"

namespace sdicert {

namespace kernels {

/// (T_0 (x) ... (x) T_{n-1})[rho] with party-local application. Entries of
/// `maps` may be null to leave a party untouched.
Matrix transform_state(const Matrix& rho, const Dims& dims, std::span<const KrausChannel* const> maps);

/// Win probability for every input tuple.
std::vector<double> win_probabilities(const Strategy& strategy);

/// W_b = d^(-2n) sum_{(x,y): C(x,y)=b} (T_x,y)[rho], so that the score equals
/// sum_b Tr[W_b M_b].
std::vector<Matrix> effective_operators(const GameParams& params, const Matrix& state, const Dims& input_dims,
                                        const std::vector<ChannelFamily>& channels);

/// Quadratic form Q with Tr[(K (x) I) rho (K (x) I)^dagger M] = vec(K)^dagger Q vec(K)
/// for K acting on `party`; vec is row-major over (out, in). `rho` lives on
/// `rho_dims`, `m` on `m_dims`, differing only at `party`.
Matrix kraus_gram(const Matrix& rho, const Dims& rho_dims, const Matrix& m, const Dims& m_dims, int party);

/// Gram operators of every map of `party` in the game objective, indexed by
/// channel index a = x*d + y. The score equals
/// sum_a sum_i vec(K_{a,i})^dagger Q_a vec(K_{a,i}) with the other parties fixed.
std::vector<Matrix> party_grams(const Strategy& strategy, int party);

/// Number of threads kernels will use (honours SDI_CERT_THREADS).
int thread_count();
/// Applies the SDI_CERT_THREADS cap, if set. Idempotent.
void configure_threads_from_env();

}  // namespace kernels

namespace reference {

std::vector<double> win_probabilities(const Strategy& strategy);
double score(const Strategy& strategy);

}  // namespace reference

}  // namespace sdicert
