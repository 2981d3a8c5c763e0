#pragma once

// Numerical search over strategies (seesaw between the joint measurement and
// the parties' local maps) plus brute-force oracles for the compression bound
// that underlies the biseparable bound.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sdicert/certify.hpp"
#include "sdicert/scenario.hpp"

namespace sdicert {

enum class SeesawMode { UnitaryOnly, GeneralChannel };

struct SeesawConfig {
  int restarts = 50;
  int max_iter = 300;
  double tol = 1e-8;
  int kraus_rank = 0;  // GeneralChannel only; 0 selects d
  std::uint64_t seed = 1;
  SeesawMode mode = SeesawMode::UnitaryOnly;
  int povm_iter = 200;  // fixed-point iterations per measurement update

  void validate() const;
};

struct SeesawResult {
  double best_score;
  Strategy best_strategy;
  std::vector<double> trace;  // score after each iteration of the best restart
  bool converged;
  int best_restart;
  std::vector<double> restart_scores;
};

struct PovmStepResult {
  Povm povm;
  double objective;
  int iterations;
  bool fallback;  // a step was rejected (singular R or loss of monotonicity)
};

/// Maximises sum_b Tr[W_b M_b] over POVMs with the fixed point
/// M_b <- R^-1 W_b M_b W_b R^-1, R = (sum_b W_b M_b W_b)^(1/2). With a warm
/// start the result never scores below the incoming POVM.
PovmStepResult optimal_povm_step(const std::vector<Matrix>& weights, const Povm* warm_start = nullptr,
                                 int max_iter = 500, double tol = 1e-12);

/// Convenience form: weights are the effective operators of the strategy's
/// state and channels, warm-started from its POVM.
PovmStepResult optimal_povm_step(const Strategy& strategy, int max_iter = 500, double tol = 1e-12);

/// Random initial strategy for the given state: Haar unitaries (or random
/// isometric Kraus lists) per map and a random orthonormal-basis measurement.
Strategy random_strategy(const DensityMatrix& state, const Dims& input_dims, const GameParams& params,
                         SeesawMode mode, int kraus_rank, Rng& rng);

/// Multi-restart seesaw from random strategies.
SeesawResult seesaw(const DensityMatrix& state, const GameParams& params, const SeesawConfig& config,
                    Dims input_dims = {});

/// Same, with restart 0 started from `initial`.
SeesawResult seesaw(const Strategy& initial, const SeesawConfig& config);

/// Bisection for the visibility at which the seesaw score of `family(v)`
/// first exceeds `bound`. Assumes the score is nondecreasing in v and that
/// the crossing lies in [lo, hi]; stops once hi - lo <= resolution.
double seesaw_threshold(const std::function<DensityMatrix(double)>& family, const GameParams& params, double bound,
                        const SeesawConfig& config, double lo = 0.0, double hi = 1.0, double resolution = 1e-3);

class SearchGuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Best average success of conveying x in {1..N} through one of d classical
/// messages, by exhaustive search over encodings (up to relabelling of the
/// messages) and decodings.
double compression_oracle(int n_inputs, int d);

/// Success probability of `samples` random quantum compression strategies:
/// random pure encodings against random POVMs, and each POVM's best-response
/// encoding (top eigenvectors). Returns the largest value seen.
double random_quantum_compression(int n_inputs, int d, int samples, Rng& rng);

struct ConjectureProbe {
  double seesaw_best;
  double egf_estimate;
  double gap;  // seesaw_best - egf_estimate
};

/// Runs the general-channel seesaw and the extractable-GHZ-fraction ascent on
/// the same state. Reports both; makes no claim about which is optimal.
ConjectureProbe conjecture_probe(const DensityMatrix& state, const GameParams& params, const SeesawConfig& config);

}  // namespace sdicert
