#pragma once

// Certification from an observed score: genuine multipartite entanglement of
// the shared state, and a lower bound on the number of entangled measurement
// operators. Also the GHZ-fraction quantities and a PPT-based ground truth for
// operator entanglement.

#include <cstdint>
#include <utility>
#include <vector>

#include "sdicert/scenario.hpp"

namespace sdicert {

/// Largest score reachable with a biseparable state: 1/d, for every n.
double biseparable_bound(const GameParams& params);

/// Largest score reachable when at least k of the d^n measurement operators
/// are fully separable: (d^n - k + k/d) / d^n, for 0 <= k <= d^n.
double separable_measurement_bound(const GameParams& params, int k);

/// Visibility above which the ideal GHZ strategy on a white-noise GHZ state
/// beats the biseparable bound: (d^(n-1) - 1) / (d^n - 1).
double ghz_visibility_threshold(int n, int d);

struct CertificationReport {
  double score;
  double margin;
  GameParams params;
  bool gme_certified;
  int certified_entangled_ops;                 // 0 .. d^n
  std::vector<std::pair<int, double>> thresholds;  // (k, bound_k), k = 0 .. d^n
};

/// Violations are strict: score > bound + margin. Use a nonzero margin (an
/// error bar) for estimated scores.
CertificationReport certify(double score, const GameParams& params, double margin = 0.0);

struct FractionOptions {
  int restarts = 20;
  int max_iter = 500;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  int kraus_rank = 0;  // 0 selects d
};

struct GhzFractionResult {
  double value;
  bool converged;
  std::vector<double> trace;       // objective after each sweep, best restart
  std::vector<Matrix> unitaries;   // V_k of the best restart
  int best_restart;
};

/// Lower bound on max_V <GHZ| (x)V rho (x)V^dagger |GHZ> by seesaw over local
/// unitaries. Restart 0 starts at the identity, the rest are Haar random.
GhzFractionResult ghz_fraction(const DensityMatrix& state, const GameParams& params,
                               const FractionOptions& options = {});

struct ExtractableFractionResult {
  double value;                             // heuristic lower bound
  double ghz_fraction;                      // unitary-only value it started from
  bool converged;
  std::vector<double> trace;
  std::vector<std::vector<Matrix>> kraus;   // per party
  int best_restart;
};

/// Heuristic lower bound on the GHZ overlap reachable with local channels of
/// fixed Kraus rank. Restart 0 starts from the GHZ-fraction optimum so the
/// result never falls below it. `input_dims` defaults to d per party.
ExtractableFractionResult extractable_ghz_fraction(const DensityMatrix& state, const GameParams& params,
                                                   const FractionOptions& options = {}, Dims input_dims = {});

/// Overlap <GHZ| (x)Lambda_k [rho] |GHZ> for explicit local Kraus lists.
double ghz_overlap(const Matrix& state, const Dims& input_dims, const std::vector<std::vector<Matrix>>& kraus,
                   const GameParams& params);

struct NptReport {
  int count;                              // elements NPT across some bipartition
  std::vector<std::vector<int>> bipartitions;  // subsystem sets S (containing party 0)
  std::vector<std::vector<bool>> flags;   // [element][bipartition]
  std::vector<int> inconclusive;          // zero-trace elements, skipped
  bool exact;                             // PPT is equivalent to separability (2x2, 2x3)
};

/// Counts measurement operators whose normalised form has a negative partial
/// transpose across at least one bipartition. A lower bound on the number of
/// entangled operators, exact for two parties with dA * dB <= 6.
NptReport count_npt_operators(const Povm& povm, const Dims& dims);

}  // namespace sdicert
