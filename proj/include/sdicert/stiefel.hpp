#pragma once

// Ascent of f(K_1..K_r) = sum_i vec(K_i)^dagger Q vec(K_i) over Kraus lists
// with sum K_i^dagger K_i = I (the stacked matrix [K_1; ...; K_r] is an
// isometry). Q is PSD, so f is convex and the linearised step
// V <- polar([unvec(Q vec K_i)]_i) can only increase it. Unitary channels
// are the r = 1, d_out = d_in case.

#include <vector>

#include "sdicert/qcore.hpp"

namespace sdicert {

/// vec is row-major over (out, in).
Vector vec_rowmajor(const Matrix& k);
Matrix unvec_rowmajor(const Vector& v, int rows, int cols);

double kraus_quadratic(const Matrix& q, const std::vector<Matrix>& kraus);

struct PolarAscentResult {
  std::vector<Matrix> kraus;
  double value;
  int iterations;
};

/// Repeats the polar step until the gain drops below `tol` or `max_iter` is hit.
/// Steps that fail to increase the value (round-off) are discarded.
PolarAscentResult polar_ascent(const Matrix& q, std::vector<Matrix> kraus, int max_iter, double tol);

/// Random Kraus list of the given rank: blocks of a Haar isometry.
std::vector<Matrix> random_kraus(int dim_out, int dim_in, int rank, Rng& rng);

}  // namespace sdicert
