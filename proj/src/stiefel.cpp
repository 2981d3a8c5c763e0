#include "sdicert/stiefel.hpp"

namespace sdicert {

Vector vec_rowmajor(const Matrix& k) {
  Vector v(k.size());
  for (Eigen::Index i = 0; i < k.rows(); ++i)
    for (Eigen::Index j = 0; j < k.cols(); ++j) v(i * k.cols() + j) = k(i, j);
  return v;
}

Matrix unvec_rowmajor(const Vector& v, int rows, int cols) {
  Matrix k(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) k(i, j) = v(i * cols + j);
  return k;
}

double kraus_quadratic(const Matrix& q, const std::vector<Matrix>& kraus) {
  double acc = 0.0;
  for (const auto& k : kraus) {
    const Vector v = vec_rowmajor(k);
    acc += v.dot(q * v).real();
  }
  return acc;
}

namespace {

Matrix stack(const std::vector<Matrix>& kraus) {
  const auto rows = kraus.front().rows();
  Matrix s(rows * static_cast<Eigen::Index>(kraus.size()), kraus.front().cols());
  for (std::size_t i = 0; i < kraus.size(); ++i) s.middleRows(static_cast<Eigen::Index>(i) * rows, rows) = kraus[i];
  return s;
}

std::vector<Matrix> unstack(const Matrix& s, int rank) {
  const auto rows = s.rows() / rank;
  std::vector<Matrix> out;
  for (int i = 0; i < rank; ++i) out.push_back(s.middleRows(i * rows, rows));
  return out;
}

}  // namespace

PolarAscentResult polar_ascent(const Matrix& q, std::vector<Matrix> kraus, int max_iter, double tol) {
  const int rank = static_cast<int>(kraus.size());
  const int rows = static_cast<int>(kraus.front().rows());
  const int cols = static_cast<int>(kraus.front().cols());
  PolarAscentResult r{std::move(kraus), 0.0, 0};
  r.value = kraus_quadratic(q, r.kraus);

  for (int it = 0; it < max_iter; ++it) {
    std::vector<Matrix> grad;
    grad.reserve(rank);
    for (const auto& k : r.kraus) grad.push_back(unvec_rowmajor(q * vec_rowmajor(k), rows, cols));
    auto next = unstack(polar_factor(stack(grad)), rank);
    const double value = kraus_quadratic(q, next);
    ++r.iterations;
    if (!(value > r.value)) break;
    const double gain = value - r.value;
    r.kraus = std::move(next);
    r.value = value;
    if (gain < tol) break;
  }
  return r;
}

std::vector<Matrix> random_kraus(int dim_out, int dim_in, int rank, Rng& rng) {
  if (rank * dim_out < dim_in) throw std::invalid_argument("random_kraus: rank too small for input dimension");
  return unstack(haar_isometry(rank * dim_out, dim_in, rng), rank);
}

}  // namespace sdicert
