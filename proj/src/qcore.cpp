#include "sdicert/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace sdicert {

namespace {

struct Strides {
  Dims dims;
  std::vector<int> stride;  // stride[k] = product of dims after k

  explicit Strides(const Dims& d) : dims(d), stride(d.size(), 1) {
    for (int k = static_cast<int>(d.size()) - 2; k >= 0; --k) stride[k] = stride[k + 1] * d[k + 1];
  }
  int digit(int index, int k) const { return (index / stride[k]) % dims[k]; }
};

void check_dims(const Matrix& op, const Dims& dims, const char* what) {
  if (dims.empty()) throw std::invalid_argument(std::string(what) + ": empty dims");
  for (int d : dims)
    if (d < 1) throw std::invalid_argument(std::string(what) + ": non-positive dimension");
  const int total = product(dims);
  if (op.rows() != total || op.cols() != total)
    throw std::invalid_argument(std::string(what) + ": operator dimension " +
                                std::to_string(op.rows()) + " does not match product of dims " +
                                std::to_string(total));
}

std::vector<bool> subsystem_mask(std::span<const int> subsystems, int n, const char* what) {
  std::vector<bool> mask(n, false);
  for (int k : subsystems) {
    if (k < 0 || k >= n) throw std::invalid_argument(std::string(what) + ": subsystem out of range");
    mask[k] = true;
  }
  return mask;
}

}  // namespace

// ---- Ket ------------------------------------------------------------------

Ket::Ket(Vector amplitudes, bool normalized)
    : amplitudes_(std::move(amplitudes)), normalized_(normalized) {}

Ket::Ket(Vector amplitudes) : amplitudes_(std::move(amplitudes)), normalized_(true) {
  if (amplitudes_.size() == 0) throw std::invalid_argument("Ket: empty amplitude vector");
  const double nrm = amplitudes_.norm();
  if (!(nrm > 0.0)) throw std::invalid_argument("Ket: zero vector cannot be normalised");
  amplitudes_ /= nrm;
}

Ket Ket::unnormalized(Vector amplitudes) {
  if (amplitudes.size() == 0) throw std::invalid_argument("Ket: empty amplitude vector");
  return Ket(std::move(amplitudes), false);
}

Ket Ket::basis(int dim, int index) {
  if (dim < 1 || index < 0 || index >= dim) throw std::invalid_argument("Ket::basis: index out of range");
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return Ket(std::move(v), true);
}

Matrix Ket::projector() const { return amplitudes_ * amplitudes_.adjoint(); }

// ---- HermitianOperator ----------------------------------------------------

HermitianOperator::HermitianOperator(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument("HermitianOperator: matrix must be square and non-empty");
  if (!is_hermitian(m)) throw InvariantError("HermitianOperator: matrix is not Hermitian");
  m_ = 0.5 * (m + m.adjoint());
}

double HermitianOperator::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double HermitianOperator::max_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

DensityMatrix::DensityMatrix(const Matrix& m) : HermitianOperator(m) {
  if (std::abs(trace() - 1.0) > kStructTol)
    throw InvariantError("DensityMatrix: trace " + std::to_string(trace()) + " != 1");
  const double lo = min_eigenvalue();
  if (lo < -kStructTol)
    throw InvariantError("DensityMatrix: negative eigenvalue " + std::to_string(lo));
}

DensityMatrix::DensityMatrix(const Ket& psi) : DensityMatrix(Ket(psi.amplitudes()).projector()) {}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(identity(dim) / static_cast<double>(dim));
}

Unitary::Unitary(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) throw std::invalid_argument("Unitary: matrix must be square");
  if (!is_unitary(m_)) throw InvariantError("Unitary: U U^dagger != I");
}

// ---- structural -----------------------------------------------------------

int product(std::span<const int> dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<int>());
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool is_hermitian(const Matrix& m, double tol) {
  return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

bool is_unitary(const Matrix& m, double tol) {
  return m.rows() == m.cols() && max_abs(m * m.adjoint() - identity(static_cast<int>(m.rows()))) <= tol;
}

// ---- tensor ---------------------------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Matrix tensor(std::span<const Matrix> ops) {
  if (ops.empty()) throw std::invalid_argument("tensor: empty operand list");
  Matrix out = ops.front();
  for (std::size_t k = 1; k < ops.size(); ++k) out = kron(out, ops[k]);
  return out;
}

Vector tensor(std::span<const Vector> kets) {
  if (kets.empty()) throw std::invalid_argument("tensor: empty operand list");
  Vector out = kets.front();
  for (std::size_t k = 1; k < kets.size(); ++k) out = kron(out, kets[k]);
  return out;
}

Ket tensor(std::span<const Ket> kets) {
  if (kets.empty()) throw std::invalid_argument("tensor: empty operand list");
  Vector out = kets.front().amplitudes();
  bool normalized = kets.front().normalized();
  for (std::size_t k = 1; k < kets.size(); ++k) {
    out = kron(out, kets[k].amplitudes());
    normalized = normalized && kets[k].normalized();
  }
  return normalized ? Ket(std::move(out)) : Ket::unnormalized(std::move(out));
}

HermitianOperator tensor(std::span<const HermitianOperator> ops) {
  if (ops.empty()) throw std::invalid_argument("tensor: empty operand list");
  Matrix out = ops.front().matrix();
  for (std::size_t k = 1; k < ops.size(); ++k) out = kron(out, ops[k].matrix());
  return HermitianOperator(out);
}

// ---- partial operations ---------------------------------------------------

Matrix partial_trace(const Matrix& op, const Dims& dims, std::span<const int> keep) {
  check_dims(op, dims, "partial_trace");
  const int n = static_cast<int>(dims.size());
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  const auto mask = subsystem_mask(keep, n, "partial_trace");

  Dims kept_dims, traced_dims;
  std::vector<int> kept_ids, traced_ids;
  for (int k = 0; k < n; ++k) {
    if (mask[k]) {
      kept_dims.push_back(dims[k]);
      kept_ids.push_back(k);
    } else {
      traced_dims.push_back(dims[k]);
      traced_ids.push_back(k);
    }
  }
  const Strides full(dims);
  const int dk = product(kept_dims);
  const int dt = traced_dims.empty() ? 1 : product(traced_dims);
  const Strides ks(kept_dims);
  const Strides ts(traced_dims.empty() ? Dims{1} : traced_dims);

  // full index of (kept index, traced index)
  std::vector<int> index(static_cast<std::size_t>(dk) * dt);
  for (int a = 0; a < dk; ++a)
    for (int t = 0; t < dt; ++t) {
      int idx = 0;
      for (std::size_t q = 0; q < kept_ids.size(); ++q) idx += ks.digit(a, static_cast<int>(q)) * full.stride[kept_ids[q]];
      for (std::size_t q = 0; q < traced_ids.size(); ++q)
        idx += ts.digit(t, static_cast<int>(q)) * full.stride[traced_ids[q]];
      index[static_cast<std::size_t>(a) * dt + t] = idx;
    }

  Matrix out = Matrix::Zero(dk, dk);
  for (int b = 0; b < dk; ++b)
    for (int a = 0; a < dk; ++a) {
      cplx acc = 0.0;
      for (int t = 0; t < dt; ++t)
        acc += op(index[static_cast<std::size_t>(a) * dt + t], index[static_cast<std::size_t>(b) * dt + t]);
      out(a, b) = acc;
    }
  return out;
}

HermitianOperator partial_trace(const HermitianOperator& op, const Dims& dims, std::span<const int> keep) {
  return HermitianOperator(partial_trace(op.matrix(), dims, keep));
}

Matrix partial_transpose(const Matrix& op, const Dims& dims, std::span<const int> subsystems) {
  check_dims(op, dims, "partial_transpose");
  const int n = static_cast<int>(dims.size());
  const auto mask = subsystem_mask(subsystems, n, "partial_transpose");
  const Strides s(dims);
  const int total = product(dims);
  Matrix out(total, total);
  for (int j = 0; j < total; ++j)
    for (int i = 0; i < total; ++i) {
      int ti = i, tj = j;
      for (int k = 0; k < n; ++k) {
        if (!mask[k]) continue;
        const int di = s.digit(i, k), dj = s.digit(j, k);
        ti += (dj - di) * s.stride[k];
        tj += (di - dj) * s.stride[k];
      }
      out(ti, tj) = op(i, j);
    }
  return out;
}

HermitianOperator partial_transpose(const HermitianOperator& op, int dim_a, int dim_b) {
  const Dims dims{dim_a, dim_b};
  const int second[] = {1};
  return HermitianOperator(partial_transpose(op.matrix(), dims, second));
}

Matrix apply_local(const Matrix& op, const Dims& dims, int party, const Matrix& k) {
  check_dims(op, dims, "apply_local");
  if (party < 0 || party >= static_cast<int>(dims.size()))
    throw std::invalid_argument("apply_local: party out of range");
  if (k.cols() != dims[party]) throw std::invalid_argument("apply_local: operator input dimension mismatch");

  int pre = 1, post = 1;
  for (int q = 0; q < party; ++q) pre *= dims[q];
  for (int q = party + 1; q < static_cast<int>(dims.size()); ++q) post *= dims[q];
  const int din = dims[party];
  const int dout = static_cast<int>(k.rows());
  const int total_in = pre * din * post;
  const int total_out = pre * dout * post;

  // left multiplication: rows (a, j, c) -> (a, i, c)
  Matrix left = Matrix::Zero(total_out, total_in);
  for (int col = 0; col < total_in; ++col)
    for (int a = 0; a < pre; ++a)
      for (int i = 0; i < dout; ++i)
        for (int j = 0; j < din; ++j) {
          const cplx kij = k(i, j);
          if (kij == 0.0) continue;
          const int rin = (a * din + j) * post;
          const int rout = (a * dout + i) * post;
          for (int c = 0; c < post; ++c) left(rout + c, col) += kij * op(rin + c, col);
        }

  // right multiplication by the adjoint: columns (a, j, c) -> (a, i, c)
  Matrix out = Matrix::Zero(total_out, total_out);
  for (int a = 0; a < pre; ++a)
    for (int i = 0; i < dout; ++i)
      for (int j = 0; j < din; ++j) {
        const cplx kij = std::conj(k(i, j));
        if (kij == 0.0) continue;
        const int cin = (a * din + j) * post;
        const int cout = (a * dout + i) * post;
        for (int c = 0; c < post; ++c) out.col(cout + c) += kij * left.col(cin + c);
      }
  return out;
}

// ---- spectral -------------------------------------------------------------

EigenDecomposition eig_hermitian(const Matrix& op) {
  if (!is_hermitian(op)) throw std::invalid_argument("eig_hermitian: input is not Hermitian");
  const Matrix sym = 0.5 * (op + op.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw std::runtime_error("eig_hermitian: eigensolver failed");
  EigenDecomposition out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

EigenDecomposition eig_hermitian(const HermitianOperator& op) { return eig_hermitian(op.matrix()); }

Matrix psd_sqrt(const Matrix& op) {
  const Matrix sym = 0.5 * (op + op.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const RealVector s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix psd_inv_sqrt(const Matrix& op, double cutoff) {
  const Matrix sym = 0.5 * (op + op.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  RealVector s = es.eigenvalues();
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = s(i) > cutoff ? 1.0 / std::sqrt(s(i)) : 0.0;
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix polar_factor(const Matrix& m) {
  if (m.rows() < m.cols()) throw std::invalid_argument("polar_factor: need rows >= cols");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

// ---- Weyl-Heisenberg ------------------------------------------------------

Matrix identity(int d) { return Matrix::Identity(d, d); }

Unitary clock(int d) {
  if (d < 2) throw std::invalid_argument("clock: d must be >= 2");
  Matrix z = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) z(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * j / d);
  return Unitary(z);
}

Unitary shift(int d) {
  if (d < 2) throw std::invalid_argument("shift: d must be >= 2");
  Matrix x = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) x((j + 1) % d, j) = 1.0;
  return Unitary(x);
}

Matrix clock_shift_power(int d, int a, int b) {
  a = ((a % d) + d) % d;
  b = ((b % d) + d) % d;
  // (Z^a X^b)_{(j+b) mod d, j} = omega^{a (j+b)}
  Matrix u = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    const int row = (j + b) % d;
    u(row, j) = std::polar(1.0, 2.0 * std::numbers::pi * ((a * row) % d) / d);
  }
  return u;
}

// ---- random ---------------------------------------------------------------

namespace {
Matrix ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, j) = cplx(re, im);
    }
  return m;
}
}  // namespace

Matrix haar_unitary(int d, Rng& rng) {
  const Matrix g = ginibre(d, d, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const cplx rjj = r(j, j);
    const double a = std::abs(rjj);
    if (a > 0.0) q.col(j) *= rjj / a;
  }
  return q;
}

Matrix haar_isometry(int rows, int cols, Rng& rng) {
  if (rows < cols) throw std::invalid_argument("haar_isometry: rows < cols");
  return haar_unitary(rows, rng).leftCols(cols);
}

Vector random_pure_state(int dim, Rng& rng) {
  Vector v = ginibre(dim, 1, rng).col(0);
  return v / v.norm();
}

Matrix random_density_matrix(int dim, int rank, Rng& rng) {
  const Matrix g = ginibre(dim, rank, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

}  // namespace sdicert
