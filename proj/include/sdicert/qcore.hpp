#pragma once

// Dense complex linear algebra used throughout the library: kets, Hermitian
// operators, tensor products, partial trace/transpose and the clock/shift
// pair. Multipartite bases are lexicographic with party 0 most significant.

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sdicert {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Dims = std::vector<int>;
using Rng = std::mt19937_64;

// Tolerance policy.
inline constexpr double kStructTol = 1e-9;  // hermiticity, trace, PSD, completeness
inline constexpr double kEigTol = 1e-8;     // eigen reconstruction
inline constexpr double kScoreTol = 1e-7;   // score comparisons

/// Raised when a structural invariant (normalisation, positivity,
/// completeness, trace preservation) does not hold.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Ket {
 public:
  /// Normalises the amplitudes. Throws on a zero vector.
  explicit Ket(Vector amplitudes);

  static Ket unnormalized(Vector amplitudes);
  static Ket basis(int dim, int index);

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const Vector& amplitudes() const { return amplitudes_; }
  bool normalized() const { return normalized_; }
  double norm() const { return amplitudes_.norm(); }

  /// |psi><psi|
  Matrix projector() const;

 private:
  Ket(Vector amplitudes, bool normalized);
  Vector amplitudes_;
  bool normalized_;
};

class HermitianOperator {
 public:
  /// Accepts matrices Hermitian within kStructTol and symmetrises them exactly.
  explicit HermitianOperator(const Matrix& m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }
  double min_eigenvalue() const;
  double max_eigenvalue() const;
  bool is_psd(double tol = kStructTol) const { return min_eigenvalue() >= -tol; }

 protected:
  Matrix m_;
};

/// Positive semidefinite, unit trace.
class DensityMatrix : public HermitianOperator {
 public:
  explicit DensityMatrix(const Matrix& m);
  explicit DensityMatrix(const Ket& psi);

  static DensityMatrix maximally_mixed(int dim);
};

class Unitary {
 public:
  explicit Unitary(Matrix m);
  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  Unitary adjoint() const { return Unitary(m_.adjoint(), Unchecked{}); }
  Unitary operator*(const Unitary& other) const { return Unitary(m_ * other.m_, Unchecked{}); }

 private:
  struct Unchecked {};
  Unitary(Matrix m, Unchecked) : m_(std::move(m)) {}
  Matrix m_;
};

struct EigenDecomposition {
  RealVector values;  // descending
  Matrix vectors;     // columns, unitary
};

// ---- structural helpers -------------------------------------------------

int product(std::span<const int> dims);
bool is_hermitian(const Matrix& m, double tol = kStructTol);
bool is_unitary(const Matrix& m, double tol = kStructTol);
double max_abs(const Matrix& m);

// ---- tensor products ----------------------------------------------------

Matrix kron(const Matrix& a, const Matrix& b);
Vector kron(const Vector& a, const Vector& b);

/// Leftmost factor is the most significant index.
Matrix tensor(std::span<const Matrix> ops);
Vector tensor(std::span<const Vector> kets);
Ket tensor(std::span<const Ket> kets);
HermitianOperator tensor(std::span<const HermitianOperator> ops);

// ---- partial operations -------------------------------------------------

/// Traces out every subsystem not listed in `keep`. The kept subsystems stay
/// in their original relative order. Works for non-Hermitian input.
Matrix partial_trace(const Matrix& op, const Dims& dims, std::span<const int> keep);
HermitianOperator partial_trace(const HermitianOperator& op, const Dims& dims,
                                std::span<const int> keep);

/// Transposes every subsystem listed in `subsystems`.
Matrix partial_transpose(const Matrix& op, const Dims& dims, std::span<const int> subsystems);
/// Bipartite form: transposes the second factor of a dA x dB operator.
HermitianOperator partial_transpose(const HermitianOperator& op, int dim_a, int dim_b);

/// (I (x) K (x) I) op (I (x) K (x) I)^dagger with K acting on `party`. K may be
/// rectangular; the returned operator has dims[party] replaced by K.rows().
Matrix apply_local(const Matrix& op, const Dims& dims, int party, const Matrix& k);

// ---- spectral -----------------------------------------------------------

EigenDecomposition eig_hermitian(const Matrix& op);
EigenDecomposition eig_hermitian(const HermitianOperator& op);

/// Square root of a PSD matrix; negative round-off eigenvalues are clipped.
Matrix psd_sqrt(const Matrix& op);
/// Pseudo-inverse square root; eigenvalues below `cutoff` map to zero.
Matrix psd_inv_sqrt(const Matrix& op, double cutoff);
/// Unitary / isometric polar factor U W^dagger of a (rows >= cols) matrix.
Matrix polar_factor(const Matrix& m);

// ---- Weyl-Heisenberg ----------------------------------------------------

Unitary clock(int d);
Unitary shift(int d);
/// Z^a X^b with exponents reduced mod d.
Matrix clock_shift_power(int d, int a, int b);
Matrix identity(int d);

// ---- random ensembles ---------------------------------------------------

/// Haar unitary: QR of a complex Ginibre matrix with phase correction.
Matrix haar_unitary(int d, Rng& rng);
/// First `cols` columns of a Haar unitary of size `rows`.
Matrix haar_isometry(int rows, int cols, Rng& rng);
Vector random_pure_state(int dim, Rng& rng);
/// Ginibre-induced mixed state of the given rank.
Matrix random_density_matrix(int dim, int rank, Rng& rng);

}  // namespace sdicert
