#pragma once

// Independent reference computations for the unit tests. Everything here is
// written from the definitions with explicit index loops, sharing nothing
// with the library beyond the Matrix type.

#include <cmath>
#include <complex>
#include <vector>

#include "sdicert/qcore.hpp"

namespace testing {

using sdicert::cplx;
using sdicert::Dims;
using sdicert::Matrix;
using sdicert::Vector;

inline double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline std::vector<int> digits_of(int index, const Dims& dims) {
  std::vector<int> dg(dims.size());
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    dg[k] = index % dims[k];
    index /= dims[k];
  }
  return dg;
}

inline int index_of(const std::vector<int>& dg, const Dims& dims) {
  int i = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) i = i * dims[k] + dg[k];
  return i;
}

inline int prod(const Dims& dims) {
  int p = 1;
  for (int d : dims) p *= d;
  return p;
}

inline Matrix naive_kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

/// Sum over matching traced digits, element by element.
inline Matrix naive_partial_trace(const Matrix& op, const Dims& dims, const std::vector<int>& keep) {
  Dims kept;
  for (int k : keep) kept.push_back(dims[k]);
  const int out_dim = prod(kept);
  Matrix out = Matrix::Zero(out_dim, out_dim);
  const int dim = prod(dims);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const auto di = digits_of(i, dims), dj = digits_of(j, dims);
      bool match = true;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        bool is_kept = false;
        for (int q : keep) is_kept = is_kept || q == static_cast<int>(k);
        if (!is_kept && di[k] != dj[k]) match = false;
      }
      if (!match) continue;
      std::vector<int> ri, rj;
      for (int q : keep) {
        ri.push_back(di[q]);
        rj.push_back(dj[q]);
      }
      out(index_of(ri, kept), index_of(rj, kept)) += op(i, j);
    }
  return out;
}

inline Matrix naive_partial_transpose(const Matrix& op, const Dims& dims, const std::vector<int>& subsystems) {
  const int dim = prod(dims);
  Matrix out(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      auto di = digits_of(i, dims), dj = digits_of(j, dims);
      for (int s : subsystems) std::swap(di[s], dj[s]);
      out(index_of(di, dims), index_of(dj, dims)) = op(i, j);
    }
  return out;
}

/// I (x) ... (x) K (x) ... (x) I built factor by factor.
inline Matrix embed(const Matrix& k, const Dims& dims, int party) {
  Matrix acc = Matrix::Identity(1, 1);
  for (int q = 0; q < static_cast<int>(dims.size()); ++q)
    acc = naive_kron(acc, q == party ? k : Matrix(Matrix::Identity(dims[q], dims[q])));
  return acc;
}

/// Clock and shift from their defining action: X|j> = |j+1>, Z|j> = w^j |j>.
inline Matrix shift_op(int d) {
  Matrix x = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) x((j + 1) % d, j) = 1.0;
  return x;
}

inline Matrix clock_op(int d) {
  Matrix z = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) z(j, j) = std::polar(1.0, 2.0 * M_PI * j / d);
  return z;
}

inline Matrix power(const Matrix& m, int e) {
  Matrix acc = Matrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < e; ++i) acc = acc * m;
  return acc;
}

inline int mod(int a, int d) { return ((a % d) + d) % d; }

inline Vector ghz(int n, int d) {
  int dim = 1;
  for (int k = 0; k < n; ++k) dim *= d;
  Vector v = Vector::Zero(dim);
  for (int i = 0; i < d; ++i) {
    int idx = 0;
    for (int k = 0; k < n; ++k) idx = idx * d + i;
    v(idx) = 1.0 / std::sqrt(double(d));
  }
  return v;
}

}  // namespace testing
