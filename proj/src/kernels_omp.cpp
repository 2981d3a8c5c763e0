#include <cstdlib>
#include <string>

#include <omp.h>

#include "sdicert/kernels.hpp"

namespace sdicert::kernels {

namespace {

double trace_product_real(const Matrix& a, const Matrix& b) {
  // Tr[a b] for Hermitian a, b
  return (a.cwiseProduct(b.transpose())).sum().real();
}

}  // namespace

int thread_count() { return omp_get_max_threads(); }

void configure_threads_from_env() {
  if (const char* env = std::getenv("SDI_CERT_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) omp_set_num_threads(cap);
    } catch (const std::exception&) {
      // ignore malformed values
    }
  }
}

Matrix transform_state(const Matrix& rho, const Dims& dims, std::span<const KrausChannel* const> maps) {
  Matrix cur = rho;
  Dims cur_dims = dims;
  for (std::size_t k = 0; k < maps.size(); ++k) {
    const KrausChannel* ch = maps[k];
    if (ch == nullptr) continue;
    const int party = static_cast<int>(k);
    Matrix next;
    for (const auto& kr : ch->kraus()) {
      Matrix term = apply_local(cur, cur_dims, party, kr);
      if (next.size() == 0)
        next = std::move(term);
      else
        next += term;
    }
    cur = std::move(next);
    cur_dims[k] = ch->dim_out();
  }
  return cur;
}

std::vector<double> win_probabilities(const Strategy& s) {
  const auto& p = s.params();
  const int tuples = p.tuples();
  std::vector<double> win(tuples, 0.0);
  const Matrix& rho = s.state().matrix();

#pragma omp parallel for schedule(static)
  for (int t = 0; t < tuples; ++t) {
    const auto in = decode_tuple(t, p);
    std::vector<const KrausChannel*> maps(p.n);
    for (int k = 0; k < p.n; ++k) maps[k] = &s.channels()[k].at(in.x[k], in.y[k]);
    const Matrix out = transform_state(rho, s.input_dims(), maps);
    const int b = encode_outcome(win_target(in.x, in.y, p), p);
    win[t] = trace_product_real(out, s.povm()[b]);
  }
  return win;
}

std::vector<Matrix> effective_operators(const GameParams& p, const Matrix& state, const Dims& input_dims,
                                        const std::vector<ChannelFamily>& channels) {
  const int outcomes = p.outcomes();
  std::vector<std::vector<int>> by_outcome(outcomes);
  for (int t = 0; t < p.tuples(); ++t) by_outcome[win_target_index(t, p)].push_back(t);

  const double weight = 1.0 / static_cast<double>(p.tuples());
  std::vector<Matrix> w(outcomes);

#pragma omp parallel for schedule(static)
  for (int b = 0; b < outcomes; ++b) {
    Matrix acc = Matrix::Zero(outcomes, outcomes);
    std::vector<const KrausChannel*> maps(p.n);
    for (int t : by_outcome[b]) {
      const auto in = decode_tuple(t, p);
      for (int k = 0; k < p.n; ++k) maps[k] = &channels[k].at(in.x[k], in.y[k]);
      acc += transform_state(state, input_dims, maps);
    }
    acc *= weight;
    w[b] = 0.5 * (acc + acc.adjoint());
  }
  return w;
}

Matrix kraus_gram(const Matrix& rho, const Dims& rho_dims, const Matrix& m, const Dims& m_dims, int party) {
  const int n = static_cast<int>(rho_dims.size());
  const int din = rho_dims[party];
  const int dout = m_dims[party];

  // full index for (local digit, rest index) in both spaces
  auto index_table = [&](const Dims& dims, int local) {
    std::vector<int> stride(n, 1);
    for (int k = n - 2; k >= 0; --k) stride[k] = stride[k + 1] * dims[k + 1];
    int rest = 1;
    for (int k = 0; k < n; ++k)
      if (k != party) rest *= dims[k];
    std::vector<std::vector<int>> table(local, std::vector<int>(rest));
    for (int r = 0; r < rest; ++r) {
      int rem = r, base = 0;
      for (int k = n - 1; k >= 0; --k) {
        if (k == party) continue;
        const int dk = dims[k];
        base += (rem % dk) * stride[k];
        rem /= dk;
      }
      for (int j = 0; j < local; ++j) table[j][r] = base + j * stride[party];
    }
    return table;
  };
  const auto in_idx = index_table(rho_dims, din);
  const auto out_idx = index_table(m_dims, dout);
  const int rest = static_cast<int>(in_idx.front().size());

  auto block = [rest](const Matrix& src, const std::vector<int>& rows, const std::vector<int>& cols) {
    Matrix blk(rest, rest);
    for (int c = 0; c < rest; ++c)
      for (int r = 0; r < rest; ++r) blk(r, c) = src(rows[r], cols[c]);
    return blk;
  };

  // A[j][j'] = rho blocks, Bt[i][i'] = transpose of M block (i', i)
  std::vector<Matrix> a(static_cast<std::size_t>(din * din)), bt(static_cast<std::size_t>(dout * dout));
  for (int j = 0; j < din; ++j)
    for (int jp = 0; jp < din; ++jp) a[j * din + jp] = block(rho, in_idx[j], in_idx[jp]);
  for (int i = 0; i < dout; ++i)
    for (int ip = 0; ip < dout; ++ip)
      bt[i * dout + ip] = block(m, out_idx[ip], out_idx[i]).transpose();

  const int dim = dout * din;
  Matrix q(dim, dim);
  for (int i = 0; i < dout; ++i)
    for (int j = 0; j < din; ++j)
      for (int ip = 0; ip < dout; ++ip)
        for (int jp = 0; jp < din; ++jp) {
          const cplx s = a[j * din + jp].cwiseProduct(bt[i * dout + ip]).sum();
          q(ip * din + jp, i * din + j) = s;
        }
  return 0.5 * (q + q.adjoint());
}

std::vector<Matrix> party_grams(const Strategy& s, int party) {
  const auto& p = s.params();
  const int n = p.n, d = p.d;
  const int inputs = d * d;
  int rest_count = 1;
  for (int k = 0; k < n - 1; ++k) rest_count *= inputs;

  Dims rho_dims(n, d);
  rho_dims[party] = s.input_dims()[party];
  const Dims m_dims(n, d);

  // channel index of every other party for rest index r
  auto rest_inputs = [&](int r) {
    std::vector<int> a(n, -1);
    for (int k = n - 1; k >= 0; --k) {
      if (k == party) continue;
      a[k] = r % inputs;
      r /= inputs;
    }
    return a;
  };

  std::vector<Matrix> partial(rest_count);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rest_count; ++r) {
    const auto a = rest_inputs(r);
    std::vector<const KrausChannel*> maps(n, nullptr);
    for (int k = 0; k < n; ++k)
      if (k != party) maps[k] = &s.channels()[k].at(a[k]);
    partial[r] = transform_state(s.state().matrix(), s.input_dims(), maps);
  }

  const double weight = 1.0 / static_cast<double>(p.tuples());
  std::vector<Matrix> grams(inputs);
#pragma omp parallel for schedule(static)
  for (int own = 0; own < inputs; ++own) {
    const int dim = d * rho_dims[party];
    Matrix acc = Matrix::Zero(dim, dim);
    std::vector<int> x(n), y(n);
    for (int r = 0; r < rest_count; ++r) {
      auto a = rest_inputs(r);
      a[party] = own;
      for (int k = 0; k < n; ++k) {
        x[k] = a[k] / d;
        y[k] = a[k] % d;
      }
      const int b = encode_outcome(win_target(x, y, p), p);
      acc += kraus_gram(partial[r], rho_dims, s.povm()[b], m_dims, party);
    }
    grams[own] = weight * acc;
  }
  return grams;
}

}  // namespace sdicert::kernels
