#include "sdicert/kernels.hpp"

namespace sdicert::reference {

std::vector<double> win_probabilities(const Strategy& s) {
  const auto& p = s.params();
  const Matrix& rho = s.state().matrix();
  std::vector<double> win(p.tuples(), 0.0);

  for (int t = 0; t < p.tuples(); ++t) {
    const auto in = decode_tuple(t, p);
    std::vector<const KrausChannel*> maps;
    for (int k = 0; k < p.n; ++k) maps.push_back(&s.channels()[k].at(in.x[k], in.y[k]));

    // sum over every combination of Kraus indices of (K_1 x ... x K_n) rho (...)^dagger
    std::vector<int> choice(p.n, 0);
    Matrix out = Matrix::Zero(p.outcomes(), p.outcomes());
    for (;;) {
      std::vector<Matrix> factors;
      for (int k = 0; k < p.n; ++k) factors.push_back(maps[k]->kraus()[choice[k]]);
      const Matrix big = tensor(factors);
      out += big * rho * big.adjoint();
      int k = p.n - 1;
      while (k >= 0 && ++choice[k] == maps[k]->rank()) choice[k--] = 0;
      if (k < 0) break;
    }
    const int b = encode_outcome(win_target(in.x, in.y, p), p);
    win[t] = (out * s.povm()[b]).trace().real();
  }
  return win;
}

double score(const Strategy& s) {
  const auto win = win_probabilities(s);
  double acc = 0.0;
  for (double w : win) acc += w;
  return acc / static_cast<double>(win.size());
}

}  // namespace sdicert::reference
