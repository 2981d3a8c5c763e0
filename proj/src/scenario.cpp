#include "sdicert/scenario.hpp"

#include <cmath>
#include <limits>

#include "sdicert/kernels.hpp"

namespace sdicert {

namespace {
int checked_pow(int base, int exp) {
  long long v = 1;
  for (int i = 0; i < exp; ++i) {
    v *= base;
    if (v > (1LL << 30)) throw std::invalid_argument("GameParams: d^(2n) too large");
  }
  return static_cast<int>(v);
}

int mod(int a, int d) { return ((a % d) + d) % d; }
}  // namespace

GameParams::GameParams(int n_parties, int dim) : n(n_parties), d(dim) {
  if (n < 2) throw std::invalid_argument("GameParams: need n >= 2 parties, got " + std::to_string(n));
  if (d < 2) throw std::invalid_argument("GameParams: need d >= 2, got " + std::to_string(d));
  tuples_ = checked_pow(d, 2 * n);
  outcomes_ = checked_pow(d, n);
}

InputTuple decode_tuple(int t, const GameParams& p) {
  if (t < 0 || t >= p.tuples()) throw std::invalid_argument("decode_tuple: index out of range");
  InputTuple out{std::vector<int>(p.n), std::vector<int>(p.n)};
  for (int k = p.n - 1; k >= 0; --k) {
    out.y[k] = t % p.d;
    t /= p.d;
  }
  for (int k = p.n - 1; k >= 0; --k) {
    out.x[k] = t % p.d;
    t /= p.d;
  }
  return out;
}

int encode_tuple(std::span<const int> x, std::span<const int> y, const GameParams& p) {
  if (static_cast<int>(x.size()) != p.n || static_cast<int>(y.size()) != p.n)
    throw std::invalid_argument("encode_tuple: input length must equal n");
  int t = 0;
  for (int v : x) {
    if (v < 0 || v >= p.d) throw std::invalid_argument("encode_tuple: input out of range");
    t = t * p.d + v;
  }
  for (int v : y) {
    if (v < 0 || v >= p.d) throw std::invalid_argument("encode_tuple: input out of range");
    t = t * p.d + v;
  }
  return t;
}

std::vector<int> decode_outcome(int b, const GameParams& p) {
  if (b < 0 || b >= p.outcomes()) throw std::invalid_argument("decode_outcome: index out of range");
  std::vector<int> out(p.n);
  for (int k = p.n - 1; k >= 0; --k) {
    out[k] = b % p.d;
    b /= p.d;
  }
  return out;
}

int encode_outcome(std::span<const int> b, const GameParams& p) {
  if (static_cast<int>(b.size()) != p.n) throw std::invalid_argument("encode_outcome: length must equal n");
  int idx = 0;
  for (int v : b) {
    if (v < 0 || v >= p.d) throw std::invalid_argument("encode_outcome: digit out of range");
    idx = idx * p.d + v;
  }
  return idx;
}

std::vector<int> win_target(std::span<const int> x, std::span<const int> y, const GameParams& p) {
  if (static_cast<int>(x.size()) != p.n || static_cast<int>(y.size()) != p.n)
    throw std::invalid_argument("win_target: input length must equal n");
  for (std::size_t k = 0; k < x.size(); ++k)
    if (x[k] < 0 || x[k] >= p.d || y[k] < 0 || y[k] >= p.d)
      throw std::invalid_argument("win_target: input out of range");
  std::vector<int> b(p.n);
  int sum = 0;
  for (int v : x) sum += v;
  b[0] = mod(sum, p.d);
  for (int k = 1; k < p.n; ++k) b[k] = mod(y[k] - y[0], p.d);
  return b;
}

int win_target_index(int tuple, const GameParams& p) {
  const auto in = decode_tuple(tuple, p);
  return encode_outcome(win_target(in.x, in.y, p), p);
}

// ---- channels -------------------------------------------------------------

KrausChannel::KrausChannel(std::vector<Matrix> kraus) : kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw std::invalid_argument("KrausChannel: empty Kraus list");
  for (const auto& k : kraus_)
    if (k.rows() != kraus_.front().rows() || k.cols() != kraus_.front().cols() || k.size() == 0)
      throw std::invalid_argument("KrausChannel: Kraus operators must share one shape");
  const double defect = tp_defect();
  if (defect > kStructTol)
    throw InvariantError("KrausChannel: not trace preserving, max|sum K^dag K - I| = " + std::to_string(defect));
}

double KrausChannel::tp_defect() const {
  Matrix s = Matrix::Zero(dim_in(), dim_in());
  for (const auto& k : kraus_) s += k.adjoint() * k;
  return max_abs(s - identity(dim_in()));
}

Matrix KrausChannel::apply(const Matrix& rho) const {
  Matrix out = Matrix::Zero(dim_out(), dim_out());
  for (const auto& k : kraus_) out += k * rho * k.adjoint();
  return out;
}

ChannelFamily::ChannelFamily(int party, int d, std::vector<KrausChannel> maps)
    : party_(party), d_(d), maps_(std::move(maps)) {
  if (d_ < 2) throw std::invalid_argument("ChannelFamily: d must be >= 2");
  if (static_cast<int>(maps_.size()) != d_ * d_)
    throw std::invalid_argument("ChannelFamily: need d^2 = " + std::to_string(d_ * d_) + " maps, got " +
                                std::to_string(maps_.size()));
  for (const auto& m : maps_) {
    if (m.dim_out() != d_)
      throw InvariantError("ChannelFamily: party " + std::to_string(party_) + " output dimension " +
                           std::to_string(m.dim_out()) + " exceeds the bound d = " + std::to_string(d_));
    if (m.dim_in() != maps_.front().dim_in())
      throw std::invalid_argument("ChannelFamily: all maps must share an input dimension");
  }
}

// ---- POVM -----------------------------------------------------------------

Povm::Povm(std::vector<Matrix> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw std::invalid_argument("Povm: no elements");
  const auto dim = elements_.front().rows();
  for (std::size_t b = 0; b < elements_.size(); ++b) {
    auto& e = elements_[b];
    if (e.rows() != dim || e.cols() != dim)
      throw std::invalid_argument("Povm: element " + std::to_string(b) + " has wrong shape");
    if (!is_hermitian(e)) throw InvariantError("Povm: element " + std::to_string(b) + " is not Hermitian");
    e = 0.5 * (e + e.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(e, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -kStructTol)
      throw InvariantError("Povm: element " + std::to_string(b) + " has negative eigenvalue " +
                           std::to_string(es.eigenvalues()(0)));
  }
  const double defect = completeness_defect();
  if (defect > kStructTol)
    throw InvariantError("Povm: elements do not sum to identity, max deviation " + std::to_string(defect));
}

double Povm::completeness_defect() const {
  Matrix s = Matrix::Zero(dim(), dim());
  for (const auto& e : elements_) s += e;
  return max_abs(s - identity(dim()));
}

// ---- Strategy -------------------------------------------------------------

Strategy::Strategy(GameParams params, DensityMatrix state, Dims input_dims, std::vector<ChannelFamily> channels,
                   Povm povm)
    : params_(params),
      state_(std::move(state)),
      input_dims_(std::move(input_dims)),
      channels_(std::move(channels)),
      povm_(std::move(povm)) {
  const int n = params_.n;
  if (static_cast<int>(input_dims_.size()) != n)
    throw InvariantError("Strategy: input_dims has " + std::to_string(input_dims_.size()) + " entries, expected " +
                         std::to_string(n));
  if (product(input_dims_) != state_.dim())
    throw InvariantError("Strategy: state dimension " + std::to_string(state_.dim()) +
                         " does not match product of input dims");
  if (static_cast<int>(channels_.size()) != n)
    throw InvariantError("Strategy: need one channel family per party");
  for (int k = 0; k < n; ++k) {
    const auto& c = channels_[k];
    if (c.party() != k) throw InvariantError("Strategy: channel family " + std::to_string(k) + " has wrong party");
    if (c.d() != params_.d) throw InvariantError("Strategy: channel family " + std::to_string(k) + " has wrong d");
    if (c.dim_in() != input_dims_[k])
      throw InvariantError("Strategy: channel family " + std::to_string(k) +
                           " input dimension does not match the state");
  }
  if (povm_.size() != params_.outcomes())
    throw InvariantError("Strategy: POVM has " + std::to_string(povm_.size()) + " elements, expected d^n = " +
                         std::to_string(params_.outcomes()));
  if (povm_.dim() != params_.outcomes())
    throw InvariantError("Strategy: POVM acts on dimension " + std::to_string(povm_.dim()) + ", expected d^n");
}

Strategy Strategy::with_state(DensityMatrix state) const {
  return Strategy(params_, std::move(state), input_dims_, channels_, povm_);
}
Strategy Strategy::with_povm(Povm povm) const {
  return Strategy(params_, state_, input_dims_, channels_, std::move(povm));
}
Strategy Strategy::with_channels(std::vector<ChannelFamily> channels) const {
  return Strategy(params_, state_, input_dims_, std::move(channels), povm_);
}

// ---- scoring --------------------------------------------------------------

namespace {
double fixed_order_mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}
}  // namespace

ScoreReport score(const Strategy& strategy) {
  ScoreReport r{0.0, kernels::win_probabilities(strategy), strategy.params()};
  for (std::size_t t = 0; t < r.per_input_win.size(); ++t) {
    const double p = r.per_input_win[t];
    if (p < -kStructTol || p > 1.0 + kStructTol)
      throw InvariantError("score: win probability " + std::to_string(p) + " out of range at tuple " +
                           std::to_string(t));
  }
  r.score = fixed_order_mean(r.per_input_win);
  return r;
}

Distribution::Distribution(GameParams params)
    : params_(params), p_(static_cast<std::size_t>(params.tuples()) * static_cast<std::size_t>(params.outcomes()), 0.0) {}

ScoreReport score_from_distribution(const Distribution& p) {
  const auto& params = p.params();
  ScoreReport r{0.0, std::vector<double>(static_cast<std::size_t>(params.tuples())), params};
  for (int t = 0; t < params.tuples(); ++t) {
    double total = 0.0;
    for (int b = 0; b < params.outcomes(); ++b) {
      const double v = p.at(t, b);
      if (!std::isfinite(v) || v < -kStructTol)
        throw DistributionError("score_from_distribution: invalid probability " + std::to_string(v) +
                                " at tuple " + std::to_string(t) + ", outcome " + std::to_string(b));
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-6)
      throw DistributionError("score_from_distribution: P(.|x,y) sums to " + std::to_string(total) +
                              " at tuple " + std::to_string(t));
    r.per_input_win[t] = p.at(t, win_target_index(t, params));
  }
  r.score = fixed_order_mean(r.per_input_win);
  return r;
}

}  // namespace sdicert
