#pragma once

// The certification game: n sending parties, local output dimension d,
// inputs x_k, y_k in {0..d-1}, joint measurement with d^n outcomes.
//
// Index conventions (shared by every module):
//   outcome index  b = sum_k b_k d^(n-1-k)                (b_0 most significant)
//   input tuple    t = digits (x_0..x_{n-1}, y_0..y_{n-1}) in base d
//   channel index  a = x_k * d + y_k

#include <span>
#include <string>
#include <vector>

#include "sdicert/qcore.hpp"

namespace sdicert {

struct GameParams {
  int n;
  int d;

  GameParams(int n_parties, int dim);

  int outcomes() const { return outcomes_; }  // d^n
  int tuples() const { return tuples_; }      // d^(2n)
  int channel_inputs() const { return d * d; }
  bool operator==(const GameParams&) const = default;

 private:
  int outcomes_;
  int tuples_;
};

struct InputTuple {
  std::vector<int> x;
  std::vector<int> y;
};

InputTuple decode_tuple(int t, const GameParams& params);
int encode_tuple(std::span<const int> x, std::span<const int> y, const GameParams& params);
std::vector<int> decode_outcome(int b, const GameParams& params);
int encode_outcome(std::span<const int> b, const GameParams& params);

/// Winning outcome: b_0 = sum_i x_i, b_k = y_k - y_0 (mod d).
std::vector<int> win_target(std::span<const int> x, std::span<const int> y, const GameParams& params);
/// Same, on packed indices.
int win_target_index(int tuple, const GameParams& params);

/// CPTP map in Kraus form, sigma -> sum_i K_i sigma K_i^dagger.
class KrausChannel {
 public:
  /// Validates sum K^dagger K = I within kStructTol.
  explicit KrausChannel(std::vector<Matrix> kraus);
  static KrausChannel unitary(const Matrix& u) { return KrausChannel({u}); }

  int dim_in() const { return static_cast<int>(kraus_.front().cols()); }
  int dim_out() const { return static_cast<int>(kraus_.front().rows()); }
  int rank() const { return static_cast<int>(kraus_.size()); }
  const std::vector<Matrix>& kraus() const { return kraus_; }

  Matrix apply(const Matrix& rho) const;
  /// Trace-preservation defect max|sum K^dagger K - I|.
  double tp_defect() const;

 private:
  std::vector<Matrix> kraus_;
};

/// The d^2 maps T_{x,y} of one party.
class ChannelFamily {
 public:
  ChannelFamily(int party, int d, std::vector<KrausChannel> maps);

  int party() const { return party_; }
  int d() const { return d_; }
  int dim_in() const { return maps_.front().dim_in(); }
  const KrausChannel& at(int x, int y) const { return maps_[static_cast<std::size_t>(x * d_ + y)]; }
  const KrausChannel& at(int a) const { return maps_[static_cast<std::size_t>(a)]; }
  const std::vector<KrausChannel>& maps() const { return maps_; }

 private:
  int party_;
  int d_;
  std::vector<KrausChannel> maps_;
};

class Povm {
 public:
  /// Validates PSD elements and completeness within kStructTol.
  explicit Povm(std::vector<Matrix> elements);

  int size() const { return static_cast<int>(elements_.size()); }
  int dim() const { return static_cast<int>(elements_.front().rows()); }
  const Matrix& operator[](int b) const { return elements_[static_cast<std::size_t>(b)]; }
  const std::vector<Matrix>& elements() const { return elements_; }
  double completeness_defect() const;

 private:
  std::vector<Matrix> elements_;
};

class Strategy {
 public:
  /// `input_dims` are the per-party dimensions of the shared state.
  Strategy(GameParams params, DensityMatrix state, Dims input_dims, std::vector<ChannelFamily> channels,
           Povm povm);

  const GameParams& params() const { return params_; }
  const DensityMatrix& state() const { return state_; }
  const Dims& input_dims() const { return input_dims_; }
  const std::vector<ChannelFamily>& channels() const { return channels_; }
  const Povm& povm() const { return povm_; }

  Strategy with_state(DensityMatrix state) const;
  Strategy with_povm(Povm povm) const;
  Strategy with_channels(std::vector<ChannelFamily> channels) const;

 private:
  GameParams params_;
  DensityMatrix state_;
  Dims input_dims_;
  std::vector<ChannelFamily> channels_;
  Povm povm_;
};

struct ScoreReport {
  double score;
  std::vector<double> per_input_win;  // indexed by tuple
  GameParams params;

  double win_probability(std::span<const int> x, std::span<const int> y) const {
    return per_input_win[static_cast<std::size_t>(encode_tuple(x, y, params))];
  }
};

/// Exact evaluation over all d^(2n) input tuples.
ScoreReport score(const Strategy& strategy);

/// Conditional distribution P(b | x, y), stored densely as [tuple][outcome].
class Distribution {
 public:
  explicit Distribution(GameParams params);

  const GameParams& params() const { return params_; }
  double& at(int tuple, int outcome) { return p_[index(tuple, outcome)]; }
  double at(int tuple, int outcome) const { return p_[index(tuple, outcome)]; }

 private:
  std::size_t index(int tuple, int outcome) const {
    return static_cast<std::size_t>(tuple) * static_cast<std::size_t>(params_.outcomes()) +
           static_cast<std::size_t>(outcome);
  }
  GameParams params_;
  std::vector<double> p_;
};

/// Raised for non-normalised or negative conditionals.
class DistributionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ScoreReport score_from_distribution(const Distribution& p);

}  // namespace sdicert
