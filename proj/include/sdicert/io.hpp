#pragma once

// Scenario files (JSON), sweep specifications and CSV emission, plus the
// size envelope shared by every command.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdicert/certify.hpp"
#include "sdicert/scenario.hpp"

namespace sdicert::io {

using json = nlohmann::json;

/// Malformed input. The message starts with the offending field path,
/// e.g. "povm[3][1]: expected 4 entries, got 3".
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when (n, d) leaves the supported envelope.
class SizeGuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline constexpr int kMaxOutcomes = 81;    // d^n
inline constexpr int kMaxTuples = 6561;    // d^(2n)

void check_size(const GameParams& params);

/// Rows of [re, im] pairs (plain numbers are read as real).
Matrix parse_matrix(const json& j, const std::string& path);
json matrix_to_json(const Matrix& m);

GameParams parse_params(const json& j);

/// Builds a strategy from a scenario document. Shape and type problems raise
/// ParseError; physically invalid content (non-PSD, incomplete, not trace
/// preserving) raises InvariantError. Both carry the field path.
Strategy parse_scenario(const json& j);
Strategy load_scenario(const std::string& path);
json read_json_file(const std::string& path);

/// Fully explicit scenario document for `s`; parse_scenario reproduces it.
json scenario_to_json(const Strategy& s);

enum class SweepTarget { State, Povm };

struct SweepSpec {
  json scenario;            // template; the swept visibility is written into it
  SweepTarget target = SweepTarget::State;
  double min = 0.0;
  double max = 1.0;
  int steps = 11;
};

SweepSpec parse_sweep(const json& j);

struct SweepRow {
  double v;
  double score;
  bool gme_certified;
  int certified_entangled_ops;
  double bound_1_over_d;
};

/// Margin applied when certifying computed scores in a sweep.
inline constexpr double kSweepMargin = 1e-9;

std::vector<double> sweep_grid(const SweepSpec& spec);
std::vector<SweepRow> run_sweep(const SweepSpec& spec);
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

/// Reads "x_1..x_n, y_1..y_n, b_1..b_n, p" rows. Unlisted events have
/// probability zero. Normalisation is checked later by score_from_distribution.
Distribution read_distribution_csv(std::istream& in, const GameParams& params);

json certification_to_json(const CertificationReport& r);

}  // namespace sdicert::io
