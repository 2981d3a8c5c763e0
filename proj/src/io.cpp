#include "sdicert/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "sdicert/catalog.hpp"

namespace sdicert::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ParseError(path + ": " + what); }

const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path, "missing field \"" + key + "\"");
  return *it;
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

double as_real(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::string kind_of(const json& j, const std::string& path) {
  if (j.is_string()) return j.get<std::string>();
  const json& k = field(j, "kind", path);
  if (!k.is_string()) fail(path + ".kind", "expected a string");
  return k.get<std::string>();
}

catalog::Visibility visibility(const json& j, const std::string& path, bool required) {
  if (!j.is_object() || !j.contains("v")) {
    if (required) fail(path, "missing field \"v\"");
    return catalog::Visibility(1.0);
  }
  const double v = as_real(j["v"], path + ".v");
  if (!(v >= 0.0 && v <= 1.0)) fail(path + ".v", "visibility must lie in [0, 1]");
  return catalog::Visibility(v);
}

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) fail(path, what);
}

/// Runs `make`, prefixing any invariant violation with `path`.
template <typename F>
auto at_path(const std::string& path, F&& make) {
  try {
    return make();
  } catch (const InvariantError& e) {
    throw InvariantError(path + ": " + e.what());
  } catch (const ParseError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

DensityMatrix parse_state(const json& j, const GameParams& p, int dim) {
  const std::string path = "state";
  if (j.is_object() && j.contains("matrix")) {
    const Matrix m = parse_matrix(j["matrix"], path + ".matrix");
    require(m.rows() == dim, path + ".matrix", "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
    return at_path(path, [&] { return DensityMatrix(m); });
  }
  const std::string kind = kind_of(j, path);
  return at_path(path, [&]() -> DensityMatrix {
    const bool square = dim == p.outcomes();
    if (kind == "ghz") {
      require(square, path, "catalog states need d-dimensional inputs");
      return catalog::noisy_ghz(p.n, p.d, visibility(j, path, false));
    }
    if (kind == "noisy_ghz") {
      require(square, path, "catalog states need d-dimensional inputs");
      return catalog::noisy_ghz(p.n, p.d, visibility(j, path, true));
    }
    if (kind == "max_entangled") {
      require(p.n == 2 && square, path, "max_entangled needs n = 2");
      return catalog::noisy_ghz(2, p.d, visibility(j, path, false));
    }
    if (kind == "w") {
      require(p.n == 3 && p.d == 2 && square, path, "w needs (n, d) = (3, 2)");
      return catalog::noisy_w(visibility(j, path, false));
    }
    if (kind == "dicke") {
      require(p.n == 4 && p.d == 2 && square, path, "dicke needs (n, d) = (4, 2)");
      return catalog::noisy_dicke(visibility(j, path, false));
    }
    fail(path + ".kind", "unknown state \"" + kind + "\"");
  });
}

std::vector<ChannelFamily> parse_channels(const json& j, const GameParams& p) {
  const std::string path = "channels";
  if (!j.is_array()) {
    const std::string kind = kind_of(j, path);
    if (kind == "clock_shift") return catalog::clock_shift_channels(p.n, p.d);
    if (kind == "hybrid") {
      require(p.n == 2, path, "hybrid channels need n = 2");
      return catalog::hybrid_channels(p.d);
    }
    fail(path + ".kind", "unknown channel family \"" + kind + "\"");
  }

  const int per_party = p.channel_inputs();
  std::vector<std::vector<std::optional<KrausChannel>>> slots(p.n, std::vector<std::optional<KrausChannel>>(per_party));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string ep = path + "[" + std::to_string(i) + "]";
    const json& e = j[i];
    const int k = as_int(field(e, "party", ep), ep + ".party");
    const int x = as_int(field(e, "x", ep), ep + ".x");
    const int y = as_int(field(e, "y", ep), ep + ".y");
    require(k >= 0 && k < p.n, ep + ".party", "out of range");
    require(x >= 0 && x < p.d, ep + ".x", "out of range");
    require(y >= 0 && y < p.d, ep + ".y", "out of range");
    auto& slot = slots[k][x * p.d + y];
    require(!slot, ep, "duplicate map for this (party, x, y)");
    const json& kr = field(e, "kraus", ep);
    require(kr.is_array() && !kr.empty(), ep + ".kraus", "expected a non-empty list of matrices");
    std::vector<Matrix> ops;
    for (std::size_t r = 0; r < kr.size(); ++r)
      ops.push_back(parse_matrix(kr[r], ep + ".kraus[" + std::to_string(r) + "]"));
    slot.emplace(at_path(ep, [&] { return KrausChannel(std::move(ops)); }));
  }

  std::vector<ChannelFamily> out;
  for (int k = 0; k < p.n; ++k) {
    std::vector<KrausChannel> maps;
    for (int a = 0; a < per_party; ++a) {
      if (!slots[k][a])
        fail(path, "no map for party " + std::to_string(k) + ", x = " + std::to_string(a / p.d) +
                       ", y = " + std::to_string(a % p.d));
      maps.push_back(std::move(*slots[k][a]));
    }
    out.push_back(at_path(path, [&] { return ChannelFamily(k, p.d, std::move(maps)); }));
  }
  return out;
}

Povm parse_povm(const json& j, const GameParams& p) {
  const std::string path = "povm";
  if (j.is_array()) {
    require(static_cast<int>(j.size()) == p.outcomes(), path,
            "expected d^n = " + std::to_string(p.outcomes()) + " elements, got " + std::to_string(j.size()));
    std::vector<Matrix> elements;
    for (std::size_t b = 0; b < j.size(); ++b) {
      const std::string ep = path + "[" + std::to_string(b) + "]";
      elements.push_back(parse_matrix(j[b], ep));
      require(elements.back().rows() == p.outcomes(), ep, "expected a d^n x d^n matrix");
    }
    return at_path(path, [&] { return Povm(std::move(elements)); });
  }
  const std::string kind = kind_of(j, path);
  return at_path(path, [&]() -> Povm {
    if (kind == "ghz_basis") return catalog::ghz_basis_measurement(p.n, p.d);
    if (kind == "noisy_bsm") {
      require(p.n == 2, path, "noisy_bsm needs n = 2");
      return catalog::noisy_bsm(p.d, visibility(j, path, true));
    }
    if (kind == "coloured_bsm") {
      require(p.n == 2 && p.d == 2, path, "coloured_bsm needs (n, d) = (2, 2)");
      return catalog::coloured_noise_bsm(visibility(j, path, true));
    }
    if (kind == "hybrid") {
      require(p.n == 2, path, "hybrid needs n = 2");
      const int m = as_int(field(j, "m", path), path + ".m");
      require(m >= 0 && m <= p.d, path + ".m", "need 0 <= m <= d");
      return catalog::hybrid_measurement(p.d, m);
    }
    fail(path + ".kind", "unknown measurement \"" + kind + "\"");
  });
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

}  // namespace

void check_size(const GameParams& p) {
  if (p.outcomes() > kMaxOutcomes || p.tuples() > kMaxTuples)
    throw SizeGuardError("(n, d) = (" + std::to_string(p.n) + ", " + std::to_string(p.d) +
                         ") exceeds the size guard d^n <= 81, d^(2n) <= 6561");
}

Matrix parse_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Matrix m;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    const json& row = j[r];
    if (!row.is_array() || row.empty()) fail(rp, "expected a non-empty row");
    if (r == 0) {
      cols = row.size();
      m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    } else if (row.size() != cols) {
      fail(rp, "expected " + std::to_string(cols) + " entries, got " + std::to_string(row.size()));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      const std::string cp = rp + "[" + std::to_string(c) + "]";
      const json& e = row[c];
      if (e.is_number()) {
        m(r, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        fail(cp, "expected a number or an [re, im] pair");
      }
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

GameParams parse_params(const json& j) {
  const json& p = field(j, "params", "scenario");
  const int n = as_int(field(p, "n", "params"), "params.n");
  const int d = as_int(field(p, "d", "params"), "params.d");
  if (n < 2) fail("params.n", "need n >= 2");
  if (d < 2) fail("params.d", "need d >= 2");
  if (n > 16 || d > 64) throw SizeGuardError("params: (n, d) far outside the size guard");
  GameParams params(n, d);
  check_size(params);
  return params;
}

Strategy parse_scenario(const json& j) {
  if (!j.is_object()) fail("scenario", "expected an object");
  const GameParams p = parse_params(j);
  auto channels = parse_channels(field(j, "channels", "scenario"), p);
  Dims input_dims;
  for (const auto& c : channels) input_dims.push_back(c.dim_in());
  const int dim = product(input_dims);
  if (dim > 4096) throw SizeGuardError("channels: input dimension " + std::to_string(dim) + " is too large");
  DensityMatrix state = parse_state(field(j, "state", "scenario"), p, dim);
  Povm povm = parse_povm(field(j, "povm", "scenario"), p);
  return at_path("scenario", [&] {
    return Strategy(p, std::move(state), std::move(input_dims), std::move(channels), std::move(povm));
  });
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": invalid JSON (" + e.what() + ")");
  }
}

Strategy load_scenario(const std::string& path) { return parse_scenario(read_json_file(path)); }

json scenario_to_json(const Strategy& s) {
  const auto& p = s.params();
  json j;
  j["params"] = {{"n", p.n}, {"d", p.d}};
  j["state"] = {{"matrix", matrix_to_json(s.state().matrix())}};
  json channels = json::array();
  for (const auto& fam : s.channels())
    for (int a = 0; a < p.channel_inputs(); ++a) {
      json kraus = json::array();
      for (const auto& k : fam.at(a).kraus()) kraus.push_back(matrix_to_json(k));
      channels.push_back({{"party", fam.party()}, {"x", a / p.d}, {"y", a % p.d}, {"kraus", std::move(kraus)}});
    }
  j["channels"] = std::move(channels);
  json povm = json::array();
  for (const auto& e : s.povm().elements()) povm.push_back(matrix_to_json(e));
  j["povm"] = std::move(povm);
  return j;
}

SweepSpec parse_sweep(const json& j) {
  SweepSpec spec;
  if (!j.is_object()) fail("sweep spec", "expected an object");
  spec.scenario = field(j, "scenario", "sweep spec");
  const json& sw = field(j, "sweep", "sweep spec");
  if (sw.contains("variable")) {
    if (!sw["variable"].is_string() || sw["variable"].get<std::string>() != "v")
      fail("sweep.variable", "only \"v\" can be swept");
  }
  const json& target = field(sw, "target", "sweep");
  if (!target.is_string()) fail("sweep.target", "expected \"state\" or \"povm\"");
  const std::string t = target.get<std::string>();
  if (t == "state")
    spec.target = SweepTarget::State;
  else if (t == "povm")
    spec.target = SweepTarget::Povm;
  else
    fail("sweep.target", "expected \"state\" or \"povm\"");
  spec.min = as_real(field(sw, "min", "sweep"), "sweep.min");
  spec.max = as_real(field(sw, "max", "sweep"), "sweep.max");
  spec.steps = as_int(field(sw, "steps", "sweep"), "sweep.steps");
  if (!(spec.min <= spec.max)) fail("sweep", "need min <= max");
  if (spec.min < 0.0 || spec.max > 1.0) fail("sweep", "visibility grid must lie in [0, 1]");
  if (spec.steps < 2) fail("sweep.steps", "need at least 2 steps");
  if (spec.steps > 100000) fail("sweep.steps", "too many steps");

  const std::string key = spec.target == SweepTarget::State ? "state" : "povm";
  const json& slot = field(spec.scenario, key, "scenario");
  if (!slot.is_object() || !slot.contains("kind")) fail("scenario." + key, "swept entry must be a catalog reference");
  if (spec.target == SweepTarget::Povm) {
    const std::string kind = kind_of(slot, "scenario.povm");
    if (kind != "noisy_bsm" && kind != "coloured_bsm")
      fail("scenario.povm.kind", "\"" + kind + "\" has no visibility to sweep");
  }
  parse_params(spec.scenario);
  return spec;
}

std::vector<double> sweep_grid(const SweepSpec& spec) {
  std::vector<double> grid(spec.steps);
  for (int i = 0; i < spec.steps; ++i)
    grid[i] = i == spec.steps - 1 ? spec.max : spec.min + (spec.max - spec.min) * i / (spec.steps - 1);
  return grid;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  const char* key = spec.target == SweepTarget::State ? "state" : "povm";
  std::vector<SweepRow> rows;
  for (double v : sweep_grid(spec)) {
    json doc = spec.scenario;
    doc[key]["v"] = v;
    const Strategy s = parse_scenario(doc);
    const double a = score(s).score;
    const auto cert = certify(std::clamp(a, 0.0, 1.0), s.params(), kSweepMargin);
    rows.push_back({v, a, cert.gme_certified, cert.certified_entangled_ops, biseparable_bound(s.params())});
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "v,score,gme_certified,certified_entangled_ops,bound_1_over_d\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.10g,%.15g,%s,%d,%.15g\n", r.v, r.score, fmt_bool(r.gme_certified).c_str(),
                  r.certified_entangled_ops, r.bound_1_over_d);
    out << buf;
  }
}

Distribution read_distribution_csv(std::istream& in, const GameParams& p) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) {
      c.erase(0, c.find_first_not_of(" \t\r"));
      c.erase(c.find_last_not_of(" \t\r") + 1);
      cells.push_back(c);
    }
    return cells;
  };

  std::string line;
  if (!std::getline(in, line)) throw ParseError("csv: empty input");
  const auto header = split(line);
  std::vector<std::string> expected;
  for (const char* prefix : {"x_", "y_", "b_"})
    for (int k = 1; k <= p.n; ++k) expected.push_back(prefix + std::to_string(k));
  expected.push_back("p");
  if (header != expected) {
    std::string want;
    for (const auto& e : expected) want += (want.empty() ? "" : ",") + e;
    throw ParseError("csv header: expected \"" + want + "\"");
  }

  Distribution dist(p);
  std::vector<bool> seen(static_cast<std::size_t>(p.tuples()) * p.outcomes(), false);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "csv line " + std::to_string(lineno);
    const auto cells = split(line);
    if (cells.size() != expected.size())
      throw ParseError(where + ": expected " + std::to_string(expected.size()) + " columns, got " +
                       std::to_string(cells.size()));
    std::vector<int> digits;
    for (std::size_t c = 0; c + 1 < cells.size(); ++c) {
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(cells[c], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cells[c].size())
        throw ParseError(where + ", column " + expected[c] + ": expected an integer");
      if (v < 0 || v >= p.d) throw ParseError(where + ", column " + expected[c] + ": value out of range");
      digits.push_back(v);
    }
    double prob = 0.0;
    try {
      std::size_t used = 0;
      prob = std::stod(cells.back(), &used);
      if (used != cells.back().size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(where + ", column p: expected a number");
    }
    const std::span<const int> all(digits);
    const int t = encode_tuple(all.subspan(0, p.n), all.subspan(p.n, p.n), p);
    const int b = encode_outcome(all.subspan(2 * p.n, p.n), p);
    const std::size_t slot = static_cast<std::size_t>(t) * p.outcomes() + b;
    if (seen[slot]) throw ParseError(where + ": duplicate event");
    seen[slot] = true;
    dist.at(t, b) = prob;
  }
  return dist;
}

json certification_to_json(const CertificationReport& r) {
  json thresholds = json::array();
  for (const auto& [k, bound] : r.thresholds) thresholds.push_back({{"k", k}, {"bound", bound}});
  return {{"score", r.score},
          {"margin", r.margin},
          {"params", {{"n", r.params.n}, {"d", r.params.d}}},
          {"gme_certified", r.gme_certified},
          {"biseparable_bound", biseparable_bound(r.params)},
          {"certified_entangled_ops", r.certified_entangled_ops},
          {"thresholds", std::move(thresholds)}};
}

}  // namespace sdicert::io
