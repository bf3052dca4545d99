#include "noiselab/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "noiselab/csv.hpp"
#include "noiselab/errors.hpp"

namespace noiselab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw ValidationError("config: " + path + ": " + why);
}

void expect_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) fail(path + "/" + it.key(), "unknown key");
  }
}

double get_number(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + "/" + key, "expected a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + "/" + key, "expected an integer");
  return v.get<int>();
}

std::string get_string(const json& obj, const std::string& path, const char* key,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_array(const json& obj, const std::string& path, const char* key,
                              const std::vector<double>& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array()) fail(path + "/" + key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) fail(path + "/" + key, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  if (out.empty()) fail(path + "/" + key, "empty array");
  return out;
}

FieldSpec parse_field(const json& obj, const std::string& path, FieldSpec spec) {
  expect_keys(obj, path,
              {"kind", "dim", "sign", "a", "c", "amplitude", "radius", "mollify"});
  spec.kind = get_string(obj, path, "kind", spec.kind);
  spec.dim = get_int(obj, path, "dim", spec.dim);
  spec.sign = get_number(obj, path, "sign", spec.sign);
  spec.a = get_number(obj, path, "a", spec.a);
  spec.c = get_array(obj, path, "c", spec.c);
  spec.amplitude = get_number(obj, path, "amplitude", spec.amplitude);
  spec.radius = get_number(obj, path, "radius", spec.radius);
  spec.mollify = get_number(obj, path, "mollify", spec.mollify);
  return spec;
}

GridSpec parse_grid(const json& obj, const std::string& path, GridSpec grid) {
  expect_keys(obj, path, {"dt", "box_lo", "box_hi", "dx"});
  grid.dt = get_number(obj, path, "dt", grid.dt);
  grid.box_lo = get_array(obj, path, "box_lo", grid.box_lo);
  grid.box_hi = get_array(obj, path, "box_hi", grid.box_hi);
  grid.dx = get_number(obj, path, "dx", grid.dx);
  return grid;
}

std::string join_numbers(const std::vector<double>& xs) {
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += CsvWriter::format(xs[i]);
  }
  return s + "]";
}

}  // namespace

DriftField build_field(const FieldSpec& spec) {
  DriftField f;
  if (spec.kind == "zero") {
    f = make_zero_drift(spec.dim);
  } else if (spec.kind == "constant") {
    if (spec.c.size() < 1 || spec.c.size() > static_cast<std::size_t>(kMaxDim))
      throw ValidationError("field: constant drift needs 1.." + std::to_string(kMaxDim) +
                            " components");
    Vec c(static_cast<int>(spec.c.size()));
    for (int i = 0; i < c.dim(); ++i) c[i] = spec.c[static_cast<std::size_t>(i)];
    f = make_constant_drift(c);
  } else if (spec.kind == "linear") {
    f = make_linear_drift(spec.a);
  } else if (spec.kind == "rotation") {
    f = make_rotation_drift();
  } else if (spec.kind == "sqrt") {
    if (spec.sign != 1.0 && spec.sign != -1.0)
      throw ValidationError("field: sqrt drift sign must be +1 or -1");
    f = make_sqrt_drift(spec.sign > 0 ? 1 : -1);
  } else if (spec.kind == "sqrt2d") {
    f = make_sqrt_drift_2d();
  } else if (spec.kind == "bump") {
    if (spec.radius <= 0.0) throw ValidationError("field: bump radius must be positive");
    f = make_bump_drift(spec.amplitude, spec.radius);
  } else {
    throw ValidationError("field: unknown kind '" + spec.kind + "'");
  }
  if (spec.mollify < 0.0) throw ValidationError("field: mollify width must be >= 0");
  if (spec.mollify > 0.0) f = mollify(f, MollifierKernel(f.dim, spec.mollify));
  return f;
}

ScenarioConfig default_config(const std::string& scenario) {
  ScenarioConfig cfg;
  cfg.scenario = scenario;
  if (scenario == "flow-stability") {
    cfg.field = {"sqrt", 1, +1.0, 1.0, {1.0}, 1.0, 1.0, 0.0};
    cfg.grid.dt = 1e-2;
    cfg.grid.dx = 0.5;
    cfg.paths = 1000;
    cfg.seed = 2026;
    cfg.eps_ladder = {0.2, 0.1, 0.05, 0.025, 0.0125};
  } else if (scenario == "transport-dichotomy") {
    cfg.field = {"sqrt", 1, -1.0, 1.0, {1.0}, 1.0, 1.0, 0.0};
    cfg.grid.dt = 1e-3;
    cfg.grid.dx = 1.0 / 64.0;  // base level; two refinements reach 1/256
    cfg.seed = 424242;
  } else if (scenario == "weak-residual") {
    cfg.field = {"sqrt", 1, +1.0, 1.0, {1.0}, 1.0, 1.0, 0.1};
    cfg.T = 0.5;
    cfg.grid.dt = 1e-2;  // coarsest of three halvings
    cfg.grid.box_lo = {-2.0};
    cfg.grid.box_hi = {2.0};
    cfg.grid.dx = 0.05;
    cfg.seed = 7101;
  } else if (scenario == "weakstar-stability") {
    // attractive sign: the contracting flow damps the pulled-back oscillations by n = 32
    cfg.field = {"sqrt", 1, -1.0, 1.0, {1.0}, 1.0, 1.0, 0.1};
    cfg.grid.dt = 2e-3;
    cfg.grid.box_lo = {-9.0};
    cfg.grid.box_hi = {9.0};
    cfg.seed = 3203;
  } else if (scenario == "commutator-ladder") {
    cfg.field = {"sqrt", 1, +1.0, 1.0, {1.0}, 1.0, 1.0, 0.0};
    cfg.seed = 11;
  } else if (scenario == "jacobian-regularity") {
    cfg.field = {"sqrt2d", 2, +1.0, 1.0, {1.0}, 1.0, 1.0, 0.0};
    cfg.T = 0.3;
    cfg.grid.dt = 1e-3;
    cfg.grid.box_lo = {-1.0, -1.0};
    cfg.grid.box_hi = {1.0, 1.0};
    cfg.seed = 909;
    cfg.eps_ladder = {0.2, 0.1, 0.05};
  } else if (scenario == "zvonkin") {
    cfg.field = {"constant", 1, +1.0, 1.0, {1.0}, 1.0, 1.0, 0.0};
    cfg.grid.dt = 1e-2;  // coarse level; the run also halves it
    cfg.grid.box_lo = {-8.0};
    cfg.grid.box_hi = {8.0};
    cfg.paths = 250;
    cfg.seed = 5150;
    cfg.lambda_ladder = {1.0};
  } else if (scenario == "gradient-bound") {
    cfg.field = {"sqrt", 1, -1.0, 1.0, {1.0}, 1.0, 1.0, 0.1};
    cfg.grid.dt = 5e-3;
    cfg.grid.box_lo = {-2.0};
    cfg.grid.box_hi = {2.0};
    cfg.grid.dx = 0.02;
    cfg.seed = 99;
  } else {
    throw ValidationError("unknown scenario '" + scenario + "'");
  }
  return cfg;
}

void validate_config(const ScenarioConfig& cfg) {
  if (cfg.scenario.empty()) throw ValidationError("config: /scenario: missing");
  if (!(cfg.sigma >= 0.0)) throw ValidationError("config: /sigma: must be >= 0");
  if (!(cfg.T > 0.0)) throw ValidationError("config: /T: must be > 0");
  if (!(cfg.grid.dt > 0.0)) throw ValidationError("config: /grid/dt: must be > 0");
  if (!(cfg.grid.dx > 0.0)) throw ValidationError("config: /grid/dx: must be > 0");
  if (cfg.grid.box_lo.size() != cfg.grid.box_hi.size())
    throw ValidationError("config: /grid/box_lo,box_hi: dimension mismatch");
  if (cfg.grid.box_lo.empty() || cfg.grid.box_lo.size() > static_cast<std::size_t>(kMaxDim))
    throw ValidationError("config: /grid/box_lo: dimension out of range");
  for (std::size_t i = 0; i < cfg.grid.box_lo.size(); ++i)
    if (!(cfg.grid.box_lo[i] < cfg.grid.box_hi[i]))
      throw ValidationError("config: /grid/box_lo: must be strictly below box_hi");
  if (cfg.paths < 1) throw ValidationError("config: /paths: must be >= 1");
  if (cfg.workers < 1) throw ValidationError("config: /workers: must be >= 1");
  if (cfg.out_dir.empty()) throw ValidationError("config: /out_dir: must not be empty");
  for (double e : cfg.eps_ladder)
    if (!(e > 0.0)) throw ValidationError("config: /eps_ladder: entries must be > 0");
  for (double l : cfg.lambda_ladder)
    if (!(l >= 0.0)) throw ValidationError("config: /lambda_ladder: entries must be >= 0");
  build_field(cfg.field);  // surfaces field-spec errors at config time
}

ScenarioConfig parse_config_text(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: not valid JSON: ") + e.what());
  }
  expect_keys(root, "", {"scenario", "field", "sigma", "T", "grid", "seed", "paths",
                         "eps_ladder", "lambda_ladder", "out_dir", "workers"});
  if (!root.contains("scenario")) throw ValidationError("config: /scenario: missing");
  ScenarioConfig cfg = default_config(get_string(root, "", "scenario", ""));
  if (root.contains("field")) cfg.field = parse_field(root.at("field"), "/field", cfg.field);
  cfg.sigma = get_number(root, "", "sigma", cfg.sigma);
  cfg.T = get_number(root, "", "T", cfg.T);
  if (root.contains("grid")) cfg.grid = parse_grid(root.at("grid"), "/grid", cfg.grid);
  if (root.contains("seed")) {
    const json& v = root.at("seed");
    if (!v.is_number_unsigned() && !v.is_number_integer())
      fail("/seed", "expected a non-negative integer");
    if (v.is_number_integer() && v.get<long long>() < 0) fail("/seed", "must be >= 0");
    cfg.seed = v.get<std::uint64_t>();
  }
  cfg.paths = get_int(root, "", "paths", cfg.paths);
  cfg.eps_ladder = get_array(root, "", "eps_ladder", cfg.eps_ladder);
  cfg.lambda_ladder = get_array(root, "", "lambda_ladder", cfg.lambda_ladder);
  cfg.out_dir = get_string(root, "", "out_dir", cfg.out_dir);
  cfg.workers = get_int(root, "", "workers", cfg.workers);
  validate_config(cfg);
  return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
  return parse_config_text(read_file_bytes(path));
}

std::string canonical_config(const ScenarioConfig& cfg) {
  const auto& f = cfg.field;
  std::string s = "{T:" + CsvWriter::format(cfg.T);
  s += ",eps_ladder:" + join_numbers(cfg.eps_ladder);
  s += ",field:{a:" + CsvWriter::format(f.a);
  s += ",amplitude:" + CsvWriter::format(f.amplitude);
  s += ",c:" + join_numbers(f.c);
  s += ",dim:" + std::to_string(f.dim);
  s += ",kind:" + f.kind;
  s += ",mollify:" + CsvWriter::format(f.mollify);
  s += ",radius:" + CsvWriter::format(f.radius);
  s += ",sign:" + CsvWriter::format(f.sign) + "}";
  s += ",grid:{box_hi:" + join_numbers(cfg.grid.box_hi);
  s += ",box_lo:" + join_numbers(cfg.grid.box_lo);
  s += ",dt:" + CsvWriter::format(cfg.grid.dt);
  s += ",dx:" + CsvWriter::format(cfg.grid.dx) + "}";
  s += ",lambda_ladder:" + join_numbers(cfg.lambda_ladder);
  s += ",paths:" + std::to_string(cfg.paths);
  s += ",scenario:" + cfg.scenario;
  s += ",seed:" + std::to_string(cfg.seed);
  s += ",sigma:" + CsvWriter::format(cfg.sigma) + "}";
  return s;
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
  // FNV-1a, 64-bit.
  const std::string s = canonical_config(cfg);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash_hex(const ScenarioConfig& cfg) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = config_hash(cfg);
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return s;
}

Box config_box(const ScenarioConfig& cfg) {
  const int d = static_cast<int>(cfg.grid.box_lo.size());
  Box b;
  b.lo = Vec(d);
  b.hi = Vec(d);
  for (int i = 0; i < d; ++i) {
    b.lo[i] = cfg.grid.box_lo[static_cast<std::size_t>(i)];
    b.hi[i] = cfg.grid.box_hi[static_cast<std::size_t>(i)];
  }
  return b;
}

}  // namespace noiselab
