#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "noiselab/fields.hpp"

namespace noiselab {

// Drift-field specification as it appears in config files: a kind tag plus parameters.
// Unused parameters keep their defaults and still participate in the config hash.
struct FieldSpec {
  std::string kind = "sqrt";      // zero|constant|linear|rotation|sqrt|sqrt2d|bump
  int dim = 1;                    // zero drift only
  double sign = -1.0;             // sqrt: +1 or -1
  double a = 1.0;                 // linear: b(x) = a x
  std::vector<double> c = {1.0};  // constant: components (sets the dimension)
  double amplitude = 1.0;         // bump height
  double radius = 1.0;            // bump support radius
  double mollify = 0.0;           // > 0: convolve the field with a kernel of this width
};

// Builds the field this structure describes (mollification applied last).
DriftField build_field(const FieldSpec& spec);

struct GridSpec {
  double dt = 1e-3;
  std::vector<double> box_lo = {-1.0};
  std::vector<double> box_hi = {1.0};
  double dx = 0.03125;
};

// One experiment: every scenario reads the subset of knobs it needs.
struct ScenarioConfig {
  std::string scenario;
  FieldSpec field;
  double sigma = 1.0;
  double T = 1.0;
  GridSpec grid;
  std::uint64_t seed = 12345;
  int paths = 200;
  std::vector<double> eps_ladder = {0.2, 0.1, 0.05, 0.025};
  std::vector<double> lambda_ladder = {1.0, 10.0, 100.0};
  std::string out_dir = "out";
  int workers = 1;
};

// Scenario-specific defaults; throws ValidationError for an unknown scenario name.
ScenarioConfig default_config(const std::string& scenario);

// Strict parse of a JSON config: "scenario" is required, every other key overrides the
// scenario defaults, and any unknown key anywhere fails fast with its path.
ScenarioConfig parse_config_text(const std::string& json_text);
ScenarioConfig load_config_file(const std::string& path);

// Semantic validation shared by parse and the CLI (positivity, box shape, ladders).
void validate_config(const ScenarioConfig& cfg);

// Canonical serialization of the experiment identity: fixed key order, shortest
// round-trip numbers. out_dir and workers are execution details and are excluded,
// so the hash is stable across output locations and worker counts.
std::string canonical_config(const ScenarioConfig& cfg);
std::uint64_t config_hash(const ScenarioConfig& cfg);
std::string config_hash_hex(const ScenarioConfig& cfg);

// Spatial box from grid.box_lo/box_hi.
Box config_box(const ScenarioConfig& cfg);

}  // namespace noiselab
