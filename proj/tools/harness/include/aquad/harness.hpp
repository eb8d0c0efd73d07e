#pragma once

// Experiment configuration, dispatch and report persistence for the CLI.
// A config is one JSON document; command-line flags override its fields.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aquad/error.hpp"
#include "aquad/polynomial.hpp"

namespace aquad::harness {

using json = nlohmann::json;

enum class Kind { Enumerate, CountMod, Density, Equidist, Sieve, AlmostPrime, GeomSieve, Halfdim };

std::string to_string(Kind k);
std::optional<Kind> parse_kind(const std::string& name);
const std::vector<Kind>& all_kinds();

// Field types understood by the config schema.
enum class FieldType { Int, UInt, Number, Bool, String, IntList, Grid, Poly, PolyList };

struct FieldSpec {
  std::string name;
  FieldType type;
  std::string help;
};

// Fields accepted by an experiment kind (common fields included).
const std::vector<FieldSpec>& fields_for(Kind kind);

struct ExperimentConfig {
  Kind kind;
  json doc;  // validated; grids expanded, polynomial files inlined
  unsigned threads = 1;
  std::optional<std::string> output;
  std::string format = "csv";

  bool has(const std::string& field) const { return doc.contains(field); }
  std::int64_t get_int(const std::string& field) const;
  std::int64_t get_int(const std::string& field, std::int64_t fallback) const;
  double get_number(const std::string& field, double fallback) const;
  bool get_bool(const std::string& field, bool fallback) const;
  std::string get_string(const std::string& field) const;
  std::vector<std::int64_t> get_list(const std::string& field) const;
  Polynomial get_poly(const std::string& field, std::size_t nvars) const;
};

// Validates a raw document against the schema of `kind`; ConfigInvalid
// names the offending field. `base_dir` resolves relative polynomial paths.
ExperimentConfig make_config(Kind kind, json doc, const std::string& base_dir = ".");
json load_json_file(const std::string& path);

// Default thread count: AQUAD_THREADS when set and valid, else 1.
unsigned default_threads();

// "10,30,100", "64:4096:x2" (geometric) or "1:9:+2" (arithmetic).
std::vector<std::int64_t> parse_grid(const std::string& text);
// "[{\"exponents\":[1,0],\"coeff\":3}, ...]" as parsed JSON.
Polynomial poly_from_json(const json& j, std::size_t nvars);
json poly_to_json(const Polynomial& p);

enum class WarningCode {
  NotStabilized,
  CapExceeded,
  AdvisoryCoprimality,
  LowConfidence,
  Degenerate,
  NegativeTarget,
  Exhausted,
  PredictionSkipped,
};

std::string to_string(WarningCode code);
std::optional<WarningCode> parse_warning(const std::string& name);

struct Warning {
  WarningCode code;
  std::string detail;
  bool operator==(const Warning&) const = default;
};

struct Timing {
  double wall_seconds = 0;
  std::uint64_t points = 0;
  double points_per_second = 0;
};

struct Report {
  std::string schema;  // "<kind>/v1"
  json config;         // canonical echo
  std::string config_hash;
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  json summary = json::object();
  std::vector<Warning> warnings;
  Timing timing;
};

inline constexpr int kSchemaVersion = 1;

// Git-style blob SHA-1 of the canonical config, ignoring output, format and
// thread count.
std::string config_hash(const json& doc);

Report run(const ExperimentConfig& config);

json to_json(const Report& r, bool include_timing = true);
Report report_from_json(const json& j);
std::string to_csv(const Report& r);
// Everything except timing, serialized deterministically.
std::string data_fingerprint(const Report& r);

// Writes to path (format from the argument), Io on failure.
void emit(const Report& r, const std::string& format, const std::string& path);
std::string render(const Report& r, const std::string& format);

// Process exit code for an error: 2 config, 3 budget, 4 invariant, 1 other.
int exit_code(ErrorCode code);

}  // namespace aquad::harness
