#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aquad/forms.hpp"
#include "aquad/harness.hpp"

namespace aquad::harness {

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  fail(ErrorCode::ConfigInvalid, "field '" + field + "': " + what);
}

const std::vector<std::pair<Kind, std::string>> kKindNames = {
    {Kind::Enumerate, "enumerate"}, {Kind::CountMod, "count-mod"},       {Kind::Density, "density"},
    {Kind::Equidist, "equidist"},   {Kind::Sieve, "sieve"},              {Kind::AlmostPrime, "almost-prime"},
    {Kind::GeomSieve, "geom-sieve"}, {Kind::Halfdim, "halfdim"},
};

std::vector<FieldSpec> common_fields() {
  return {
      {"kind", FieldType::String, "experiment kind"},
      {"threads", FieldType::UInt, "worker threads"},
      {"output", FieldType::String, "output path"},
      {"format", FieldType::String, "csv or json"},
      {"point_cap", FieldType::UInt, "abort past this many enumerated points"},
      {"scan_cap", FieldType::UInt, "largest residue scan"},
      {"time_cap", FieldType::Number, "wall-clock budget in seconds"},
  };
}

std::vector<FieldSpec> instance_fields() {
  return {
      {"form", FieldType::String, "quadratic form, e.g. 1,1,1,-1"},
      {"m", FieldType::Int, "target value"},
      {"p0", FieldType::Int, "the prime p0"},
      {"h", FieldType::Int, "p0-adic height exponent"},
      {"region", FieldType::String, "box lo:hi per axis"},
      {"height", FieldType::Int, "Euclidean height N for integral points"},
      {"sup_norm", FieldType::Bool, "use max-norm height"},
  };
}

std::vector<FieldSpec> build_fields(Kind kind) {
  auto out = common_fields();
  auto add = [&](std::vector<FieldSpec> more) { out.insert(out.end(), more.begin(), more.end()); };
  switch (kind) {
    case Kind::Enumerate:
      add(instance_fields());
      break;
    case Kind::CountMod:
      add({{"form", FieldType::String, "quadratic form"},
           {"m", FieldType::Int, "target value"},
           {"primes", FieldType::IntList, "primes to count at"},
           {"p_max", FieldType::Int, "all primes up to this bound"},
           {"k", FieldType::Int, "exponent k of p^k"},
           {"sub", FieldType::PolyList, "extra equations; adds the F_p count of the subvariety"}});
      break;
    case Kind::Density:
      add(instance_fields());
      add({{"primes", FieldType::IntList, "primes"},
           {"p_max", FieldType::Int, "all primes up to this bound"},
           {"p_cut", FieldType::Int, "Euler product cutoff for the prediction"},
           {"real", FieldType::Bool, "report the archimedean density over region (or height ball)"},
           {"ball", FieldType::Bool, "report the p0-adic ball volume at (p0, h)"}});
      break;
    case Kind::Equidist:
      add(instance_fields());
      add({{"moduli", FieldType::IntList, "congruence moduli"},
           {"residue", FieldType::IntList, "single residue class (one modulus only)"},
           {"h_grid", FieldType::Grid, "p0-adic heights"},
           {"height_grid", FieldType::Grid, "Euclidean heights"},
           {"p_cut", FieldType::Int, "Euler product cutoff"}});
      break;
    case Kind::Sieve:
      add(instance_fields());
      add({{"f", FieldType::Poly, "polynomial (inline JSON or file)"},
           {"Sprime", FieldType::IntList, "excluded primes S'"},
           {"z", FieldType::Int, "sifting level"},
           {"y", FieldType::Int, "ledger level"},
           {"X", FieldType::Number, "main-term scale (default: sequence total)"}});
      break;
    case Kind::AlmostPrime:
      add(instance_fields());
      add({{"f", FieldType::Poly, "polynomial"},
           {"Sprime", FieldType::IntList, "excluded primes S'"},
           {"M", FieldType::Int, "prime size floor"},
           {"r", FieldType::Int, "maximum distinct primes"},
           {"budget", FieldType::UInt, "points to examine"}});
      break;
    case Kind::GeomSieve:
      add(instance_fields());
      add({{"f", FieldType::Poly, "first equation of Z"},
           {"g", FieldType::Poly, "second equation of Z"},
           {"polys", FieldType::PolyList, "equations of Z (instead of f, g)"},
           {"M_grid", FieldType::Grid, "lower prime bounds"},
           {"N2", FieldType::Int, "upper prime bound (default infinity)"}});
      break;
    case Kind::Halfdim:
      add({{"a", FieldType::Int, "coefficient of v^2"},
           {"tail", FieldType::IntList, "coefficients a_i"},
           {"c", FieldType::Int, "constant target"},
           {"c_per_B2", FieldType::Int, "target c = c_per_B2 * B^2"},
           {"B_grid", FieldType::Grid, "box radii"}});
      break;
  }
  return out;
}

bool integral_number(const json& v, double lo, double hi) {
  if (v.is_number_integer()) return true;
  if (!v.is_number_float()) return false;
  double d = v.get<double>();
  return std::isfinite(d) && d == std::floor(d) && d >= lo && d <= hi;
}

json normalize_int(const std::string& name, const json& v, bool unsigned_only) {
  if (!v.is_number()) invalid(name, "expected an integer");
  if (v.is_number_unsigned()) return v;
  if (v.is_number_integer()) {
    if (unsigned_only && v.get<std::int64_t>() < 0) invalid(name, "must be nonnegative");
    return v;
  }
  if (!integral_number(v, unsigned_only ? 0.0 : -9.2e18, 9.2e18)) invalid(name, "expected an integer");
  return json(static_cast<std::int64_t>(v.get<double>()));
}

json normalize_list(const std::string& name, const json& v) {
  json out = json::array();
  if (v.is_string()) {
    std::stringstream ss(v.get<std::string>());
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t pos = 0;
        long long x = std::stoll(item, &pos);
        if (pos != item.size()) throw std::invalid_argument(item);
        out.push_back(x);
      } catch (const std::exception&) {
        invalid(name, "bad list entry '" + item + "'");
      }
    }
  } else if (v.is_array()) {
    for (const auto& x : v) out.push_back(normalize_int(name, x, false));
  } else {
    invalid(name, "expected a list");
  }
  if (out.empty()) invalid(name, "list is empty");
  return out;
}

bool looks_like_expression(const std::string& text) {
  return !text.empty() && text.find_first_not_of("x0123456789+-*^ ") == std::string::npos;
}

// nvars is the form dimension when known, else 0.
json load_poly(const std::string& name, const json& v, const std::string& base_dir, std::size_t nvars) {
  json arr = v;
  if (v.is_string()) {
    std::string text = v.get<std::string>();
    if (!text.empty() && text.front() == '[') {
      try {
        arr = json::parse(text);
      } catch (const json::exception& e) {
        invalid(name, std::string("malformed inline polynomial: ") + e.what());
      }
    } else {
      std::filesystem::path p(text);
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      if (!std::filesystem::exists(p) && looks_like_expression(text)) {
        try {
          return poly_to_json(Polynomial::parse(text, nvars));
        } catch (const Error& e) {
          invalid(name, e.what());
        }
      }
      if (!std::filesystem::exists(p)) invalid(name, "file not found: " + p.string());
      try {
        arr = load_json_file(p.string());
      } catch (const Error& e) {
        invalid(name, e.what());
      }
    }
  }
  if (!arr.is_array() || arr.empty()) invalid(name, "polynomial must be a nonempty list of terms");
  std::size_t arity = 0;
  for (const auto& t : arr) {
    if (!t.is_object() || !t.contains("exponents") || !t.contains("coeff") || t.size() != 2)
      invalid(name, "each term needs exactly 'exponents' and 'coeff'");
    if (!t["exponents"].is_array()) invalid(name, "'exponents' must be a list");
    if (arity == 0) arity = t["exponents"].size();
    if (t["exponents"].size() != arity || arity == 0) invalid(name, "terms disagree on the number of variables");
    for (const auto& e : t["exponents"])
      if (!e.is_number_unsigned() && !(e.is_number_integer() && e.get<std::int64_t>() >= 0))
        invalid(name, "exponents must be nonnegative integers");
    if (!t["coeff"].is_number_integer()) invalid(name, "coefficients must be integers");
  }
  return arr;
}

json load_poly_list(const std::string& name, const std::string& text, const std::string& base_dir) {
  if (!text.empty() && text.front() == '[') {
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      invalid(name, std::string("malformed inline polynomial list: ") + e.what());
    }
  }
  std::filesystem::path p(text);
  if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
  if (!std::filesystem::exists(p)) {
    // "x1; x2 + 1": expressions separated by semicolons.
    json out = json::array();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';'))
      if (looks_like_expression(item)) out.push_back(item);
    if (!out.empty() && std::count(text.begin(), text.end(), ';') + 1 == static_cast<long>(out.size())) return out;
    invalid(name, "file not found: " + p.string());
  }
  return load_json_file(p.string());
}

}  // namespace

std::string to_string(Kind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  return "?";
}

std::optional<Kind> parse_kind(const std::string& name) {
  for (const auto& [kind, n] : kKindNames)
    if (n == name) return kind;
  return std::nullopt;
}

const std::vector<Kind>& all_kinds() {
  static const std::vector<Kind> kinds = [] {
    std::vector<Kind> v;
    for (const auto& [k, n] : kKindNames) v.push_back(k);
    return v;
  }();
  return kinds;
}

const std::vector<FieldSpec>& fields_for(Kind kind) {
  static const std::map<Kind, std::vector<FieldSpec>> table = [] {
    std::map<Kind, std::vector<FieldSpec>> t;
    for (const auto& [k, n] : kKindNames) t[k] = build_fields(k);
    return t;
  }();
  return table.at(kind);
}

std::vector<std::int64_t> parse_grid(const std::string& text) {
  std::vector<std::int64_t> out;
  auto bad = [&](const std::string& why) -> std::vector<std::int64_t> {
    fail(ErrorCode::ConfigInvalid, "grid '" + text + "': " + why);
  };
  auto to_int = [&](const std::string& s) {
    try {
      std::size_t pos = 0;
      long long v = std::stoll(s, &pos);
      if (pos != s.size()) bad("bad number '" + s + "'");
      return static_cast<std::int64_t>(v);
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      bad("bad number '" + s + "'");
    }
    return std::int64_t{0};
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3 || parts[2].size() < 2) return bad("expected lo:hi:xK or lo:hi:+K");
    std::int64_t lo = to_int(parts[0]), hi = to_int(parts[1]);
    std::int64_t step = to_int(parts[2].substr(1));
    if (lo > hi) return bad("lo exceeds hi");
    if (parts[2][0] == 'x') {
      if (step < 2 || lo < 1) return bad("geometric grid needs factor >= 2 and lo >= 1");
      for (std::int64_t v = lo; v <= hi; v *= step) {
        out.push_back(v);
        if (v > hi / step) break;
      }
    } else if (parts[2][0] == '+') {
      if (step < 1) return bad("arithmetic step must be positive");
      for (std::int64_t v = lo; v <= hi; v += step) out.push_back(v);
    } else {
      return bad("step must start with x or +");
    }
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_int(item));
  }
  if (out.empty()) return bad("grid is empty");
  return out;
}

Polynomial poly_from_json(const json& j, std::size_t nvars) {
  std::vector<Monomial> terms;
  for (const auto& t : j) {
    Monomial mono;
    for (const auto& e : t.at("exponents")) mono.exponents.push_back(e.get<unsigned>());
    mono.coeff = t.at("coeff").get<std::int64_t>();
    if (mono.exponents.size() != nvars)
      fail(ErrorCode::ConfigInvalid, "polynomial has " + std::to_string(mono.exponents.size()) +
                                         " variables, form has " + std::to_string(nvars));
    terms.push_back(std::move(mono));
  }
  return Polynomial(nvars, std::move(terms));
}

json poly_to_json(const Polynomial& p) {
  json out = json::array();
  for (const auto& t : p.terms()) out.push_back({{"exponents", t.exponents}, {"coeff", t.coeff}});
  return out;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigInvalid, path + ": " + e.what());
  }
}

unsigned default_threads() {
  const char* env = std::getenv("AQUAD_THREADS");
  if (!env) return 1;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1 || v > 1024) return 1;
  return static_cast<unsigned>(v);
}

ExperimentConfig make_config(Kind kind, json doc, const std::string& base_dir) {
  if (!doc.is_object()) fail(ErrorCode::ConfigInvalid, "config must be a JSON object");
  if (doc.contains("kind")) {
    if (!doc["kind"].is_string() || parse_kind(doc["kind"].get<std::string>()) != kind)
      invalid("kind", "does not match the subcommand '" + to_string(kind) + "'");
  }
  doc["kind"] = to_string(kind);
  const auto& specs = fields_for(kind);
  // Variable count for polynomial expressions; the form itself is validated below.
  std::size_t nvars = 0;
  if (doc.contains("form") && doc["form"].is_string()) {
    try {
      nvars = forms::QuadraticForm::parse(doc["form"].get<std::string>()).dim();
    } catch (const Error&) {
    }
  }
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    auto spec = std::find_if(specs.begin(), specs.end(), [&](const FieldSpec& s) { return s.name == it.key(); });
    if (spec == specs.end()) invalid(it.key(), "unknown for experiment kind " + to_string(kind));
    json& v = it.value();
    const std::string& name = it.key();
    switch (spec->type) {
      case FieldType::Int: v = normalize_int(name, v, false); break;
      case FieldType::UInt: v = normalize_int(name, v, true); break;
      case FieldType::Number:
        if (!v.is_number()) invalid(name, "expected a number");
        break;
      case FieldType::Bool:
        if (!v.is_boolean()) invalid(name, "expected true or false");
        break;
      case FieldType::String:
        if (!v.is_string()) invalid(name, "expected a string");
        break;
      case FieldType::IntList: v = normalize_list(name, v); break;
      case FieldType::Grid:
        if (v.is_string()) {
          try {
            v = parse_grid(v.get<std::string>());
          } catch (const Error& e) {
            invalid(name, e.what());
          }
        } else {
          v = normalize_list(name, v);
        }
        break;
      case FieldType::Poly: v = load_poly(name, v, base_dir, nvars); break;
      case FieldType::PolyList: {
        if (v.is_string()) v = load_poly_list(name, v.get<std::string>(), base_dir);
        if (!v.is_array() || v.empty()) invalid(name, "expected a list of polynomials");
        if (v.front().is_object()) v = json::array({v});
        for (auto& p : v) p = load_poly(name, p, base_dir, nvars);
        break;
      }
    }
  }

  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.threads = default_threads();
  if (doc.contains("threads")) {
    auto t = doc["threads"].get<std::uint64_t>();
    if (t < 1 || t > 1024) invalid("threads", "must be between 1 and 1024");
    cfg.threads = static_cast<unsigned>(t);
  }
  if (doc.contains("output")) cfg.output = doc["output"].get<std::string>();
  if (doc.contains("format")) {
    cfg.format = doc["format"].get<std::string>();
  } else if (cfg.output && cfg.output->size() >= 5 && cfg.output->substr(cfg.output->size() - 5) == ".json") {
    cfg.format = "json";
  }
  if (cfg.format != "csv" && cfg.format != "json") invalid("format", "must be csv or json");
  for (const char* cap : {"point_cap", "scan_cap"})
    if (doc.contains(cap) && doc[cap].get<std::uint64_t>() == 0) invalid(cap, "must be positive");
  if (doc.contains("time_cap") && !(doc["time_cap"].get<double>() > 0)) invalid("time_cap", "must be positive");

  if (doc.contains("form")) {
    try {
      auto q = forms::QuadraticForm::parse(doc["form"].get<std::string>());
      if (doc.contains("region")) {
        try {
          auto box = forms::Box::parse(doc["region"].get<std::string>(), q.dim());
          if (box.dim() != q.dim()) invalid("region", "dimension differs from the form");
        } catch (const Error& e) {
          if (e.code() == ErrorCode::ConfigInvalid) throw;
          invalid("region", e.what());
        }
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigInvalid) throw;
      invalid("form", e.what());
    }
  }
  cfg.doc = std::move(doc);
  return cfg;
}

std::int64_t ExperimentConfig::get_int(const std::string& field) const {
  if (!doc.contains(field)) invalid(field, "required for " + to_string(kind));
  return doc.at(field).get<std::int64_t>();
}

std::int64_t ExperimentConfig::get_int(const std::string& field, std::int64_t fallback) const {
  return doc.contains(field) ? doc.at(field).get<std::int64_t>() : fallback;
}

double ExperimentConfig::get_number(const std::string& field, double fallback) const {
  return doc.contains(field) ? doc.at(field).get<double>() : fallback;
}

bool ExperimentConfig::get_bool(const std::string& field, bool fallback) const {
  return doc.contains(field) ? doc.at(field).get<bool>() : fallback;
}

std::string ExperimentConfig::get_string(const std::string& field) const {
  if (!doc.contains(field)) invalid(field, "required for " + to_string(kind));
  return doc.at(field).get<std::string>();
}

std::vector<std::int64_t> ExperimentConfig::get_list(const std::string& field) const {
  if (!doc.contains(field)) invalid(field, "required for " + to_string(kind));
  return doc.at(field).get<std::vector<std::int64_t>>();
}

Polynomial ExperimentConfig::get_poly(const std::string& field, std::size_t nvars) const {
  if (!doc.contains(field)) invalid(field, "required for " + to_string(kind));
  try {
    return poly_from_json(doc.at(field), nvars);
  } catch (const Error& e) {
    invalid(field, e.what());
  }
}

std::string config_hash(const json& doc) {
  json canon = doc;
  for (const char* k : {"output", "format", "threads"}) canon.erase(k);
  const std::string body = canon.dump();
  const std::string blob = "blob " + std::to_string(body.size()) + std::string(1, '\0') + body;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr) != 1)
    fail(ErrorCode::InvariantViolation, "SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::InvalidArgument:
    case ErrorCode::DegenerateForm:
      return 2;
    case ErrorCode::CapExceeded:
    case ErrorCode::BoxTooLarge:
      return 3;
    case ErrorCode::InvariantViolation:
      return 4;
    default:
      return 1;
  }
}

}  // namespace aquad::harness
