#include <fstream>
#include <sstream>

#include "aquad/harness.hpp"

namespace aquad::harness {

namespace {

const std::vector<std::pair<WarningCode, std::string>> kWarningNames = {
    {WarningCode::NotStabilized, "W_NOT_STABILIZED"},
    {WarningCode::CapExceeded, "W_CAP_EXCEEDED"},
    {WarningCode::AdvisoryCoprimality, "W_ADVISORY_COPRIMALITY"},
    {WarningCode::LowConfidence, "W_LOW_CONFIDENCE"},
    {WarningCode::Degenerate, "W_DEGENERATE"},
    {WarningCode::NegativeTarget, "W_NEGATIVE_TARGET"},
    {WarningCode::Exhausted, "W_EXHAUSTED"},
    {WarningCode::PredictionSkipped, "W_PREDICTION_SKIPPED"},
};

std::string csv_cell(const json& v) {
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  }
  if (v.is_null()) return "";
  return v.dump();
}

}  // namespace

std::string to_string(WarningCode code) {
  for (const auto& [c, n] : kWarningNames)
    if (c == code) return n;
  return "W_UNKNOWN";
}

std::optional<WarningCode> parse_warning(const std::string& name) {
  for (const auto& [c, n] : kWarningNames)
    if (n == name) return c;
  return std::nullopt;
}

json to_json(const Report& r, bool include_timing) {
  json j;
  j["schema"] = r.schema;
  j["config"] = r.config;
  j["config_hash"] = r.config_hash;
  j["columns"] = r.columns;
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back(row);
  j["rows"] = std::move(rows);
  j["summary"] = r.summary;
  json warnings = json::array();
  for (const auto& w : r.warnings) warnings.push_back({{"code", to_string(w.code)}, {"detail", w.detail}});
  j["warnings"] = std::move(warnings);
  if (include_timing)
    j["timing"] = {{"wall_seconds", r.timing.wall_seconds},
                   {"points", r.timing.points},
                   {"points_per_second", r.timing.points_per_second}};
  return j;
}

Report report_from_json(const json& j) {
  auto bad = [](const std::string& what) { fail(ErrorCode::ConfigInvalid, "report: " + what); };
  if (!j.is_object()) bad("not an object");
  for (const char* key : {"schema", "config", "config_hash", "columns", "rows", "summary", "warnings"})
    if (!j.contains(key)) bad(std::string("missing '") + key + "'");
  Report r;
  r.schema = j["schema"].get<std::string>();
  auto slash = r.schema.rfind('/');
  if (slash == std::string::npos || r.schema.substr(slash) != "/v" + std::to_string(kSchemaVersion))
    bad("unsupported schema '" + r.schema + "'");
  r.config = j["config"];
  r.config_hash = j["config_hash"].get<std::string>();
  r.columns = j["columns"].get<std::vector<std::string>>();
  for (const auto& row : j["rows"]) {
    if (!row.is_array() || row.size() != r.columns.size()) bad("row width differs from the header");
    r.rows.push_back(row.get<std::vector<json>>());
  }
  r.summary = j["summary"];
  for (const auto& w : j["warnings"]) {
    auto code = parse_warning(w.at("code").get<std::string>());
    if (!code) bad("unknown warning code");
    r.warnings.push_back({*code, w.at("detail").get<std::string>()});
  }
  if (j.contains("timing")) {
    const auto& t = j["timing"];
    r.timing.wall_seconds = t.at("wall_seconds").get<double>();
    r.timing.points = t.at("points").get<std::uint64_t>();
    r.timing.points_per_second = t.at("points_per_second").get<double>();
  }
  return r;
}

std::string to_csv(const Report& r) {
  std::ostringstream out;
  out << "# schema: " << r.schema << "\n";
  out << "# config_hash: " << r.config_hash << "\n";
  for (const auto& w : r.warnings) out << "# warning: " << to_string(w.code) << " " << w.detail << "\n";
  for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << r.columns[i];
  out << "\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << "\n";
  }
  return out.str();
}

std::string data_fingerprint(const Report& r) { return to_json(r, false).dump(); }

std::string render(const Report& r, const std::string& format) {
  if (format == "json") return to_json(r).dump(2) + "\n";
  if (format == "csv") return to_csv(r);
  fail(ErrorCode::ConfigInvalid, "unknown format '" + format + "'");
}

void emit(const Report& r, const std::string& format, const std::string& path) {
  const std::string text = render(r, format);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed for " + path);
}

}  // namespace aquad::harness
