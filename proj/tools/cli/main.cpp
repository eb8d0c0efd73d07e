#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>

#include "aquad/harness.hpp"

namespace h = aquad::harness;

namespace {

std::string flag_name(const std::string& field) {
  std::string s = field;
  std::replace(s.begin(), s.end(), '_', '-');
  return "--" + s;
}

h::json parse_value(const h::FieldSpec& spec, const std::string& text) {
  using aquad::ErrorCode;
  auto bad = [&](const std::string& why) -> h::json {
    aquad::fail(ErrorCode::ConfigInvalid, "field '" + spec.name + "': " + why);
  };
  switch (spec.type) {
    case h::FieldType::Int:
    case h::FieldType::UInt: {
      try {
        std::size_t pos = 0;
        long long v = std::stoll(text, &pos);
        if (pos == text.size()) return v;
        double d = std::stod(text, &pos);
        if (pos != text.size()) return bad("expected an integer, got '" + text + "'");
        return d;  // integrality checked by the schema
      } catch (const std::exception&) {
        return bad("expected an integer, got '" + text + "'");
      }
    }
    case h::FieldType::Number:
      try {
        std::size_t pos = 0;
        double d = std::stod(text, &pos);
        if (pos != text.size()) return bad("expected a number, got '" + text + "'");
        return d;
      } catch (const std::exception&) {
        return bad("expected a number, got '" + text + "'");
      }
    case h::FieldType::PolyList:
      if (!text.empty() && text.front() == '[') {
        try {
          return h::json::parse(text);
        } catch (const std::exception&) {
          return bad("expected a JSON list of polynomials");
        }
      }
      return text;  // file path or "f; g" expressions
    default:
      return text;
  }
}

// Alternate spellings; "primes" also takes a single prime via --p.
const std::map<std::string, std::string> kAliases = {
    {"output", "--out,--report"},
    {"primes", "--p"},
    {"p_max", "--all-primes-upto"},
    {"moduli", "--modulus"},
    {"height_grid", "--schedule"},
};

struct Sub {
  h::Kind kind;
  CLI::App* app;
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
};

std::string describe(aquad::harness::Kind kind) {
  using K = aquad::harness::Kind;
  switch (kind) {
    case K::Enumerate: return "list integral or p0-integral points on q = m";
    case K::CountMod: return "count solutions of q = m mod p^k";
    case K::Density: return "local densities, real density and the predicted main term";
    case K::Equidist: return "point counts in congruence classes against the main term";
    case K::Sieve: return "sifting function and remainder ledger for f on the points";
    case K::AlmostPrime: return "search for a point where f has few large prime factors";
    case K::GeomSieve: return "points reducing into f = g = 0 modulo some large prime";
    case K::Halfdim: return "fraction of values represented by u^2 + a v^2";
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integral points, local densities and sieves on affine quadrics"};
  app.require_subcommand(1);

  std::vector<std::unique_ptr<Sub>> subs;
  for (auto kind : h::all_kinds()) {
    auto sub = std::make_unique<Sub>();
    sub->kind = kind;
    sub->app = app.add_subcommand(h::to_string(kind), describe(kind));
    // --h is the height exponent, so help is long-form only.
    sub->app->set_help_flag("--help", "print help");
    sub->app->add_option("--config", sub->config_path, "JSON experiment config")->check(CLI::ExistingFile);
    for (const auto& spec : h::fields_for(kind)) {
      if (spec.name == "kind") continue;
      if (spec.type == h::FieldType::Bool) {
        sub->app->add_flag(flag_name(spec.name), sub->flags[spec.name], spec.help);
        continue;
      }
      std::string names = flag_name(spec.name);
      auto alias = kAliases.find(spec.name);
      if (alias != kAliases.end()) names += "," + alias->second;
      sub->app->add_option(names, sub->values[spec.name], spec.help);
    }
    subs.push_back(std::move(sub));
  }

  std::string report_in, report_out, report_format = "csv";
  auto* report_cmd = app.add_subcommand("report", "re-emit a stored JSON report");
  report_cmd->add_option("--in", report_in, "JSON report")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--format", report_format, "csv or json");
  report_cmd->add_option("--out", report_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (report_cmd->parsed()) {
      auto r = h::report_from_json(h::load_json_file(report_in));
      if (report_out.empty())
        std::cout << h::render(r, report_format);
      else
        h::emit(r, report_format, report_out);
      return 0;
    }
    for (auto& sub : subs) {
      if (!sub->app->parsed()) continue;
      h::json doc = h::json::object();
      std::string base_dir = ".";
      if (!sub->config_path.empty()) {
        doc = h::load_json_file(sub->config_path);
        base_dir = std::filesystem::path(sub->config_path).parent_path().string();
        if (base_dir.empty()) base_dir = ".";
      }
      for (const auto& spec : h::fields_for(sub->kind)) {
        if (spec.name == "kind") continue;
        if (spec.type == h::FieldType::Bool) {
          if (sub->flags[spec.name]) doc[spec.name] = true;
          continue;
        }
        auto* opt = sub->app->get_option(flag_name(spec.name));
        if (opt->count() > 0) doc[spec.name] = parse_value(spec, sub->values[spec.name]);
      }
      auto cfg = h::make_config(sub->kind, doc, base_dir);
      auto report = h::run(cfg);
      for (const auto& w : report.warnings) std::cerr << "warning: " << h::to_string(w.code) << " " << w.detail << "\n";
      if (cfg.output)
        h::emit(report, cfg.format, *cfg.output);
      else
        std::cout << h::render(report, cfg.format);
      return 0;
    }
  } catch (const aquad::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return h::exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
