#pragma once

// Command-line front end: list, check and sweep. Kept in a header so tests can
// drive it in-process; tools/riemlab.cpp only forwards argv.

#include "riemlab/catalog.hpp"
#include "riemlab/manifest.hpp"
#include "riemlab/report.hpp"
#include "riemlab/theorems.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace riemlab::cli {

inline constexpr int kUsageError = 1;

namespace detail {

/// Renders multiples of pi^e (e = 1, 2, 3) with small rational coefficients symbolically.
inline std::string pretty(std::optional<double> v) {
  if (!v) return "unknown";
  const double x = *v;
  static const char* powers[] = {"", "π", "π²", "π³"};
  for (int e = 1; e <= 3; ++e) {
    const double c = x / std::pow(std::numbers::pi, e);
    for (int q : {1, 2, 3, 4, 6}) {
      const double p = std::round(c * q);
      if (p < 1 || p > 64 || std::abs(c * q - p) > 1e-12 * std::max(1.0, p)) continue;
      std::string coef = p == 1 ? "" : std::to_string(static_cast<int>(p));
      std::string out = coef + powers[e];
      if (q != 1) out += "/" + std::to_string(q);
      return out;
    }
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

inline std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

/// Parses "a,b,c" or "lo:hi:count" (count >= 2, endpoints included).
inline std::vector<double> parse_grid(const std::string& text, const char* what) {
  std::vector<double> out;
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double d = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return d;
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": '" + s + "' is not a number");
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw ConfigError(std::string(what) + ": range form is lo:hi:count");
    const double lo = number(parts[0]), hi = number(parts[1]);
    const double count = number(parts[2]);
    if (count < 2 || count != std::floor(count) || count > 100000)
      throw ConfigError(std::string(what) + ": count must be an integer >= 2");
    const int m = static_cast<int>(count);
    for (int i = 0; i < m; ++i) out.push_back(lo + (hi - lo) * i / (m - 1));
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(number(item));
  if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
  return out;
}

inline std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("RIEMLAB_SEED");
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long s = std::stoull(v, &used);
    if (used != std::string(v).size()) throw std::invalid_argument(v);
    return s;
  } catch (const std::exception&) {
    throw ConfigError(std::string("RIEMLAB_SEED is not an unsigned integer: '") + v + "'");
  }
}

/// Writes to a sibling temporary file, then renames, so failures leave no partial output.
inline void write_file(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw ConfigError("cannot write '" + path + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ConfigError("cannot write '" + path + "': " + ec.message());
  }
}

struct Options {
  std::string manifold, manifest, theorem = "all", format = "csv", output, dump_record;
  std::optional<double> k, r, kappa, kappa1, kappa2, l, s, h;
  std::string r_grid, r_list;
  std::size_t samples = 0;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool theorems_only = false;
};

inline ManifoldSpec load_manifold(const Options& o) {
  if (!o.manifold.empty() && !o.manifest.empty()) throw ConfigError("give either --manifold or --manifest, not both");
  if (!o.manifest.empty()) return manifest::load(o.manifest);
  if (o.manifold.empty()) throw ConfigError("--manifold or --manifest is required");
  return catalog::make(o.manifold);
}

inline theorems::Params params(const Options& o) {
  theorems::Params p;
  p.k = o.k;
  p.r = o.r;
  p.kappa = o.kappa;
  p.kappa1 = o.kappa1;
  p.kappa2 = o.kappa2;
  p.l = o.l;
  p.s = o.s;
  if (!o.r_grid.empty()) p.r_grid = parse_grid(o.r_grid, "--r-grid");
  if (!o.r_list.empty()) p.r_list = parse_grid(o.r_list, "--r-list");
  return p;
}

inline theorems::RunSettings run_settings(const Options& o) {
  theorems::RunSettings s;
  s.samples = o.samples;
  s.seed = o.seed ? *o.seed : env_seed().value_or(1);
  if (o.h) {
    if (!(*o.h > 0.0)) throw ConfigError("--h must be positive");
    s.h = *o.h;
  }
  if (o.threads < 0) throw ConfigError("--threads must be >= 0");
  s.threads = o.threads;
  return s;
}

inline std::string render(const Options& o, const std::vector<theorems::BoundReport>& rows,
                          const std::vector<std::string>& skipped) {
  std::ostringstream os;
  if (o.format == "json")
    report::write_json(os, rows, skipped);
  else
    report::write_csv(os, rows, skipped);
  return os.str();
}

inline void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.output.empty())
    out << text;
  else
    write_file(o.output, text);
}

inline void dump_record(const Options& o, theorems::Workspace& ws, double r_max, double k) {
  if (o.dump_record.empty()) return;
  const auto rec = shoot(ws.spec(), ws.samples().front(), r_max, ws.shoot_options(r_max));
  std::ostringstream os;
  write_record_csv(os, rec, std::isnan(k) ? 0.0 : k);
  write_file(o.dump_record, os.str());
}

inline double record_length(const theorems::Params& p) {
  double r = p.r.value_or(0.0);
  for (double v : p.r_grid) r = std::max(r, v);
  for (double v : p.r_list) r = std::max(r, v);
  return r > 0.0 ? r : 1.0;
}

inline void validate_params(const theorems::Params& p) {
  auto finite = [](const std::optional<double>& v, const char* name) {
    if (v && !std::isfinite(*v)) throw ConfigError(std::string("--") + name + " must be finite");
  };
  finite(p.k, "k");
  finite(p.r, "r");
  finite(p.kappa, "kappa");
  finite(p.kappa1, "kappa1");
  finite(p.kappa2, "kappa2");
  finite(p.l, "l");
  finite(p.s, "s");
  if (p.r && !(*p.r > 0.0)) throw ConfigError("--r must be positive");
}

inline int cmd_list(const Options& o, std::ostream& out) {
  using nlohmann::ordered_json;
  if (o.format == "json") {
    ordered_json doc;
    doc["manifolds"] = ordered_json::array();
    if (!o.theorems_only)
      for (const auto& name : catalog::builtin_names()) {
        const auto m = catalog::make(name);
        ordered_json j;
        j["name"] = name;
        j["n"] = m.n;
        auto opt = [](const std::optional<double>& v) -> ordered_json { return v ? ordered_json(*v) : nullptr; };
        j["injectivity_radius"] = opt(m.meta.injectivity_radius);
        j["diameter"] = opt(m.meta.diameter);
        j["volume"] = opt(m.meta.volume);
        j["constant_curvature"] = opt(m.meta.constant_curvature);
        j["homogeneous"] = m.meta.homogeneous;
        j["note"] = m.meta.note;
        doc["manifolds"].push_back(j);
      }
    doc["theorems"] = ordered_json::array();
    for (const auto& t : theorems::registry())
      doc["theorems"].push_back({{"id", t.id}, {"requires", t.required}, {"optional", t.optional}, {"summary", t.summary}});
    out << doc.dump(2) << '\n';
    return 0;
  }
  if (!o.theorems_only) {
    out << "manifolds:\n";
    for (const auto& name : catalog::builtin_names()) {
      const auto m = catalog::make(name);
      out << "  " << name << " n=" << m.n << " inj=" << pretty(m.meta.injectivity_radius)
          << " vol=" << pretty(m.meta.volume) << " diam=" << pretty(m.meta.diameter);
      if (m.meta.constant_curvature) out << " curvature=" << pretty(m.meta.constant_curvature);
      if (m.meta.homogeneous) out << " homogeneous";
      out << '\n';
    }
    out << "theorems:\n";
  }
  for (const auto& t : theorems::registry()) {
    out << (o.theorems_only ? "" : "  ") << t.id << ": requires "
        << (t.required.empty() ? std::string("nothing") : join(t.required, ", "));
    if (!t.optional.empty()) out << "; optional " << join(t.optional, ", ");
    out << " | " << t.summary << '\n';
  }
  return 0;
}

inline int cmd_check(const Options& o, std::ostream& out) {
  const auto spec = load_manifold(o);
  const auto p = params(o);
  validate_params(p);
  if (o.theorem != "all") {
    const auto& t = theorems::find_theorem(o.theorem);
    if (auto why = t.skip(spec, p)) throw ConfigError(o.theorem + " is not applicable: " + *why);
  }
  theorems::Workspace ws(spec, run_settings(o));
  std::vector<std::string> skipped;
  const auto rows = theorems::run(ws, o.theorem, p, &skipped);
  if (rows.empty()) throw ConfigError("no applicable theorem for these parameters");
  const std::string text = render(o, rows, skipped);
  dump_record(o, ws, record_length(p), p.k.value_or(0.0));
  emit(o, text, out);
  return report::exit_code(rows);
}

inline int cmd_sweep(const Options& o, std::ostream& out) {
  const auto spec = load_manifold(o);
  const auto p = params(o);
  validate_params(p);
  if (!p.k) throw ConfigError("sweep requires --k");
  if (p.r_grid.empty()) throw ConfigError("sweep requires --r-grid");
  theorems::Workspace ws(spec, run_settings(o));
  const auto rows = theorems::sweep_log_ratio(ws, *p.k, p.r_grid);
  const std::string text = render(o, rows, {});
  dump_record(o, ws, record_length(p), *p.k);
  emit(o, text, out);
  return report::exit_code(rows);
}

inline void add_run_options(CLI::App* c, Options& o) {
  c->add_option("--manifold", o.manifold, "built-in manifold name (see list)");
  c->add_option("--manifest", o.manifest, "JSON manifest of a user manifold");
  c->add_option("--k", o.k, "model curvature k");
  c->add_option("--r", o.r, "radius r");
  c->add_option("--r-grid", o.r_grid, "radii as a,b,c or lo:hi:count");
  c->add_option("--kappa", o.kappa, "upper bound of Ric_k");
  c->add_option("--kappa1", o.kappa1, "lower bound of Ric_k (second item)");
  c->add_option("--kappa2", o.kappa2, "upper bound of Ric_k (second item)");
  c->add_option("--samples", o.samples, "records (default 10000 for surfaces, 2000 otherwise)");
  c->add_option("--seed", o.seed, "seed (default RIEMLAB_SEED or 1)");
  c->add_option("--h", o.h, "integration step (default r_max/1024)");
  c->add_option("--threads", o.threads, "worker threads, 0 for all cores")->capture_default_str();
  c->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  c->add_option("--output", o.output, "write the report to a file instead of stdout");
  c->add_option("--dump-record", o.dump_record, "write the first record (t,detJ,H,ric_k) to a CSV file");
}

}  // namespace detail

/// Runs the CLI on argv; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"riemlab: numerical checks of comparison theorems on Riemannian manifolds"};
  app.set_help_flag("--help", "print help and exit");  // "-h" would clash with --h
  app.require_subcommand(1);
  detail::Options o;
  auto* list = app.add_subcommand("list", "built-in manifolds and theorem registry");
  list->add_flag("--theorems", o.theorems_only, "only the theorem registry");
  list->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json", "csv"}));
  auto* check = app.add_subcommand("check", "evaluate one theorem or all applicable ones");
  detail::add_run_options(check, o);
  check->add_option("--theorem", o.theorem, "theorem id or all")->capture_default_str();
  check->add_option("--l", o.l, "conjugate radius lower bound l");
  check->add_option("--s", o.s, "Chebyshev threshold s");
  check->add_option("--r-list", o.r_list, "radii for the Taylor and counterexample checks");
  auto* sweep = app.add_subcommand("sweep", "E[log(F/F_k)] against its bound on a radius grid");
  detail::add_run_options(sweep, o);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  try {
    if (list->parsed()) return detail::cmd_list(o, out);
    if (check->parsed()) return detail::cmd_check(o, out);
    return detail::cmd_sweep(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
}

}  // namespace riemlab::cli
