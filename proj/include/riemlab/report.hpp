#pragma once

// CSV and JSON serialization of BoundReport rows.

#include "riemlab/theorems.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace riemlab::report {

inline constexpr const char* kSchema = "riemlab-report/1";

inline const std::vector<std::string>& columns() {
  static const std::vector<std::string> c = {"theorem", "manifold", "n",        "k",       "r",
                                             "kappa",   "lhs",      "rhs",      "margin",  "mc_stderr",
                                             "samples", "seed",     "h",        "verdict", "notes"};
  return c;
}

/// Shortest round-trip text for a double; empty for NaN.
inline std::string number(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Notes followed by the extras as key=value pairs.
inline std::string notes_field(const theorems::BoundReport& b) {
  std::string out = b.notes;
  for (const auto& [key, value] : b.extras) {
    if (!out.empty()) out += "; ";
    out += key + "=" + (std::isnan(value) ? std::string("nan") : number(value));
  }
  return out;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_csv(std::ostream& os, const std::vector<theorems::BoundReport>& rows,
                      const std::vector<std::string>& skipped = {}) {
  os << "#schema=" << kSchema << '\n';
  for (const auto& s : skipped) os << "#skipped " << s << '\n';
  for (std::size_t i = 0; i < columns().size(); ++i) os << (i ? "," : "") << columns()[i];
  os << '\n';
  for (const auto& b : rows) {
    const std::vector<std::string> f = {b.theorem,
                                        b.manifold,
                                        std::to_string(b.n),
                                        number(b.k),
                                        number(b.r),
                                        number(b.kappa),
                                        number(b.lhs),
                                        number(b.rhs),
                                        number(b.margin),
                                        number(b.mc_stderr),
                                        std::to_string(b.samples),
                                        std::to_string(b.seed),
                                        number(b.h),
                                        theorems::to_string(b.verdict),
                                        notes_field(b)};
    for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << csv_escape(f[i]);
    os << '\n';
  }
}

inline nlohmann::ordered_json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline nlohmann::ordered_json to_json(const theorems::BoundReport& b) {
  nlohmann::ordered_json j;
  j["theorem"] = b.theorem;
  j["manifold"] = b.manifold;
  j["n"] = b.n;
  j["k"] = json_number(b.k);
  j["r"] = json_number(b.r);
  j["kappa"] = json_number(b.kappa);
  j["lhs"] = json_number(b.lhs);
  j["rhs"] = json_number(b.rhs);
  j["margin"] = json_number(b.margin);
  j["mc_stderr"] = json_number(b.mc_stderr);
  j["samples"] = b.samples;
  j["seed"] = b.seed;
  j["h"] = json_number(b.h);
  j["verdict"] = theorems::to_string(b.verdict);
  j["notes"] = b.notes;
  nlohmann::ordered_json extras = nlohmann::ordered_json::object();
  for (const auto& [key, value] : b.extras) extras[key] = json_number(value);
  j["extras"] = extras;
  return j;
}

inline void write_json(std::ostream& os, const std::vector<theorems::BoundReport>& rows,
                       const std::vector<std::string>& skipped = {}) {
  nlohmann::ordered_json doc;
  doc["schema"] = kSchema;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& b : rows) doc["rows"].push_back(to_json(b));
  doc["skipped"] = skipped;
  os << doc.dump(2) << '\n';
}

/// Exit status for a set of rows: 0 all hold, 2 any violated, 3 any inconclusive.
inline int exit_code(const std::vector<theorems::BoundReport>& rows) {
  bool inconclusive = false;
  for (const auto& b : rows) {
    if (b.verdict == theorems::Verdict::violated) return 2;
    if (b.verdict == theorems::Verdict::inconclusive) inconclusive = true;
  }
  return inconclusive ? 3 : 0;
}

}  // namespace riemlab::report
