#pragma once

// Spec files and report serialization.
//
// Spec JSON: {"n": 4, "d": 2, "amplitudes": [x, ...], "vacuum_weight": p}
// where each amplitude is a number or a [re, im] pair, listed party-major
// (a_{1,1..d-1}, a_{2,1..d-1}, ...), optionally nested one row per party; a
// two-element row of reals is read as one complex number, so write such rows as pairs.
// "vacuum_weight" is the weight p of |W> against the vacuum (default 1).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <locale>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gwlab/error.hpp"
#include "gwlab/gw_states.hpp"
#include "gwlab/inequalities.hpp"
#include "gwlab/roof_oracle.hpp"

namespace gwlab::io {

using Json = nlohmann::ordered_json;

namespace detail {

inline Complex parse_amplitude(const Json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) return {v[0].get<double>(), v[1].get<double>()};
  throw InvalidArgument("spec: amplitude must be a number or a [re, im] pair");
}

inline std::size_t positive_int(const Json& j, const char* key) {
  if (!j.contains(key)) throw InvalidArgument(std::string("spec: missing \"") + key + "\"");
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) throw InvalidArgument(std::string("spec: \"") + key + "\" must be a positive integer");
  return static_cast<std::size_t>(v.get<long long>());
}

}  // namespace detail

inline GWSpec parse_spec(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("spec: expected a JSON object");
  const std::size_t n = detail::positive_int(j, "n");
  const std::size_t d = j.contains("d") ? detail::positive_int(j, "d") : 2;
  if (!j.contains("amplitudes") || !j.at("amplitudes").is_array()) throw InvalidArgument("spec: \"amplitudes\" must be an array");
  std::vector<Complex> amps;
  for (const auto& a : j.at("amplitudes")) {
    // A row is an array of entries; a bare two-number array is one complex amplitude.
    const bool row = a.is_array() && (a.size() != 2 || a[0].is_array() || a[1].is_array());
    if (row)
      for (const auto& x : a) amps.push_back(detail::parse_amplitude(x));
    else
      amps.push_back(detail::parse_amplitude(a));
  }
  double p = 1.0;
  if (j.contains("vacuum_weight")) {
    if (!j.at("vacuum_weight").is_number()) throw InvalidArgument("spec: \"vacuum_weight\" must be a number");
    p = j.at("vacuum_weight").get<double>();
  }
  return GWSpec(n, d, std::move(amps), p);
}

/// `source` is inline JSON when it starts with '{', else a file path.
inline GWSpec load_spec(const std::string& source) {
  std::string text;
  const auto first = source.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && source[first] == '{') {
    text = source;
  } else {
    std::ifstream in(source);
    if (!in) throw InvalidArgument("spec: cannot open '" + source + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument(std::string("spec: malformed JSON: ") + e.what());
  }
  return parse_spec(j);
}

inline Json spec_to_json(const GWSpec& spec) {
  Json amps = Json::array();
  for (const auto& a : spec.amplitudes()) amps.push_back(Json::array({a.real(), a.imag()}));
  return Json{{"n", spec.n()}, {"d", spec.d()}, {"amplitudes", amps}, {"vacuum_weight", spec.p()}};
}

/// 12 significant digits, '.' decimal point, independent of the global locale.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream ss;
  ss.imbue(std::locale::classic());
  ss.precision(12);
  ss << v;
  return ss.str();
}

inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(const InequalityReport& r) {
  Json params = Json::object();
  for (const auto& [k, v] : r.params) params[k] = number(v);
  Json j{{"name", r.name},
         {"lhs", number(r.lhs)},
         {"rhs", number(r.rhs)},
         {"slack", number(r.slack)},
         {"satisfied", r.satisfied},
         {"applicability", to_string(r.applicability)},
         {"tolerance", r.tolerance},
         {"params", params},
         {"partition", r.partition}};
  if (r.seed) j["seed"] = *r.seed;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline Json to_json(const RoofEstimate& e) {
  return Json{{"min_estimate", number(e.min_estimate)},
              {"max_estimate", number(e.max_estimate)},
              {"trials", e.trials},
              {"seed", e.seed},
              {"converged", e.converged},
              {"min_converged", e.min_converged},
              {"max_converged", e.max_converged}};
}

inline void write_jsonl(std::ostream& out, const Json& j) { out << j.dump() << '\n'; }

inline void write_csv_header(std::ostream& out) { out << "name,alpha,mu,k,lhs,rhs,slack,satisfied,applicability\n"; }

inline void write_csv_row(std::ostream& out, const InequalityReport& r) {
  auto param = [&](const char* key) {
    auto it = r.params.find(key);
    return it == r.params.end() ? std::string() : fmt(it->second);
  };
  out << r.name << ',' << param("alpha") << ',' << param("mu") << ',' << param("k") << ',' << fmt(r.lhs) << ','
      << fmt(r.rhs) << ',' << fmt(r.slack) << ',' << (r.satisfied ? "true" : "false") << ','
      << to_string(r.applicability) << '\n';
}

}  // namespace gwlab::io
