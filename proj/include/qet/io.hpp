#pragma once

// POVM files, measurement sources, CSV formatting and grid ranges.
//
// POVM JSON: exactly one of
//   {"outcomes": [{"m": 0.5, "l": 0.5, "alpha": 0.0, "delta": 0.0}, ...]}
//   {"weights":  [{"p": 0.5, "q": 0.5}, ...]}
// alpha and delta default to 0.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qet/errors.hpp"
#include "qet/measurement.hpp"

namespace qet {

// Malformed input: file, JSON or command-line value.
class InputError : public Error {
public:
  using Error::Error;
};

namespace detail {
inline double json_number(const nlohmann::json& obj, const char* key, std::size_t index, bool required) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    if (required)
      throw InputError("POVM entry " + std::to_string(index) + ": missing key \"" + key + "\"");
    return 0.0;
  }
  if (!it->is_number())
    throw InputError("POVM entry " + std::to_string(index) + ": \"" + key + "\" must be a number");
  return it->get<double>();
}
}  // namespace detail

inline MeasurementModel parse_povm_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("POVM JSON parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw InputError("POVM JSON: top level must be an object");
  const bool has_outcomes = doc.contains("outcomes");
  const bool has_weights = doc.contains("weights");
  if (has_outcomes == has_weights)
    throw InputError("POVM JSON: exactly one of \"outcomes\" or \"weights\" must be present");

  const auto& list = has_outcomes ? doc["outcomes"] : doc["weights"];
  if (!list.is_array() || list.empty()) throw InputError("POVM JSON: outcome list must be a nonempty array");

  if (has_outcomes) {
    std::vector<KrausCoefficients> coeffs;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& e = list[i];
      if (!e.is_object()) throw InputError("POVM entry " + std::to_string(i) + ": expected an object");
      coeffs.push_back({detail::json_number(e, "m", i, true), detail::json_number(e, "l", i, true),
                        detail::json_number(e, "alpha", i, false), detail::json_number(e, "delta", i, false)});
    }
    return validate(coeffs);
  }
  std::vector<OutcomeWeights> weights;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto& e = list[i];
    if (!e.is_object()) throw InputError("POVM entry " + std::to_string(i) + ": expected an object");
    weights.push_back({detail::json_number(e, "p", i, true), detail::json_number(e, "q", i, true)});
  }
  return weights_to_coeffs(weights);
}

inline nlohmann::json povm_to_json(const MeasurementModel& model) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& o : model.outcomes())
    out.push_back({{"m", o.coeffs.m}, {"l", o.coeffs.l}, {"alpha", o.coeffs.alpha}, {"delta", o.coeffs.delta}});
  return {{"outcomes", out}};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open POVM file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct MeasurementSource {
  MeasurementModel model;
  std::string label;
};

// FILE | builtin:identity | builtin:projective | builtin:weak(u)
inline MeasurementSource load_measurement(const std::string& spec) {
  constexpr std::string_view prefix = "builtin:";
  if (spec.rfind(prefix, 0) != 0) return {parse_povm_json(read_file(spec)), spec};

  const std::string name = spec.substr(prefix.size());
  if (name == "identity") return {identity_measurement(), spec};
  if (name == "projective") return {projective_measurement(), spec};
  if (name.rfind("weak(", 0) == 0 && name.size() > 6 && name.back() == ')') {
    const std::string arg = name.substr(5, name.size() - 6);
    std::size_t used = 0;
    double u = NAN;
    try {
      u = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != arg.size() || !(u >= 0.0 && u <= 1.0))
      throw InputError("builtin:weak(u) needs 0 <= u <= 1, got '" + arg + "'");
    return {weak_measurement(u), spec};
  }
  throw InputError("unknown builtin measurement '" + spec + "'");
}

// Shortest round-trip form: 17 significant digits, scientific.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

// FNV-1a over the 17-digit text of every Kraus coefficient.
inline std::uint64_t povm_hash(const MeasurementModel& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](double x) {
    for (char c : format_double(x)) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& o : model.outcomes()) {
    mix(o.coeffs.m);
    mix(o.coeffs.l);
    mix(o.coeffs.alpha);
    mix(o.coeffs.delta);
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct GridRange {
  double min = 1.0;
  double max = 1.0;
  int points = 1;
  bool log = false;

  std::vector<double> values() const {
    std::vector<double> v;
    for (int i = 0; i < points; ++i) {
      const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
      v.push_back(log ? std::exp(std::log(min) + t * (std::log(max) - std::log(min)))
                      : min + t * (max - min));
    }
    if (points > 1) v.back() = max;
    return v;
  }
};

// MIN:MAX:N[:log|:linear]
inline GridRange parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() < 3 || parts.size() > 4) throw InputError("range '" + text + "': expected MIN:MAX:N[:log]");

  auto number = [&text](const std::string& s) {
    std::size_t used = 0;
    double v = NAN;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw InputError("range '" + text + "': bad number '" + s + "'");
    return v;
  };

  GridRange r;
  r.min = number(parts[0]);
  r.max = number(parts[1]);
  const double n = number(parts[2]);
  if (n != std::floor(n) || n < 1) throw InputError("range '" + text + "': points must be an integer >= 1");
  r.points = static_cast<int>(n);
  if (parts.size() == 4) {
    if (parts[3] == "log")
      r.log = true;
    else if (parts[3] != "linear" && parts[3] != "lin")
      throw InputError("range '" + text + "': spacing must be 'log' or 'linear'");
  }
  if (!(r.min > 0.0) || !(r.min <= r.max)) throw InputError("range '" + text + "': need 0 < MIN <= MAX");
  return r;
}

}  // namespace qet
