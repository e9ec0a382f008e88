// Copyright 2026 The qkdrate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Run configuration shared by the CLI verbs. Settings come from an optional
// JSON file whose keys mirror the long flag names; flags given on the
// command line override file values.

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qkdrate/qkdrate.hpp"

namespace qkdrate::cli {

inline constexpr const char* kConfigEnv = "QKDRATE_CONFIG";

// Raised for anything that should end in exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { single, wcp, decoy };

struct RunConfig {
  Mode mode = Mode::single;
  Protocol protocol = Protocol::bb84;
  std::optional<double> qber;
  QMode q{false, 0.0};
  int ad_block = 1;
  bool xor3 = false;
  bool mu_auto = true;
  double mu = 0.1;
  ChannelParams channel;
  double from = 0.0;
  double to = 100.0;
  double step = 5.0;
  std::string out;
  std::string format;

  bool decoy() const { return mode == Mode::decoy; }
};

inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{"mode",     "protocol", "qber",   "q",          "ad-block", "xor",
                                          "mu",       "distance", "alpha",  "eta-det",    "pdark",    "visibility",
                                          "decoy",    "from",     "to",     "step",       "out",      "format"};
  return keys;
}

inline nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file '" + path + "' must hold a JSON object");
  for (const auto& [k, v] : j.items())
    if (!known_keys().count(k)) throw UsageError("config file: unknown key '" + k + "'");
  return j;
}

/// Config path: the explicit flag, else the environment variable, else none.
inline std::optional<std::string> config_path(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kConfigEnv); env && *env) return std::string(env);
  return std::nullopt;
}

namespace detail {

inline double number(const nlohmann::json& s, const char* key) {
  const auto& v = s.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string str = v.get<std::string>();
    double x = 0.0;
    const auto r = std::from_chars(str.data(), str.data() + str.size(), x);
    if (r.ec == std::errc() && r.ptr == str.data() + str.size()) return x;
  }
  throw UsageError(std::string("--") + key + ": expected a number");
}

inline bool flag(const nlohmann::json& s, const char* key) {
  const auto& v = s.at(key);
  if (v.is_boolean()) return v.get<bool>();
  throw UsageError(std::string("--") + key + ": expected true or false");
}

inline std::string text(const nlohmann::json& s, const char* key) {
  const auto& v = s.at(key);
  if (v.is_string()) return v.get<std::string>();
  throw UsageError(std::string("--") + key + ": expected a string");
}

inline bool is_auto(const nlohmann::json& v) { return v.is_string() && v.get<std::string>() == "auto"; }

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw UsageError(msg);
}

}  // namespace detail

/// Validates merged settings and turns them into a RunConfig.
inline RunConfig make_config(const nlohmann::json& s) {
  using detail::number;
  using detail::require;
  RunConfig c;
  if (s.contains("mode")) {
    const std::string m = detail::text(s, "mode");
    if (m == "single") c.mode = Mode::single;
    else if (m == "wcp") c.mode = Mode::wcp;
    else if (m == "decoy") c.mode = Mode::decoy;
    else throw UsageError("mode must be single, wcp or decoy");
  }
  if (s.contains("decoy") && detail::flag(s, "decoy")) {
    require(c.mode != Mode::single, "--decoy requires wcp mode");
    c.mode = Mode::decoy;
  }
  if (s.contains("protocol")) {
    try {
      c.protocol = parse_protocol(detail::text(s, "protocol"));
    } catch (const DomainError&) {
      throw UsageError("--protocol must be bb84, six-state or sarg");
    }
  }
  if (s.contains("qber")) {
    const double v = number(s, "qber");
    const double hi = c.protocol == Protocol::six_state ? 2.0 / 3.0 : 0.5;
    require(v >= 0.0 && v <= hi, "--qber out of range for this protocol");
    c.qber = v;
  }
  if (s.contains("q")) {
    if (detail::is_auto(s.at("q"))) {
      c.q = {true, 0.0};
    } else {
      const double v = number(s, "q");
      require(v >= 0.0 && v <= 0.5, "--q must be 'auto' or a value in [0, 0.5]");
      c.q = {false, v};
    }
  }
  if (s.contains("ad-block")) {
    const double v = number(s, "ad-block");
    require(v >= 1.0 && v <= 10000.0 && v == static_cast<int>(v), "--ad-block must be an integer in [1, 10000]");
    c.ad_block = static_cast<int>(v);
  }
  if (s.contains("xor")) c.xor3 = detail::flag(s, "xor");
  if (s.contains("mu")) {
    if (detail::is_auto(s.at("mu"))) {
      c.mu_auto = true;
    } else {
      const double v = number(s, "mu");
      require(v > 0.0 && v <= 100.0, "--mu must be 'auto' or a value in (0, 100]");
      c.mu_auto = false;
      c.mu = v;
    }
  }
  if (s.contains("distance")) c.channel.length = number(s, "distance");
  if (s.contains("alpha")) c.channel.alpha = number(s, "alpha");
  if (s.contains("eta-det")) c.channel.eta_det = number(s, "eta-det");
  if (s.contains("pdark")) c.channel.p_dark = number(s, "pdark");
  if (s.contains("visibility")) c.channel.visibility = number(s, "visibility");
  c.channel.mu = c.mu;
  try {
    c.channel.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  if (s.contains("from")) c.from = number(s, "from");
  if (s.contains("to")) c.to = number(s, "to");
  if (s.contains("step")) c.step = number(s, "step");
  require(c.from >= 0.0 && c.to >= 0.0, "--from/--to must be non-negative");
  require(c.step > 0.0, "--step must be positive");
  if (s.contains("out")) c.out = detail::text(s, "out");
  if (s.contains("format")) {
    c.format = detail::text(s, "format");
    require(c.format == "csv" || c.format == "json", "--format must be csv or json");
  }

  const bool two_way = c.ad_block > 1 || c.xor3;
  require(!(two_way && c.mode != Mode::single), "--ad-block/--xor apply to single-photon evaluations only");
  require(!(two_way && c.protocol == Protocol::sarg), "--ad-block/--xor are available for bb84 and six-state");
  require(!(c.mode != Mode::single && c.protocol == Protocol::six_state),
          "six-state has no weak-pulse model; use single mode");
  return c;
}

}  // namespace qkdrate::cli
