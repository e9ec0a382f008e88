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

#include <charconv>
#include <cmath>
#include <map>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/config.hpp"
#include "qkdrate/qkdrate.hpp"

namespace qkdrate::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitAbort = 2;
inline constexpr int kExitVerify = 3;

/// Shortest decimal form with 12 significant digits; '.' separator
/// regardless of locale.
inline std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, r.ptr);
}

inline double round12(double v) {
  if (!std::isfinite(v)) return v;
  const std::string s = format_number(v);
  double out = v;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

inline void round_numbers(nlohmann::json& j) {
  if (j.is_number_float()) {
    j = round12(j.get<double>());
  } else if (j.is_structured()) {
    for (auto& v : j) round_numbers(v);
  }
}

struct CommandResult {
  int exit_code = kExitOk;
  std::string text;  // document written to the output
};

inline nlohmann::json witness_json(const std::map<std::string, double>& w) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : w) j[k] = v;
  return j;
}

inline nlohmann::json inputs_json(const RunConfig& c, const char* mode) {
  nlohmann::json j;
  j["mode"] = mode;
  j["protocol"] = to_string(c.protocol);
  if (c.qber) j["qber"] = *c.qber;
  if (c.q.optimize) {
    j["q"] = "auto";
  } else {
    j["q"] = c.q.value;
  }
  if (c.mode == Mode::single) {
    j["ad_block"] = c.ad_block;
    j["xor"] = c.xor3;
  } else {
    if (c.mu_auto) {
      j["mu"] = "auto";
    } else {
      j["mu"] = c.mu;
    }
    j["distance_km"] = c.channel.length;
    j["alpha"] = c.channel.alpha;
    j["eta_det"] = c.channel.eta_det;
    j["pdark"] = c.channel.p_dark;
    j["visibility"] = c.channel.visibility;
  }
  return j;
}

inline std::string finish_json(nlohmann::json j) {
  round_numbers(j);
  return j.dump(2) + "\n";
}

inline CommandResult cmd_rate(const RunConfig& c) {
  nlohmann::json doc;
  if (c.mode == Mode::single) {
    if (!c.qber) throw UsageError("rate single: --qber is required");
    ThresholdRequest req;
    req.protocol = c.protocol;
    req.optimize_q = c.q.optimize;
    req.q = c.q.value;
    if (c.ad_block > 1) req.ad_blocks = {c.ad_block};
    req.xor3 = c.xor3;
    const RateAtQber r = best_rate_at(req, *c.qber);
    doc["value"] = r.value;
    doc["unit"] = to_string(RateUnit::per_raw_bit);
    nlohmann::json w;
    w["q"] = r.q;
    if (c.ad_block > 1 || c.xor3) {
      w["ad_block"] = r.ad_block;
      const PostProcessing pp{c.ad_block, c.xor3};
      BellDiagonal lam = c.protocol == Protocol::six_state ? gamma_sixstate(*c.qber) : gamma_bb84(*c.qber).at(0.0);
      w["yield"] = apply_postprocessing(lam, pp).yield;
    }
    doc["witness"] = w;
    doc["abort"] = !(r.value > 0.0);
    doc["inputs"] = inputs_json(c, "single");
  } else {
    WcpEvaluator ev;
    MuOptimum best;
    ChannelParams ch = c.channel;
    if (c.mu_auto) {
      best = optimize_mu(ev, c.protocol, ch, c.decoy(), c.q);
    } else {
      auto at = [&](double q) { return ev.evaluate(c.protocol, ch, c.decoy(), q); };
      best.mu = ch.mu;
      if (c.q.optimize) {
        const auto o = opt::grid_then_golden([&](double q) { return at(q).value; }, opt::linspace(0.0, 0.5, 11),
                                             opt::Goal::maximize, 1e-6);
        best.q = o.x;
      } else {
        best.q = c.q.value;
      }
      best.bound = at(best.q);
    }
    ch.mu = best.mu;
    const PulseObservables obs = observables(c.protocol, ch, false);
    doc["value"] = best.bound.value;
    doc["unit"] = to_string(RateUnit::per_pulse);
    doc["witness"] = witness_json(best.bound.witness);
    doc["witness"]["mu"] = best.mu;
    doc["witness"]["q"] = best.q;
    doc["observed"] = {{"r_mu", obs.r_mu}, {"q_mu", obs.q_mu}};
    doc["abort"] = best.bound.abort;
    doc["inputs"] = inputs_json(c, c.decoy() ? "decoy" : "wcp");
  }
  const bool abort = doc["abort"].get<bool>();
  return {abort ? kExitAbort : kExitOk, finish_json(doc)};
}

inline std::string curve_csv(const std::vector<CurvePoint>& pts) {
  std::string s = "distance_km,mu_opt,q_opt,rate_per_pulse,abort\n";
  for (const auto& p : pts) {
    s += format_number(p.distance) + "," + format_number(p.best.mu) + "," + format_number(p.best.q) + "," +
         format_number(p.best.bound.value) + "," + (p.best.bound.abort ? "1" : "0") + "\n";
  }
  return s;
}

inline CommandResult cmd_curve(const RunConfig& c) {
  WcpEvaluator ev;
  const auto pts = rate_curve(ev, c.protocol, c.channel, c.decoy(), c.q, c.from, c.to, c.step);
  if (c.format == "json") {
    nlohmann::json doc;
    doc["inputs"] = inputs_json(c, c.decoy() ? "decoy" : "wcp");
    doc["inputs"].erase("distance_km");
    doc["inputs"]["from"] = c.from;
    doc["inputs"]["to"] = c.to;
    doc["inputs"]["step"] = c.step;
    doc["points"] = nlohmann::json::array();
    for (const auto& p : pts)
      doc["points"].push_back({{"distance_km", p.distance},
                               {"mu_opt", p.best.mu},
                               {"q_opt", p.best.q},
                               {"rate_per_pulse", p.best.bound.value},
                               {"abort", p.best.bound.abort}});
    return {kExitOk, finish_json(doc)};
  }
  return {kExitOk, curve_csv(pts)};
}

inline CommandResult cmd_threshold(const RunConfig& c) {
  ThresholdRequest req;
  req.protocol = c.protocol;
  req.optimize_q = c.q.optimize;
  req.q = c.q.value;
  for (int m = 1; m <= c.ad_block && c.ad_block > 1; ++m) req.ad_blocks.push_back(m);
  req.xor3 = c.xor3;
  nlohmann::json doc;
  try {
    const ThresholdResult r = threshold(req);
    doc["qber"] = r.qber;
    doc["last_positive"] = r.last_positive;
    doc["first_nonpositive"] = r.first_nonpositive;
    doc["trace_length"] = r.trace_length;
    doc["witness"] = {{"q", r.witness.q}, {"ad_block", r.witness.ad_block}, {"value", r.witness.value}};
    doc["abort"] = false;
  } catch (const NoSignChangeError& e) {
    doc["abort"] = true;
    doc["error"] = e.what();
  }
  doc["inputs"] = inputs_json(c, "single");
  doc["inputs"].erase("qber");
  const bool abort = doc["abort"].get<bool>();
  return {abort ? kExitAbort : kExitOk, finish_json(doc)};
}

/// Writes to `path`, or to stdout when it is empty. Binary mode keeps LF
/// line endings on every platform.
inline void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
  if (!f) throw UsageError("cannot write '" + path + "'");
}

}  // namespace qkdrate::cli
