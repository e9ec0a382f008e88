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

// Command-line front end: rate, curve, threshold and verify.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/verify.hpp"

namespace {

using namespace qkdrate::cli;

struct Flags {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config;
  std::string positional_mode;
};

void add_value(CLI::App* app, Flags& f, const std::string& key, const std::string& help) {
  f.options[key] = app->add_option("--" + key, f.values[key], help);
}

void add_switch(CLI::App* app, Flags& f, const std::string& key, const std::string& help) {
  f.options[key] = app->add_flag("--" + key, help);
}

void add_common(CLI::App* app, Flags& f) {
  add_value(app, f, "protocol", "bb84 | six-state | sarg");
  add_value(app, f, "q", "randomization probability in [0, 0.5], or 'auto'");
  add_value(app, f, "mu", "mean photon number, or 'auto'");
  add_value(app, f, "distance", "fiber length in km");
  add_value(app, f, "alpha", "attenuation in dB/km");
  add_value(app, f, "eta-det", "detector efficiency");
  add_value(app, f, "pdark", "dark-count probability per detector per pulse");
  add_value(app, f, "visibility", "channel visibility");
  add_switch(app, f, "decoy", "ideal decoy-state estimation");
  add_value(app, f, "out", "output path (default: stdout)");
  add_value(app, f, "format", "csv | json");
  app->add_option("--config", f.config, "JSON file with default settings (env: " + std::string(kConfigEnv) + ")");
}

nlohmann::json merged_settings(const Flags& f) {
  nlohmann::json s = nlohmann::json::object();
  if (const auto path = config_path(f.config)) s = load_config_file(*path);
  for (const auto& [key, opt] : f.options) {
    if (opt->count() == 0) continue;
    if (key == "xor" || key == "decoy") {
      s[key] = true;
    } else {
      s[key] = f.values.at(key);
    }
  }
  if (!f.positional_mode.empty()) s["mode"] = f.positional_mode;
  return s;
}

int report_verify(const VerifyOptions& o) {
  bool ok = true;
  for (const auto& r : run_verify(o)) {
    std::printf("%s  %-50s max_dev=%.3g tol=%.3g\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.max_deviation,
                r.tolerance);
    ok = ok && r.passed;
  }
  std::printf("verify: %s\n", ok ? "all suites passed" : "FAILED");
  std::fflush(stdout);
  return ok ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secret-key rate bounds for BB84, six-state and SARG"};
  app.require_subcommand(1);

  Flags rate_f, curve_f, thr_f;
  auto* rate = app.add_subcommand("rate", "evaluate one bound (JSON)");
  rate->add_option("mode", rate_f.positional_mode, "single | wcp | decoy")
      ->check(CLI::IsMember({"single", "wcp", "decoy"}));
  add_common(rate, rate_f);
  add_value(rate, rate_f, "qber", "observed QBER (single mode)");
  add_value(rate, rate_f, "ad-block", "advantage-distillation block size");
  add_switch(rate, rate_f, "xor", "parity blocks of three after AD");

  auto* curve = app.add_subcommand("curve", "optimized rate per pulse against distance (CSV)");
  add_common(curve, curve_f);
  add_value(curve, curve_f, "from", "first distance in km");
  add_value(curve, curve_f, "to", "last distance in km");
  add_value(curve, curve_f, "step", "distance step in km");

  auto* thr = app.add_subcommand("threshold", "largest QBER with a positive single-photon bound (JSON)");
  add_common(thr, thr_f);
  add_value(thr, thr_f, "ad-block", "use AD with every block size up to this value");
  add_switch(thr, thr_f, "xor", "parity blocks of three after AD");

  auto* verify = app.add_subcommand("verify", "run the self-check suites");
  std::string fault;
  verify->add_option("--inject-fault", fault)->group("")->check(CLI::IsMember({"ad"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (verify->parsed()) return report_verify(VerifyOptions{fault == "ad"});

    CommandResult result;
    RunConfig cfg;
    if (rate->parsed()) {
      cfg = make_config(merged_settings(rate_f));
      result = cmd_rate(cfg);
    } else if (curve->parsed()) {
      nlohmann::json s = merged_settings(curve_f);
      if (!s.contains("mode") || s["mode"] == "single") s["mode"] = "wcp";
      cfg = make_config(s);
      result = cmd_curve(cfg);
    } else {
      nlohmann::json s = merged_settings(thr_f);
      cfg = make_config(s);
      if (cfg.mode != Mode::single) throw UsageError("threshold: single-photon mode only");
      result = cmd_threshold(cfg);
    }
    write_output(cfg.out, result.text);
    return result.exit_code;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const qkdrate::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAbort;
  }
}
