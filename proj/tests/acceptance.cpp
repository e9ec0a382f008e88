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

// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance              run every criterion
//   acceptance --criterion N

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "process.hpp"
#include "qkdrate/qkdrate.hpp"
#include "test_support.hpp"

namespace {

using namespace qkdrate;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

class Report {
 public:
  void check(bool ok, const std::string& what) {
    pass_ = pass_ && ok;
    if (!detail_.empty()) detail_ += "; ";
    detail_ += (ok ? "" : "!") + what;
  }
  Outcome done() const { return {pass_, detail_}; }

 private:
  bool pass_ = true;
  std::string detail_;
};

Outcome six_state_distillation() {
  ThresholdRequest req;
  req.protocol = Protocol::six_state;
  req.optimize_q = true;
  for (int m = 1; m <= 100; ++m) req.ad_blocks.push_back(m);
  const ThresholdResult r = threshold(req);
  Report rep;
  rep.check(std::abs(r.qber - 0.276) <= 0.003, fmt("threshold %.5f", r.qber) + fmt(" (m=%.0f)", r.witness.ad_block));
  return rep.done();
}

Outcome sarg_thresholds() {
  ThresholdRequest req;
  req.protocol = Protocol::sarg;
  const double fixed = threshold(req).qber;
  req.optimize_q = true;
  const ThresholdResult tuned = threshold(req);
  Report rep;
  rep.check(std::abs(fixed - 0.1167) <= 0.0005, fmt("q=0: %.5f", fixed));
  rep.check(std::abs(tuned.qber - 0.1308) <= 0.0005, fmt("q opt: %.5f", tuned.qber) + fmt(" (q=%.4f)", tuned.witness.q));
  return rep.done();
}

Outcome engine_identity() {
  testing::Rng rng(101);
  double dev = 0.0;
  for (int s = 0; s < 100; ++s) {
    const BellDiagonal lam = testing::random_bell(rng);
    dev = std::max(dev, std::abs(keyrate_two_qubit(bell_decomposition(lam, 0.0)).value - (1.0 - lam.entropy())));
  }
  double fam_dev = 0.0, arg_dev = 0.0;
  bool arg_ok = true;
  for (double q : {0.02, 0.05, 0.08, 0.11, 0.15, 0.2}) {
    const FamilyInfimum inf = s1_bb84_infimum(q, 0.0, EntropyRoute::engine);
    fam_dev = std::max(fam_dev, std::abs(inf.value - (1.0 - binary_entropy(q))));
    const double step = q / static_cast<double>(kFamilyGridPoints - 1);
    arg_dev = std::max(arg_dev, std::abs(inf.lambda11 - q * q) / step);
    arg_ok = arg_ok && std::abs(inf.lambda11 - q * q) <= step;
  }
  Report rep;
  rep.check(dev <= 1e-9, fmt("identity dev %.2e", dev));
  rep.check(fam_dev <= 1e-6, fmt("family min dev %.2e", fam_dev));
  rep.check(arg_ok, fmt("minimizer off by %.3f grid steps", arg_dev));
  return rep.done();
}

Outcome oracle_equivalence() {
  testing::Rng rng(102);
  double ad = 0.0, x = 0.0;
  for (int s = 0; s < 50; ++s) {
    const BellDiagonal lam = testing::random_bell(rng);
    for (int m = 1; m <= 6; ++m) {
      const BellDiagonal a = advantage_distill(lam, m).lam_out;
      const BellDiagonal b = ad_oracle(lam, m);
      for (std::size_t k = 0; k < 4; ++k) ad = std::max(ad, std::abs(a[k] - b[k]));
    }
  }
  for (int s = 0; s < 50; ++s) {
    const BellDiagonal lam = testing::random_bell(rng);
    const BellDiagonal a = xor_three(lam);
    const BellDiagonal b = xor_oracle(lam);
    for (std::size_t k = 0; k < 4; ++k) x = std::max(x, std::abs(a[k] - b[k]));
  }
  Report rep;
  rep.check(ad <= 1e-12, fmt("AD dev %.2e", ad));
  rep.check(x <= 1e-12, fmt("XOR dev %.2e", x));
  return rep.done();
}

Outcome sarg_two_photon() {
  const double s2 = s2_sarg(kSargTwoPhotonLimit).value;
  double dev = 0.0;
  const auto grid = opt::linspace(std::log(1e-6), std::log(1e8), 4001);
  for (int k = 1; k <= 166; ++k) {
    const double q2 = 1e-3 * k;
    auto f = [q2](double lx) {
      const double x = std::exp(lx);
      return x * q2 + sarg_g(x);
    };
    const double brute = opt::grid_then_golden(f, grid, opt::Goal::minimize, 1e-12).fx;
    dev = std::max(dev, std::abs(sarg_bigB(q2) - brute));
  }
  Report rep;
  rep.check(std::abs(s2) <= 1e-9, fmt("S2(1/6) = %.2e", s2));
  rep.check(dev <= 1e-8, fmt("B dev %.2e", dev));
  return rep.done();
}

Outcome scaling_laws() {
  WcpEvaluator ev;
  Report rep;
  for (Protocol p : {Protocol::bb84, Protocol::sarg}) {
    std::vector<std::pair<double, double>> pts;
    std::vector<double> ratio;
    bool all_positive = true;
    for (double len = 10.0; len <= 60.0; len += 5.0) {
      ChannelParams c;
      c.alpha = 0.25;
      c.eta_det = 0.1;
      c.p_dark = 1e-5;
      c.visibility = 1.0;
      c.length = len;
      const MuOptimum m = optimize_mu(ev, p, c, false, {false, 0.0});
      const double t = c.transmission();
      if (m.bound.value > 0.0) {
        pts.emplace_back(t, m.bound.value);
      } else {
        all_positive = false;
      }
      ratio.push_back(p == Protocol::bb84 ? m.mu / t : m.mu / std::sqrt(t));
    }
    const double want = p == Protocol::bb84 ? 2.0 : 1.5;
    const std::string name = to_string(p);
    rep.check(all_positive, name + ": rate positive over 10-60 km");
    if (pts.size() >= 4) {
      const double slope = opt::loglog_slope(pts);
      rep.check(std::abs(slope - want) <= 0.1, name + fmt(" slope %.3f", slope));
    } else {
      rep.check(false, name + ": too few positive points for a slope");
    }
    const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
    double mean = 0.0;
    for (double r : ratio) mean += r;
    mean /= static_cast<double>(ratio.size());
    const double spread = std::max(*hi / mean - 1.0, 1.0 - *lo / mean);
    rep.check(spread <= 0.1, name + fmt(" mu ratio spread %.1f%%", 100.0 * spread));
  }
  return rep.done();
}

Outcome ordering() {
  WcpEvaluator ev;
  Report rep;
  bool decoy_ok = true;
  for (Protocol p : {Protocol::bb84, Protocol::sarg}) {
    for (double len = 0.0; len <= 60.0; len += 10.0) {
      ChannelParams c;
      c.length = len;
      const double without = optimize_mu(ev, p, c, false, {false, 0.0}).bound.value;
      const double with = optimize_mu(ev, p, c, true, {false, 0.0}).bound.value;
      decoy_ok = decoy_ok && with >= without;
    }
  }
  rep.check(decoy_ok, "decoy >= no-decoy");

  bool q_ok = true;
  for (double qber = 0.0; qber <= 0.13; qber += 0.01) {
    for (Protocol p : {Protocol::bb84, Protocol::six_state, Protocol::sarg}) {
      ThresholdRequest fixed;
      fixed.protocol = p;
      ThresholdRequest tuned = fixed;
      tuned.optimize_q = true;
      q_ok = q_ok && best_rate_at(tuned, qber).value >= best_rate_at(fixed, qber).value;
    }
  }
  for (Protocol p : {Protocol::bb84, Protocol::sarg}) {
    for (double len : {0.0, 20.0, 40.0}) {
      ChannelParams c;
      c.visibility = 0.95;
      c.length = len;
      const double fixed = optimize_mu(ev, p, c, false, {false, 0.0}).bound.value;
      const double tuned = optimize_mu(ev, p, c, false, {true, 0.0}).bound.value;
      q_ok = q_ok && tuned >= fixed;
    }
  }
  rep.check(q_ok, "optimized q >= q=0");

  ChannelParams c;
  c.visibility = 0.95;
  const double bb84 = cutoff_distance(ev, Protocol::bb84, c, false, {false, 0.0}, 0.0, 200.0, 5.0);
  const double sarg = cutoff_distance(ev, Protocol::sarg, c, false, {false, 0.0}, 0.0, 200.0, 5.0);
  rep.check(sarg < bb84, fmt("V=0.95 cutoff SARG %.2f km", sarg) + fmt(" < BB84 %.2f km", bb84));
  return rep.done();
}

Outcome channel_consistency() {
  testing::Rng rng(103);
  double dev = 0.0;
  for (int s = 0; s < 200; ++s) {
    ChannelParams c;
    c.length = rng.uniform(0.0, 150.0);
    c.eta_det = rng.uniform(0.01, 1.0);
    c.p_dark = std::pow(10.0, rng.uniform(-8.0, -3.0));
    c.visibility = rng.uniform(0.5, 1.0);
    c.mu = rng.uniform(0.01, 1.0);
    for (Protocol p : {Protocol::bb84, Protocol::sarg}) {
      const PulseObservables o = observables(p, c);
      double r = 0.0, rq = 0.0;
      for (const auto& t : o.per_n) {
        r += poisson_pn(c.mu, t.n) * t.yield;
        rq += poisson_pn(c.mu, t.n) * t.error_yield;
      }
      dev = std::max({dev, std::abs(r - o.r_mu), std::abs(rq - o.r_mu * o.q_mu)});
    }
  }
  ChannelParams c;
  c.eta_det = 1.0;
  c.p_dark = 0.0;
  const PhotonNumberTerm b = bb84_term(c, 1);
  const PhotonNumberTerm s = sarg_term(c, 1);
  Report rep;
  rep.check(dev <= 1e-10, fmt("series dev %.2e", dev));
  rep.check(b.yield == 0.5 && b.error() == 0.0, "BB84 (Y1,Q1) = (1/2,0)");
  rep.check(s.yield == 0.25 && s.error() == 0.0, "SARG (Y1,Q1) = (1/4,0)");
  return rep.done();
}

Outcome block_concentration() {
  Report rep;
  double prev = 1.0;
  bool ok = true;
  std::string values;
  for (int n : {4, 8, 12}) {
    const double tv = lemma1_check({n / 2, 0, n / 2, 0}, 2).tv_distance;
    ok = ok && tv <= prev;
    prev = tv;
    values += fmt(values.empty() ? "%.4f" : ", %.4f", tv);
  }
  rep.check(ok, "TV " + values + " non-increasing");
  return rep.done();
}

Outcome determinism() {
  using qkdrate::testing::run_cli;
  Report rep;
  const auto v = run_cli("verify");
  rep.check(v.exit_code == 0, "verify exit " + std::to_string(v.exit_code));
  const std::pair<const char*, const char*> sweeps[] = {
      {"sarg", "curve --protocol sarg --from 0 --to 20 --step 10 --q 0"},
      {"bb84 q auto", "curve --protocol bb84 --from 0 --to 40 --step 10 --q auto"},
      {"sarg decoy json", "curve --protocol sarg --decoy --from 0 --to 60 --step 20 --q auto --format json"},
  };
  for (const auto& [label, sweep] : sweeps) {
    const std::string args = std::string(sweep) + " --out ";
    const int a = run_cli(args + "acceptance_a.out").exit_code;
    const int b = run_cli(args + "acceptance_b.out").exit_code;
    const std::string fa = qkdrate::testing::read_file("acceptance_a.out");
    const std::string fb = qkdrate::testing::read_file("acceptance_b.out");
    rep.check(a == 0 && b == 0 && !fa.empty() && fa == fb, std::string(label) + " identical");
    std::remove("acceptance_a.out");
    std::remove("acceptance_b.out");
  }
  return rep.done();
}

struct Criterion {
  const char* title;
  double budget_s;  // 0: no runtime requirement
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"six-state distillation threshold", 60.0, six_state_distillation},
      {"SARG single-photon thresholds", 120.0, sarg_thresholds},
      {"engine identity and BB84 family minimum", 0.0, engine_identity},
      {"distillation and XOR oracle equivalence", 0.0, oracle_equivalence},
      {"SARG two-photon bound", 0.0, sarg_two_photon},
      {"weak-pulse scaling laws", 300.0, scaling_laws},
      {"ordering properties", 0.0, ordering},
      {"channel consistency", 0.0, channel_consistency},
      {"block concentration trend", 0.0, block_concentration},
      {"determinism", 0.0, determinism},
  };

  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
      return 1;
    }
  }
  if (only < 0 || only > static_cast<int>(all.size())) {
    std::fprintf(stderr, "criterion must be 1..%zu\n", all.size());
    return 1;
  }

  bool ok = true;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (only != 0 && static_cast<int>(i) + 1 != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (all[i].budget_s > 0.0 && secs > all[i].budget_s) {
      o.pass = false;
      o.detail += fmt("; !over time budget of %.0f s", all[i].budget_s);
    }
    std::printf("criterion %2zu %s  %s  [%s] (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", all[i].title,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    ok = ok && o.pass;
  }
  return ok ? 0 : 1;
}
