/*
 * Copyright 2026 The xbandit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "xbandit/xbandit.hpp"

#ifndef XBANDIT_CLI_PATH
#error "XBANDIT_CLI_PATH must name the command-line binary"
#endif

using namespace xbandit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o{false, ""};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool pass = o.pass;
  std::string detail = o.detail;
  if (budget_s > 0 && secs > budget_s) {
    pass = false;
    detail += " [over time budget " + format_number(budget_s) + " s]";
  }
  if (!pass) ++failures;
  std::printf("%s C%d %s: %s (%.2f s)\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

// Runs the binary with a fixed worker count; returns its exit status.
int run_cli(const std::string& args, unsigned workers, const fs::path& out) {
  const std::string cmd = "XBANDIT_WORKERS=" + std::to_string(workers) + " '" + XBANDIT_CLI_PATH +
                          "' --out-dir '" + out.string() + "' " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

int main() {
  criterion(1, "rule of 59", 1.0, [] {
    const auto r = check_rule59(100000, 59);
    return Outcome{r.pass && r.get("exact_at_least_0_95") == 1.0,
                   "exact=" + fmt(r.get("exact_probability")) + " mc=" + fmt(r.get("empirical_probability")) +
                       " se=" + fmt(r.get("std_error"))};
  });

  criterion(2, "beta law of the transformed minimum", 10.0, [] {
    bool ok = true;
    std::string d;
    for (std::uint64_t t : {1, 10, 59}) {
      const auto r = check_beta_law(t, 100000, 1000 + t);
      const bool mean_ok = r.get("mean_within_3se") == 1.0;
      ok = ok && r.pass && mean_ok;
      d += "T=" + std::to_string(t) + " ks=" + fmt(r.get("ks_statistic")) + "/" + fmt(r.get("ks_critical")) +
           " mean=" + fmt(r.get("mean")) + (mean_ok ? "" : "(off)") + "; ";
    }
    return Outcome{ok, d};
  });

  criterion(3, "Bernoulli instance ratio and T'", 0.0, [] {
    const auto t = instances::bernoulli_vs_one(0.5);
    const auto p = instances::late_start();
    double worst_ratio = 0.0;
    bool tprime_ok = true;
    for (std::uint64_t h = 1; h <= 20; ++h) {
      worst_ratio = std::max(worst_ratio, std::abs(legacy_ratio(*p, t, h).ratio - 2.0));
      const auto r = extreme_regret(*p, t, h, single_armed_oracle(t, h).value);
      tprime_ok = tprime_ok && r.t_prime && *r.t_prime == h + 1;
    }
    return Outcome{worst_ratio <= 1e-12 && tprime_ok,
                   "max |ratio-2|=" + fmt(worst_ratio) + " T'=T+1 for all T in 1..20: " + (tprime_ok ? "yes" : "no")};
  });

  criterion(4, "uniform instance ratio and MC curve", 0.0, [] {
    const auto t = instances::uniform_vs_one();
    const auto p = instances::late_start();
    bool ok = true;
    std::string d;
    for (std::uint64_t h : {10, 100}) {
      const double ratio = legacy_ratio(*p, t, h).ratio;
      const double want = double(h + 1) / double(h);
      const bool r_ok = std::abs(ratio - want) <= 1e-12;
      const auto mc = estimate_min_curve(*constant_arm(0), t, h, 100000, 4000 + h);
      const bool mc_ok = std::abs(mc.at(h) - 1.0 / double(h + 1)) <= 3.0 * mc.se_at(h);
      ok = ok && r_ok && mc_ok;
      d += "T=" + std::to_string(h) + " ratio=" + fmt(ratio) + " mc=" + fmt(mc.at(h)) + "+-" + fmt(mc.se_at(h)) + "; ";
    }
    return Outcome{ok, d};
  });

  criterion(5, "two-arm instance values", 0.0, [] {
    const auto t = instances::half_vs_quarter();
    const double a = t[0].expected_min(2);
    const double b = t[1].expected_min(2);
    const double seq = exact_min_curve(FixedSequence({0, 1}), t, 2).at(2);
    const double opt = optimal_oracle_value(t, 2);
    const bool ok = std::abs(a - 0.5) <= 1e-12 && std::abs(b - 9.0 / 16.0) <= 1e-12 &&
                    std::abs(seq - 0.375) <= 1e-12 && std::abs(opt - 0.375) <= 1e-12;
    return Outcome{ok, "arm1=" + fmt(a) + " arm2=" + fmt(b) + " sequence=" + fmt(seq) + " optimal=" + fmt(opt)};
  });

  criterion(6, "best-arm scan bounds", 5.0, [] {
    bool ok = true;
    std::string d;
    for (std::uint64_t h : {100, 1000, 10000}) {
      const auto r = best_arm_scan(h, 10000);
      const auto fine = best_arm_scan(h, 100000);
      const bool in = r.s_star <= r.upper_bound && r.s_star >= r.lower_bound;
      const bool stable = std::abs(r.s_star - fine.s_star) <= 1e-6;
      ok = ok && in && stable;
      d += "T=" + std::to_string(h) + " s*=" + fmt(r.s_star) + " in[" + fmt(r.lower_bound) + "," + fmt(r.upper_bound) +
           "] drift=" + fmt(std::abs(r.s_star - fine.s_star)) + "; ";
    }
    return Outcome{ok, d};
  });

  criterion(7, "canonical sequence properties", 0.0, [] {
    bool ok = true;
    std::string d;
    for (std::size_t k : {2, 3, 5}) {
      const auto r = check_lemma5(canonical_sequence(k, 4));
      ok = ok && r.pass;
      d += "K=" + std::to_string(k) + (r.pass ? " ok" : " FAILED") + "; ";
    }
    return Outcome{ok, d};
  });

  criterion(8, "oracle value at T_2 on the desk preset", 1.0, [] {
    const auto r = check_lemma6_suite(desk_preset(2), 2);
    return Outcome{r.pass, "T_2=" + fmt(r.get("T_i")) + " assignments=" + fmt(r.get("assignments")) +
                               " max oracle/(2 alpha_2)=" + fmt(r.get("max_oracle_over_two_alpha"))};
  });

  criterion(9, "sibling-average and exponential bounds", 0.0, [] {
    const auto ten = check_lemma10_suite(1000, 10);
    const auto eleven = check_lemma11_suite(100, 10000);
    return Outcome{ten.pass && eleven.pass,
                   "random cases passed=" + fmt(ten.get("passed")) + "/1000 min margin=" + fmt(ten.get("min_margin")) +
                       "; grid suites passed=" + fmt(eleven.get("passed")) + "/100"};
  });

  criterion(10, "brute-force policy tables", 60.0, [] {
    const auto r = check_lemma7_8_suite(desk_preset(2), 2, 2, 0);
    return Outcome{r.pass && r.get("checked") > 0, "tables=" + fmt(r.get("tables_exhaustive")) +
                                                      " checked=" + fmt(r.get("checked")) +
                                                      " passed=" + fmt(r.get("passed")) +
                                                      " min margin=" + fmt(r.get("min_lemma7_margin"))};
  });

  criterion(11, "desk-scale lower-bound demonstration", 900.0, [] {
    const auto seq = desk_preset(2);
    const std::vector<std::pair<std::string, PolicyPtr>> policies{
        {"round_robin", std::make_shared<RoundRobin>()},
        {"eps_greedy_min", std::make_shared<EpsGreedyMin>(0.1)}};
    bool ok = true;
    std::string d;
    for (const auto& [name, policy] : policies) {
      AssignmentStudy study;
      study.assignments = 200;
      study.trials = 400;
      const auto cor = check_corollary9(seq, 2, *policy, study);
      TheoremStudy ts;
      ts.sampling = study;
      const auto thm = demonstrate_theorem1(seq, 2, *policy, ts);
      const bool ratio_ok = thm.get("all_events_meet_ratio") == 1.0;
      ok = ok && cor.pass && ratio_ok;
      d += name + ": fraction=" + fmt(cor.get("fraction")) + " (bound " + fmt(cor.get("bound")) + " - 2se " +
           fmt(2.0 * cor.get("fraction_se")) + ") ratio>=0.9 T'/T on every event: " + (ratio_ok ? "yes" : "no") +
           " median R=" + fmt(thm.get("ratio_median_finite")) + "; ";
    }
    return Outcome{ok, d};
  });

  criterion(12, "byte-identical outputs across worker counts", 0.0, [] {
    const fs::path root = fs::temp_directory_path() / "xbandit_acceptance";
    fs::remove_all(root);
    const std::vector<std::string> commands{
        "simulate --T 200 --N 5000 --example 4 --policy uniform_random --seed 11",
        "regret --T 20 --N 5000 --example 1 --p 0.5 --mc --bootstrap 200 --seed 12",
        "regret --T 6 --example 4 --exact --oracle optimal",
        "verify beta_law --param T=10 --param N=20000 --seed 13",
        "verify corollary9 --param N_b=20 --param N_mc=100 --policy eps_greedy_min --seed 14",
        "construct --K 3 --b sample --seed 15",
        "best-arm-scan --T 100 --T 1000"};
    bool ok = true;
    std::size_t files = 0;
    std::string d;
    for (std::size_t n = 0; n < commands.size(); ++n) {
      const fs::path a = root / (std::to_string(n) + "_w1");
      const fs::path b = root / (std::to_string(n) + "_w8");
      const fs::path c = root / (std::to_string(n) + "_w1_again");
      const int ra = run_cli(commands[n], 1, a);
      const int rb = run_cli(commands[n], 8, b);
      const int rc = run_cli(commands[n], 1, c);
      if (ra != 0 || rb != 0 || rc != 0 || !fs::exists(a)) {
        ok = false;
        d += "command " + std::to_string(n) + " exited " + std::to_string(ra) + "/" + std::to_string(rb) + "; ";
        continue;
      }
      for (const auto& e : fs::directory_iterator(a)) {
        const auto name = e.path().filename();
        ++files;
        if (slurp(e.path()) != slurp(b / name) || slurp(e.path()) != slurp(c / name)) {
          ok = false;
          d += "differs: " + std::to_string(n) + "/" + name.string() + "; ";
        }
      }
      std::size_t count_b = 0;
      for ([[maybe_unused]] const auto& e : fs::directory_iterator(b)) ++count_b;
      std::size_t count_a = 0;
      for ([[maybe_unused]] const auto& e : fs::directory_iterator(a)) ++count_a;
      if (count_a != count_b) ok = false;
    }
    fs::remove_all(root);
    return Outcome{ok && files > 0, std::to_string(commands.size()) + " commands, " + std::to_string(files) +
                                        " files compared " + d};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
