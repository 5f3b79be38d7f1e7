// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//
//   acceptance [--out DIR] [--only N]...

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "taeblp/errors.hpp"
#include "taeblp/experiments.hpp"
#include "taeblp/oracle.hpp"

using namespace taeblp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;
};

fs::path g_out = "acceptance_out";

void save(const ExperimentReport& rep, const std::string& stem) {
  write_report_files(rep, g_out, stem);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

bool within(const Estimate& gap, double k) { return std::abs(gap.value) <= k * gap.se; }

const CheckReport& find(const std::vector<CheckReport>& all, const std::string& id) {
  for (const auto& r : all)
    if (r.id == id) return r;
  throw InternalError("verify suite has no check " + id);
}

std::vector<CheckReport> g_verify;

Outcome oracle_criterion(std::initializer_list<const char*> ids) {
  Outcome o;
  std::ostringstream s;
  for (const char* id : ids) {
    const CheckReport& r = find(g_verify, id);
    o.pass = o.pass && r.pass;
    s << id << " max_err=" << fmt(r.max_error) << (r.pass ? "" : " [" + r.detail + "]") << "; ";
  }
  o.summary = s.str();
  return o;
}

Outcome ac5() {
  ShockConfig c;
  c.rho = 0.0;
  c.t = 4.0;
  c.window = {-60, 60};
  c.ensemble.replicas = 200000;
  c.ensemble.seed = 5;
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentReport r = exp_shock_random_walk(c);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  save(r, "ac5_shock_random_walk");
  const double tv = r.check_value("tv_distance");
  const Estimate q = r.at("mean_Q");
  const double target = (std::expm1(1.0) + std::expm1(-1.0)) * 4.0;
  Outcome o;
  o.pass = r.valid && tv <= 0.012 && std::abs(q.value - target) <= 3 * q.se && secs <= 600;
  o.summary = "TV=" + fmt(tv) + " mean=" + fmt(q.value) + "+-" + fmt(q.se) + " target=" +
              fmt(target) + " runtime=" + fmt(secs) + "s";
  return o;
}

std::vector<ExperimentReport> g_char_t2;

Outcome ac6() {
  Outcome o;
  std::ostringstream s;
  for (double rho : {0.0, 1.0}) {
    CharacteristicConfig c;
    c.rho = rho;
    c.t = 2.0;
    c.pair_window = {-30, 40};
    c.single_window = {-30, 40};
    c.ensemble.replicas = 100000;
    c.ensemble.seed = 6;
    const ExperimentReport r = exp_characteristic_Q(c);
    save(r, "ac6_characteristic_rho" + fmt(rho));
    g_char_t2.push_back(r);
    o.pass = o.pass && r.valid;
    for (const auto& [k, e] : r.estimates) {
      if (k.rfind("identity_gap@", 0) != 0) continue;
      o.pass = o.pass && within(e, 3.0);
      s << "rho=" << rho << " " << k << "=" << fmt(e.value) << "+-" << fmt(e.se) << "; ";
    }
    // At t = 0 both sides vanish exactly.
    c.t = 0.0;
    c.ensemble.replicas = 1000;
    const ExperimentReport z = exp_characteristic_Q(c);
    const double lhs = z.at("var_h@i=0").value;
    const double rhs = z.at("var_omega_E_abs_Q_minus_i@i=0").value;
    o.pass = o.pass && lhs == 0.0 && rhs == 0.0;
    s << "t=0 anchor " << fmt(lhs) << "=" << fmt(rhs) << "; ";
  }
  o.summary = s.str();
  return o;
}

Outcome ac7() {
  Outcome o;
  std::ostringstream s;
  const auto judge = [&](const ExperimentReport& r, double rho, double t) {
    const Estimate d = r.at("mean_Q_minus_V_t");
    const bool ok = r.valid && within(d, 3.0);
    o.pass = o.pass && ok;
    s << "rho=" << rho << " t=" << t << " EQ-Vt=" << fmt(d.value) << "+-" << fmt(d.se) << "; ";
  };
  if (g_char_t2.size() == 2) {
    judge(g_char_t2[0], 0.0, 2.0);
    judge(g_char_t2[1], 1.0, 2.0);
  } else {
    o.pass = false;
    s << "t=2 runs missing; ";
  }
  for (double rho : {0.0, 1.0}) {
    CharacteristicConfig c;
    c.rho = rho;
    c.t = 8.0;
    c.pair_window = rho == 0.0 ? Window{-60, 60} : Window{-50, 100};
    c.single_window = {-30, 30};
    c.sites = {0};
    c.ensemble.replicas = 20000;
    c.ensemble.seed = 7;
    const ExperimentReport r = exp_characteristic_Q(c);
    save(r, "ac7_characteristic_t8_rho" + fmt(rho));
    judge(r, rho, 8.0);
  }
  o.summary = s.str();
  return o;
}

Outcome ac8() {
  CovarianceConfig c;
  c.theta = 0.0;
  c.t = 2.0;
  c.z = 0;
  c.window = {-40, 40};
  c.ensemble.replicas = 100000;
  c.ensemble.seed = 8;
  const ExperimentReport r = exp_covariance_identity(c);
  save(r, "ac8_covariance");
  const Estimate gap = r.at("identity_gap");
  const double frac = r.check_value("truncation_tail_fraction");
  Outcome o;
  o.pass = r.valid && within(gap, 3.0) && frac < 0.01;
  o.summary = "Var(h)=" + fmt(r.at("var_h").value) + " sum=" +
              fmt(r.at("weighted_covariance_sum").value) + " gap=" + fmt(gap.value) + "+-" +
              fmt(gap.se) + " tail_fraction=" + fmt(frac);
  return o;
}

Outcome ac9() {
  ConvexityConfig c;
  c.lam = 0.5;
  c.rho = 1.0;
  c.t = 2.0;
  c.ensemble.replicas = 100000;
  c.ensemble.seed = 9;
  const ExperimentReport r = exp_convexity_labels(c);
  save(r, "ac9_convexity");
  const double events = r.check_value("background_events");
  const double violations = r.check_value("violations");
  const double excess = r.check_value("max_tail_excess");
  Outcome o;
  o.pass = r.valid && events >= 1e6 && violations == 0 && excess <= 0.0;
  o.summary = "events=" + fmt(events) + " violations=" + fmt(violations) +
              " max_tail_excess=" + fmt(excess) + " (label vs direct Q law TV=" +
              fmt(r.check_value("q_law_tv")) + ")";
  return o;
}

Outcome ac10() {
  ScalingConfig c;
  c.rho = 1.0;
  c.ensemble.replicas = 4000;
  c.ensemble.seed = 10;
  const ExperimentReport r = exp_scaling_scan(c);
  save(r, "ac10_scaling");
  const Estimate slope = r.at("loglog_slope");
  const double off = r.check_value("max_off_characteristic_relative_error");
  const Estimate tail = r.at("P(|Q|>3t)");
  Outcome o;
  o.pass = r.valid && slope.value < 0.9 && off <= 0.15 && tail.value < 1e-3;
  o.summary = "slope=" + fmt(slope.value) + "+-" + fmt(slope.se) + " off_char_rel_err=" + fmt(off) +
              " P(|Q|>3t)=" + fmt(tail.value);
  return o;
}

std::string bytes_of(const ExperimentReport& r) {
  std::ostringstream os;
  write_csv(os, r);
  write_json(os, r);
  return os.str();
}

Outcome ac11() {
  Outcome o;
  std::ostringstream s;
  const auto twice = [&](const std::string& name, const std::function<ExperimentReport(int)>& run) {
    const std::string a = bytes_of(run(1));
    const std::string b = bytes_of(run(3));
    const bool same = a == b;
    o.pass = o.pass && same;
    s << name << (same ? " identical" : " DIFFERS") << "; ";
  };
  twice("shock", [](int w) {
    ShockConfig c;
    c.ensemble = {500, 11, w};
    return exp_shock_random_walk(c);
  });
  twice("characteristic", [](int w) {
    CharacteristicConfig c;
    c.rho = 1.0;
    c.ensemble = {500, 11, w};
    return exp_characteristic_Q(c);
  });
  twice("convexity", [](int w) {
    ConvexityConfig c;
    c.ensemble = {300, 11, w};
    return exp_convexity_labels(c);
  });
  twice("covariance", [](int w) {
    CovarianceConfig c;
    c.ensemble = {500, 11, w};
    return exp_covariance_identity(c);
  });
  twice("scaling", [](int w) {
    ScalingConfig c;
    c.t_grid = {2.0, 4.0};
    c.window = {-40, 60};
    c.off_time = 4.0;
    c.tail_replicas = 200;
    c.ensemble = {50, 11, w};
    return exp_scaling_scan(c);
  });
  o.summary = s.str() + "(workers 1 vs 3)";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int k = 1; k < argc; ++k) {
    const std::string a = argv[k];
    if (a == "--out" && k + 1 < argc) {
      g_out = argv[++k];
    } else if (a == "--only" && k + 1 < argc) {
      only.insert(std::stoi(argv[++k]));
    } else {
      std::cerr << "usage: acceptance [--out DIR] [--only N]...\n";
      return 2;
    }
  }
  fs::create_directories(g_out);

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, [] { return oracle_criterion({"refresh.tables"}); }},
      {2, [] { return oracle_criterion({"refresh.label_domination"}); }},
      {3, [] { return oracle_criterion({"measure.shift_identities"}); }},
      {4, [] { return oracle_criterion({"generator.stationarity", "shock.generator"}); }},
      {5, ac5},
      {6, ac6},
      {7, ac7},
      {8, ac8},
      {9, ac9},
      {10, ac10},
      {11, ac11},
  };

  bool all = true;
  const auto t0 = std::chrono::steady_clock::now();
  VerifyOptions vo;
  vo.betas = {0.25, 0.5, 1.0, 2.0};
  vo.d_max = 60;
  g_verify = run_verify_suite(vo);
  const double oracle_secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "oracle checks took " << fmt(oracle_secs) << "s\n";
  if (oracle_secs > 60.0) {
    std::cout << "oracle budget of 60 s exceeded\n";
    all = false;
  }

  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && !only.contains(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "AC" << id << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << o.summary << " ["
              << fmt(secs) << "s]" << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
