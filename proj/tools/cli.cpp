#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "taeblp/errors.hpp"
#include "taeblp/experiments.hpp"
#include "taeblp/measures.hpp"
#include "taeblp/oracle.hpp"
#include "taeblp/version.hpp"

namespace taeblp::cli {

namespace {

const std::vector<std::string> kKeys{"experiment", "beta",      "rho",       "theta",  "ell",
                                     "r",          "boundary",  "t",         "t_grid", "replicas",
                                     "seed",       "out",       "omega_max", "tail_tol",
                                     "margin",     "lam",       "z",         "truncation",
                                     "refresh_at_start"};

const std::set<std::string> kExperiments{"characteristic_Q", "shock_rw", "convexity", "covariance",
                                         "scaling"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || !std::isfinite(x))
    throw ConfigError(key + " must be a finite number, got '" + v + "'");
  return x;
}

long long to_integer(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigError(key + " must be an integer, got '" + v + "'");
  return x;
}

void add_pair(std::map<std::string, std::string>& kv, const std::string& token) {
  const auto eq = token.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + token + "'");
  kv[trim(token.substr(0, eq))] = trim(token.substr(eq + 1));
}

int run_verify(const VerifyOptions& opt, std::ostream& out) {
  const auto reports = run_verify_suite(opt);
  bool ok = true;
  out << std::left << std::setw(32) << "check" << std::setw(6) << "pass" << std::setw(14)
      << "max_error"
      << "detail\n";
  for (const auto& r : reports) {
    ok = ok && r.pass;
    std::ostringstream err;
    err << std::scientific << std::setprecision(3) << r.max_error;
    out << std::left << std::setw(32) << r.id << std::setw(6) << (r.pass ? "PASS" : "FAIL")
        << std::setw(14) << err.str() << r.detail << '\n';
  }
  return ok ? kOk : kCheckFailure;
}

double density_of(const RunConfig& c) {
  if (c.rho) return *c.rho;
  return StationaryMarginal(*c.theta, RateParams(c.beta), c.tail_tol).density();
}

double theta_of(const RunConfig& c) {
  if (c.theta) return *c.theta;
  return theta_of_rho(*c.rho, RateParams(c.beta), c.tail_tol);
}

double single_t(const RunConfig& c) {
  if (c.t_grid.size() != 1) throw ConfigError(c.experiment + " needs a single time t");
  return c.t_grid.front();
}

EnsembleOptions ensemble_of(const RunConfig& c) {
  EnsembleOptions e;
  e.replicas = c.replicas;
  e.seed = c.seed;
  e.margin = c.margin;
  e.omega_max = c.omega_max;
  return e;
}

ExperimentReport dispatch(const RunConfig& c) {
  const EnsembleOptions e = ensemble_of(c);
  if (c.experiment == "characteristic_Q") {
    CharacteristicConfig cfg;
    cfg.rho = density_of(c);
    cfg.beta = c.beta;
    cfg.t = single_t(c);
    if (c.window_given) cfg.pair_window = cfg.single_window = {c.ell, c.r};
    cfg.ensemble = e;
    return exp_characteristic_Q(cfg);
  }
  if (c.experiment == "shock_rw") {
    ShockConfig cfg;
    cfg.rho = density_of(c);
    cfg.beta = c.beta;
    cfg.t = single_t(c);
    if (c.window_given) cfg.window = {c.ell, c.r};
    cfg.ensemble = e;
    return exp_shock_random_walk(cfg);
  }
  if (c.experiment == "convexity") {
    ConvexityConfig cfg;
    cfg.lam = c.lam;
    cfg.refresh_at_start = c.refresh_at_start;
    cfg.rho = density_of(c);
    cfg.beta = c.beta;
    cfg.t = single_t(c);
    if (c.window_given) cfg.window = {c.ell, c.r};
    cfg.ensemble = e;
    return exp_convexity_labels(cfg);
  }
  if (c.experiment == "covariance") {
    CovarianceConfig cfg;
    cfg.theta = theta_of(c);
    cfg.beta = c.beta;
    cfg.t = single_t(c);
    cfg.z = c.z;
    cfg.truncation = c.truncation;
    if (c.window_given) cfg.window = {c.ell, c.r};
    cfg.ensemble = e;
    return exp_covariance_identity(cfg);
  }
  ScalingConfig cfg;
  cfg.rho = density_of(c);
  cfg.beta = c.beta;
  cfg.t_grid = c.t_grid;
  if (c.window_given) cfg.window = {c.ell, c.r};
  cfg.ensemble = e;
  return exp_scaling_scan(cfg);
}

void print_summary(const ExperimentReport& rep, std::ostream& out) {
  out << rep.name << " (" << rep.tag << ")\n";
  out << std::setprecision(10);
  for (const auto& [k, e] : rep.estimates) out << "  " << k << " = " << e.value << " +- " << e.se << '\n';
  for (const auto& [k, v] : rep.checks) out << "  " << k << " = " << v << '\n';
  out << "  contamination = " << rep.contaminated << "/" << rep.replicas
      << (rep.valid ? "" : " (INVALID)") << '\n';
  for (const auto& n : rep.notes) out << "  note: " << n << '\n';
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.find('=') == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + " is not key=value");
    add_pair(kv, line);
  }
  return kv;
}

RunConfig make_run_config(const std::map<std::string, std::string>& kv) {
  for (const auto& [k, v] : kv)
    if (std::find(kKeys.begin(), kKeys.end(), k) == kKeys.end()) throw ConfigError("unknown key '" + k + "'");
  const auto get = [&](const std::string& k) -> const std::string* {
    const auto it = kv.find(k);
    return it == kv.end() ? nullptr : &it->second;
  };
  RunConfig c;
  if (const auto* v = get("experiment")) c.experiment = *v;
  if (!kExperiments.contains(c.experiment))
    throw ConfigError("experiment must be one of characteristic_Q, shock_rw, convexity, covariance, scaling");
  if (const auto* v = get("beta")) c.beta = to_double("beta", *v);
  if (!(c.beta > 0.0)) throw ConfigError("beta must be positive");
  if (const auto* v = get("rho")) c.rho = to_double("rho", *v);
  if (const auto* v = get("theta")) c.theta = to_double("theta", *v);
  if (c.rho.has_value() == c.theta.has_value()) throw ConfigError("give exactly one of rho and theta");
  const auto* ell = get("ell");
  const auto* r = get("r");
  if ((ell == nullptr) != (r == nullptr)) throw ConfigError("give both ell and r or neither");
  if (ell) {
    c.ell = static_cast<int>(to_integer("ell", *ell));
    c.r = static_cast<int>(to_integer("r", *r));
    c.window_given = true;
    if (!(c.ell < 0 && c.r > 0)) throw ConfigError("window must contain 0: need ell < 0 < r");
  }
  if (const auto* v = get("boundary")) c.boundary = *v;
  if (c.boundary != "theta")
    throw ConfigError("experiments run on the theta boundary; boundary=" + c.boundary + " is not supported");
  const auto* t = get("t");
  const auto* grid = get("t_grid");
  if (t && grid) throw ConfigError("give t or t_grid, not both");
  if (t) c.t_grid = {to_double("t", *t)};
  if (grid) {
    std::stringstream ss(*grid);
    std::string item;
    while (std::getline(ss, item, ',')) c.t_grid.push_back(to_double("t_grid", trim(item)));
  }
  if (c.t_grid.empty()) {
    if (c.experiment == "scaling")
      c.t_grid = {8.0, 16.0, 32.0, 64.0};
    else
      throw ConfigError("missing t");
  }
  for (double x : c.t_grid)
    if (x < 0.0) throw ConfigError("times must be nonnegative");
  const auto* reps = get("replicas");
  if (!reps) throw ConfigError("missing replicas");
  const long long n = to_integer("replicas", *reps);
  if (n < 1) throw ConfigError("replicas must be at least 1");
  c.replicas = static_cast<std::uint64_t>(n);
  if (const auto* v = get("seed")) {
    const long long s = to_integer("seed", *v);
    if (s < 0) throw ConfigError("seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (const auto* v = get("out")) c.out = *v;
  if (const auto* v = get("omega_max")) c.omega_max = static_cast<int>(to_integer("omega_max", *v));
  if (c.omega_max < 1) throw ConfigError("omega_max must be at least 1");
  if (const auto* v = get("tail_tol")) c.tail_tol = to_double("tail_tol", *v);
  if (!(c.tail_tol > 0.0) || c.tail_tol > 1e-6) throw ConfigError("tail_tol must lie in (0, 1e-6]");
  if (const auto* v = get("margin")) c.margin = static_cast<int>(to_integer("margin", *v));
  if (const auto* v = get("lam")) c.lam = to_double("lam", *v);
  if (const auto* v = get("z")) c.z = static_cast<int>(to_integer("z", *v));
  if (const auto* v = get("truncation")) c.truncation = static_cast<int>(to_integer("truncation", *v));
  if (const auto* v = get("refresh_at_start")) {
    if (*v != "true" && *v != "false") throw ConfigError("refresh_at_start must be true or false");
    c.refresh_at_start = *v == "true";
  }
  return c;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact simulator and verification suite for the exponential bricklayers process"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  VerifyOptions vopt;
  std::vector<double> betas;
  auto* verify = app.add_subcommand("verify", "Run the exact oracle checks");
  verify->add_option("--beta", betas, "Values of beta (repeatable)");
  verify->add_option("--d-max", vopt.d_max, "Largest discrepancy count in the table checks");
  verify->add_option("--perturb-p", vopt.p_perturbation, "Add this to p(d) (mutation test hook)");

  auto* run = app.add_subcommand("run", "Run one experiment and write CSV and JSON");
  std::string config_path;
  std::vector<std::string> tokens;
  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_opts;
  run->add_option("--config", config_path, "File of key=value lines");
  run->add_option("settings", tokens, "key=value overrides");
  for (const auto& k : kKeys) {
    std::string flag = "--" + k;
    std::replace(flag.begin(), flag.end(), '_', '-');
    flag_opts[k] = run->add_option(flag, flag_values[k]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (verify->parsed()) {
      if (!betas.empty()) vopt.betas = betas;
      return run_verify(vopt, out);
    }
    std::map<std::string, std::string> kv;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ConfigError("cannot read config file " + config_path);
      kv = parse_key_values(f);
    }
    for (const auto& tok : tokens) add_pair(kv, tok);
    for (const auto& [k, opt] : flag_opts)
      if (opt->count() > 0) kv[k] = flag_values[k];
    const RunConfig cfg = make_run_config(kv);
    const ExperimentReport rep = dispatch(cfg);
    const auto [csv, json] = write_report_files(rep, cfg.out, rep.name);
    print_summary(rep, out);
    out << "  wrote " << csv.string() << " and " << json.string() << '\n';
    return rep.valid ? kOk : kCheckFailure;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailure;
  }
}

}  // namespace taeblp::cli
