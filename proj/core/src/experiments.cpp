#include "taeblp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "taeblp/errors.hpp"
#include "taeblp/lattice.hpp"
#include "taeblp/measures.hpp"
#include "taeblp/oracle.hpp"

namespace taeblp {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TAEBLP_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 1024) return static_cast<int>(v);
    throw ConfigError(std::string("TAEBLP_WORKERS must be a positive integer, got '") + env + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::uint64_t n, int workers, const std::function<void(std::uint64_t)>& body) {
  const std::uint64_t w = std::min<std::uint64_t>(static_cast<std::uint64_t>(std::max(workers, 1)), n);
  if (w <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (std::uint64_t k = 0; k < w; ++k) {
    const std::uint64_t begin = n * k / w;
    const std::uint64_t end = n * (k + 1) / w;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::uint64_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

constexpr int kMaxWidenings = 3;

enum Lane : std::uint64_t {
  kPairLane = 0,
  kLabelLane = 1,
  kSingleLane = 2,
  kDirectLane = 3,
  kTailLane = 4,
};

std::string num(double x) { return format_double(x); }

void validate_common(double beta, double t, const EnsembleOptions& e) {
  static_cast<void>(RateParams(beta));
  if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("t must be finite and nonnegative");
  if (e.replicas < 2) throw ConfigError("replicas must be at least 2");
  if (e.margin < 0) throw ConfigError("margin must be nonnegative");
  if (e.omega_max < 1) throw ConfigError("omega_max must be positive");
}

void validate_window(const Window& w, int margin, const char* what) {
  if (!(w.ell < 0 && w.r > 0))
    throw ConfigError(std::string(what) + " window must contain 0 strictly inside");
  if (-w.ell <= margin || w.r <= margin)
    throw ConfigError(std::string(what) + " window is narrower than the contamination margin");
}

/// Observation sites of a single-process ensemble must sit `margin` inside.
void validate_sites(const Window& w, std::span<const int> sites, int margin) {
  for (int i : sites)
    if (i < w.ell + margin || i > w.r - margin)
      throw ConfigError("observation site " + std::to_string(i) + " is within the margin of [" +
                        std::to_string(w.ell) + ", " + std::to_string(w.r) + "]");
}

VolumeSpec volume(const Window& w, double theta_left, double theta_right, int omega_max) {
  VolumeSpec spec;
  spec.ell = w.ell;
  spec.r = w.r;
  spec.boundary = Boundary::theta;
  spec.theta_left = theta_left;
  spec.theta_right = theta_right;
  spec.omega_max = omega_max;
  spec.validate();
  return spec;
}

bool near_edge(int site, const Window& w, int margin) {
  return site < w.ell + margin || site > w.r - margin;
}

template <class Record>
struct EnsembleResult {
  std::vector<Record> records;
  Window window;
  std::uint64_t contaminated = 0;
  int widenings = 0;
};

/// Runs one record per replica; doubles the window while contamination is
/// above the widening threshold.
template <class Record, class Fn>
EnsembleResult<Record> run_ensemble(Window window, const EnsembleOptions& opt, Fn&& fn) {
  const int workers = resolve_workers(opt.workers);
  EnsembleResult<Record> out;
  for (int attempt = 0;; ++attempt) {
    out.records.assign(opt.replicas, Record{});
    parallel_for(opt.replicas, workers, [&](std::uint64_t i) { out.records[i] = fn(window, i); });
    out.contaminated = 0;
    for (const auto& r : out.records) out.contaminated += r.contaminated ? 1 : 0;
    out.window = window;
    out.widenings = attempt;
    const double frac = static_cast<double>(out.contaminated) / static_cast<double>(opt.replicas);
    if (frac > kWidenThreshold && opt.widen_on_contamination && attempt < kMaxWidenings) {
      window = {2 * window.ell, 2 * window.r};
      continue;
    }
    return out;
  }
}

void record_contamination(ExperimentReport& rep, std::uint64_t replicas, std::uint64_t contaminated,
                          const Window& w, int widenings, const std::string& which) {
  rep.replicas += replicas;
  rep.contaminated += contaminated;
  rep.echo(which + "_window", "[" + std::to_string(w.ell) + "," + std::to_string(w.r) + "]");
  rep.echo(which + "_widenings", std::to_string(widenings));
  const double frac = replicas ? static_cast<double>(contaminated) / static_cast<double>(replicas) : 0.0;
  if (frac > kInvalidThreshold) {
    rep.valid = false;
    rep.notes.push_back(which + " ensemble contamination " + num(frac) + " exceeds 1%");
  }
}

void echo_ensemble(ExperimentReport& rep, const EnsembleOptions& e) {
  rep.echo("replicas", std::to_string(e.replicas));
  rep.echo("seed", std::to_string(e.seed));
  rep.echo("margin", std::to_string(e.margin));
  rep.echo("omega_max", std::to_string(e.omega_max));
  rep.seed = e.seed;
}

// ---------------------------------------------------------------------------
// Single discrepancy pairs.

struct QRecord {
  int q = 0;
  bool contaminated = false;
  std::uint64_t events = 0;
};

/// Runs an ordered pair until t and follows label 0.
QRecord follow_defect(OrderedPair pair, const Window& w, double t, int margin, Rng& rng) {
  QRecord rec;
  while (const auto st = pair.step(t, rng)) {
    ++rec.events;
    if (!st->moved) continue;
    const auto pos = pair.labels().position(0);
    if (!pos) {
      rec.contaminated = true;
      return rec;
    }
    rec.q = *pos;
    if (near_edge(rec.q, w, margin)) rec.contaminated = true;
  }
  return rec;
}

/// Pair started from hat mu at the origin with one extra brick on top.
struct DefectPairFactory {
  RateParams params;
  double theta;
  StationaryMarginal mu;
  SizeBiasedMarginal hat;
  int omega_max;

  DefectPairFactory(double rho, RateParams p, int om)
      : params(p),
        theta(theta_of_rho(rho, p)),
        mu(theta, p),
        hat(mu),
        omega_max(om) {}

  QRecord run(const Window& w, double t, int margin, Rng& rng) const {
    const VolumeSpec spec = volume(w, theta, theta, omega_max);
    IncrementField lower = init_stationary(mu, spec, rng);
    lower.set_omega(0, hat.sample(rng));
    lower.reset_heights();
    IncrementField upper = lower;
    upper.set_omega(0, lower.omega(0) + 1);
    upper.reset_heights();
    return follow_defect(OrderedPair(spec, params, std::move(lower), std::move(upper)), w, t, margin,
                         rng);
  }
};

Histogram histogram_of(const std::vector<QRecord>& recs) {
  Histogram h;
  for (const auto& r : recs) h.add(r.q);
  return h;
}

Table histogram_table(const Histogram& h) {
  Table tab;
  tab.header = {"k", "count", "frequency"};
  for (const auto& [k, c] : h.bins())
    tab.rows.push_back({static_cast<double>(k), static_cast<double>(c), h.frequency(k)});
  return tab;
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentReport exp_characteristic_Q(const CharacteristicConfig& cfg) {
  const EnsembleOptions& opt = cfg.ensemble;
  validate_common(cfg.beta, cfg.t, opt);
  validate_window(cfg.pair_window, opt.margin, "pair");
  validate_window(cfg.single_window, opt.margin, "single");
  const RateParams params(cfg.beta);
  const DefectPairFactory factory(cfg.rho, params, opt.omega_max);
  const double var_omega = factory.mu.variance();
  const double speed = flux_and_speed(cfg.rho, params).speed;
  std::vector<int> sites = cfg.sites;
  if (sites.empty()) {
    sites.push_back(0);
    const int ic = static_cast<int>(std::floor(speed * cfg.t));
    if (ic != 0) sites.push_back(ic);
  }
  validate_sites(cfg.single_window, sites, opt.margin);

  ExperimentReport rep;
  rep.name = "characteristic_Q";
  rep.tag = "variance-defect identity and E Q(t) = V t";
  rep.echo("beta", cfg.beta);
  rep.echo("rho", cfg.rho);
  rep.echo("theta", factory.theta);
  rep.echo("t", cfg.t);
  echo_ensemble(rep, opt);

  const auto pairs = run_ensemble<QRecord>(cfg.pair_window, opt, [&](const Window& w, std::uint64_t i) {
    Rng rng = make_stream(opt.seed, i, kPairLane);
    return factory.run(w, cfg.t, opt.margin, rng);
  });
  record_contamination(rep, opt.replicas, pairs.contaminated, pairs.window, pairs.widenings, "pair");

  struct HRecord {
    std::vector<double> h;
    bool contaminated = false;
  };
  const auto singles = run_ensemble<HRecord>(cfg.single_window, opt, [&](const Window& w, std::uint64_t i) {
    Rng rng = make_stream(opt.seed, i, kSingleLane);
    const VolumeSpec spec = volume(w, factory.theta, factory.theta, opt.omega_max);
    SingleProcess proc(spec, params, init_stationary(factory.mu, spec, rng));
    proc.run_until(cfg.t, rng);
    HRecord rec;
    for (int s : sites) rec.h.push_back(static_cast<double>(proc.field().height(s)));
    return rec;
  });
  record_contamination(rep, opt.replicas, singles.contaminated, singles.window, singles.widenings,
                       "single");

  std::vector<double> qs;
  std::uint64_t events = 0;
  for (const auto& r : pairs.records) {
    qs.push_back(r.q);
    events += r.events;
  }
  const Estimate mean_q = mean_of(qs);
  rep.estimate("mean_Q", mean_q);
  rep.estimate("V_t", {speed * cfg.t, 0.0});
  rep.estimate("mean_Q_minus_V_t", {mean_q.value - speed * cfg.t, mean_q.se});
  rep.check("var_omega", var_omega);
  rep.check("speed", speed);
  rep.check("pair_events", static_cast<double>(events));
  for (std::size_t k = 0; k < sites.size(); ++k) {
    const int i = sites[k];
    std::vector<double> hs;
    for (const auto& r : singles.records) hs.push_back(r.h[k]);
    std::vector<double> dev;
    for (double q : qs) dev.push_back(std::abs(q - i));
    const Estimate var_h = variance_of(hs);
    const Estimate abs_dev = mean_of(dev);
    const Estimate rhs{var_omega * abs_dev.value, var_omega * abs_dev.se};
    const std::string tag = "@i=" + std::to_string(i);
    rep.estimate("var_h" + tag, var_h);
    rep.estimate("var_omega_E_abs_Q_minus_i" + tag, rhs);
    rep.estimate("identity_gap" + tag, difference(var_h, rhs));
  }
  rep.table = histogram_table(histogram_of(pairs.records));
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport exp_shock_random_walk(const ShockConfig& cfg) {
  const EnsembleOptions& opt = cfg.ensemble;
  validate_common(cfg.beta, cfg.t, opt);
  validate_window(cfg.window, opt.margin, "shock");
  const RateParams params(cfg.beta);
  const ShockMeasure shock(cfg.rho, params);
  const double theta = shock.right().theta();
  const WalkRates rates = rw_rates(cfg.rho, params);

  ExperimentReport rep;
  rep.name = "shock_random_walk";
  rep.tag = "second class particle from the shock measure";
  rep.echo("beta", cfg.beta);
  rep.echo("rho", cfg.rho);
  rep.echo("t", cfg.t);
  echo_ensemble(rep, opt);

  const auto res = run_ensemble<QRecord>(cfg.window, opt, [&](const Window& w, std::uint64_t i) {
    Rng rng = make_stream(opt.seed, i, kPairLane);
    const VolumeSpec spec = volume(w, theta + cfg.beta, theta, opt.omega_max);
    auto [lo, up] = shock.sample(SiteRange{w.ell - 1, w.r + 1}, rng);
    IncrementField lower(w.ell, w.r);
    IncrementField upper(w.ell, w.r);
    for (int s = w.ell - 1; s <= w.r + 1; ++s) {
      lower.set_omega(s, lo[static_cast<std::size_t>(s - w.ell + 1)]);
      upper.set_omega(s, up[static_cast<std::size_t>(s - w.ell + 1)]);
    }
    lower.reset_heights();
    upper.reset_heights();
    return follow_defect(OrderedPair(spec, params, std::move(lower), std::move(upper)), w, cfg.t,
                         opt.margin, rng);
  });
  record_contamination(rep, opt.replicas, res.contaminated, res.window, res.widenings, "pair");

  std::vector<double> qs;
  for (const auto& r : res.records) qs.push_back(r.q);
  const Histogram h = histogram_of(res.records);
  const auto law = [&](long k) { return rw_law(rates.right, rates.left, cfg.t, k); };
  const double mean = (rates.right - rates.left) * cfg.t;
  const double var = (rates.right + rates.left) * cfg.t;
  const long spread = static_cast<long>(std::ceil(12.0 * std::sqrt(var) + 10.0));
  const long lo = static_cast<long>(std::floor(mean)) - spread;
  const long hi = static_cast<long>(std::ceil(mean)) + spread;

  rep.estimate("mean_Q", mean_of(qs));
  rep.estimate("var_Q", variance_of(qs));
  rep.check("walk_right_rate", rates.right);
  rep.check("walk_left_rate", rates.left);
  rep.check("walk_mean", mean);
  rep.check("walk_variance", var);
  rep.check("tv_distance", total_variation(h, law, lo, hi));
  const ChiSquare chi = chi_square(h, law, lo, hi);
  rep.check("chi_square", chi.statistic);
  rep.check("chi_square_dof", chi.dof);

  rep.table.header = {"k", "count", "frequency", "walk_law"};
  for (long k = std::min(lo, h.bins().empty() ? lo : h.bins().begin()->first);
       k <= std::max(hi, h.bins().empty() ? hi : h.bins().rbegin()->first); ++k) {
    const double p = law(k);
    const auto it = h.bins().find(k);
    const double c = it == h.bins().end() ? 0.0 : static_cast<double>(it->second);
    if (c == 0.0 && p < 1e-12) continue;
    rep.table.rows.push_back({static_cast<double>(k), c, h.frequency(k), p});
  }
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport exp_convexity_labels(const ConvexityConfig& cfg) {
  const EnsembleOptions& opt = cfg.ensemble;
  validate_common(cfg.beta, cfg.t, opt);
  validate_window(cfg.window, opt.margin, "label");
  if (cfg.lam > cfg.rho) throw ConfigError("convexity: need lam <= rho");
  if (cfg.m_max < 1) throw ConfigError("convexity: m_max must be positive");
  const RateParams params(cfg.beta);
  const OrderedPairSampler plain(cfg.lam, cfg.rho, params, false);
  const OrderedPairSampler strict(cfg.lam, cfg.rho, params, true);
  const double theta_lam = plain.lower().theta();
  const double theta_rho = plain.upper().theta();
  const RefreshTable table(cfg.beta);

  ExperimentReport rep;
  rep.name = "convexity_labels";
  rep.tag = "tagged labels keep y >= z";
  rep.echo("beta", cfg.beta);
  rep.echo("lam", cfg.lam);
  rep.echo("rho", cfg.rho);
  rep.echo("t", cfg.t);
  rep.echo("trigger", cfg.trigger == RefreshTrigger::any_change ? "any_change" : "discrepancy_change");
  rep.echo("refresh_at_start", cfg.refresh_at_start ? "true" : "false");
  echo_ensemble(rep, opt);

  struct LabelRecord {
    std::int64_t y = 0;
    std::int64_t z = 0;
    int q = 0;
    bool contaminated = false;
    bool sandwich = true;
    std::uint64_t events = 0;
    std::uint64_t violations = 0;
    std::uint64_t refreshes = 0;
  };
  const auto res = run_ensemble<LabelRecord>(cfg.window, opt, [&](const Window& w, std::uint64_t i) {
    Rng bg = make_stream(opt.seed, i, kPairLane);
    Rng lab = make_stream(opt.seed, i, kLabelLane);
    const VolumeSpec spec = volume(w, theta_rho, theta_rho, opt.omega_max);
    IncrementField lower(w.ell, w.r);
    IncrementField upper(w.ell, w.r);
    for (int s = w.ell - 1; s <= w.r + 1; ++s) {
      const auto [e, o] = s == 0 ? strict(bg) : plain(bg);
      lower.set_omega(s, e);
      upper.set_omega(s, o);
    }
    lower.reset_heights();
    upper.reset_heights();
    LabelProcess proc(OrderedPair(spec, params, std::move(lower), std::move(upper),
                                  {theta_lam, theta_rho}, {theta_lam, theta_rho}),
                      table, cfg.trigger);
    if (cfg.refresh_at_start) proc.refresh_at_start(lab);
    LabelRecord rec;
    while (proc.step(cfg.t, bg, lab)) {
      ++rec.events;
      if (proc.exited()) {
        rec.contaminated = true;
        break;
      }
      if (near_edge(*proc.q_site(), w, opt.margin) || near_edge(*proc.q_eta_site(), w, opt.margin))
        rec.contaminated = true;
    }
    rec.y = proc.pair().y;
    rec.z = proc.pair().z;
    rec.violations = proc.violations();
    rec.refreshes = proc.refreshes();
    if (!proc.exited()) {
      rec.q = *proc.q_site();
      rec.sandwich = sandwich_holds(proc, derived_views(proc));
    }
    return rec;
  });
  record_contamination(rep, opt.replicas, res.contaminated, res.window, res.widenings, "label");

  std::uint64_t events = 0;
  std::uint64_t violations = 0;
  std::uint64_t refreshes = 0;
  std::uint64_t sandwich_failures = 0;
  Histogram q_labels;
  for (const auto& r : res.records) {
    events += r.events;
    violations += r.violations + (r.y < r.z ? 1 : 0);
    refreshes += r.refreshes;
    sandwich_failures += r.sandwich ? 0 : 1;
    q_labels.add(r.q);
  }
  rep.check("background_events", static_cast<double>(events));
  rep.check("violations", static_cast<double>(violations));
  rep.check("refreshes", static_cast<double>(refreshes));
  rep.check("sandwich_failures", static_cast<double>(sandwich_failures));
  if (violations > 0) {
    rep.valid = false;
    rep.notes.push_back("y < z observed");
  }

  const GeometricLabelLaw nu(cfg.beta);
  const auto n = opt.replicas;
  double worst = -INFINITY;
  rep.table.header = {"m", "P_z_ge_m", "se_z", "P_minus_y_ge_m", "se_y", "geometric_tail"};
  for (int m = 1; m <= cfg.m_max; ++m) {
    std::uint64_t hz = 0;
    std::uint64_t hy = 0;
    for (const auto& r : res.records) {
      hz += r.z >= m ? 1 : 0;
      hy += -r.y >= m ? 1 : 0;
    }
    const Estimate pz = proportion(hz, n);
    const Estimate py = proportion(hy, n);
    const double bound = nu.tail(m);
    rep.estimate("P(z>=" + std::to_string(m) + ")", pz);
    rep.estimate("P(-y>=" + std::to_string(m) + ")", py);
    // With no hits the binomial error is zero; use the rule-of-three bound.
    const double se_floor = 1.0 / static_cast<double>(n);
    worst = std::max({worst, pz.value - bound - 3.0 * std::max(pz.se, se_floor),
                      py.value - bound - 3.0 * std::max(py.se, se_floor)});
    rep.table.rows.push_back({double(m), pz.value, pz.se, py.value, py.se, bound});
  }
  rep.check("max_tail_excess", worst);

  if (cfg.compare_direct) {
    const DefectPairFactory factory(cfg.rho, params, opt.omega_max);
    const auto direct = run_ensemble<QRecord>(cfg.window, opt, [&](const Window& w, std::uint64_t i) {
      Rng rng = make_stream(opt.seed, i, kDirectLane);
      return factory.run(w, cfg.t, opt.margin, rng);
    });
    record_contamination(rep, opt.replicas, direct.contaminated, direct.window, direct.widenings,
                         "direct");
    const Histogram hd = histogram_of(direct.records);
    rep.check("q_law_tv", total_variation(q_labels, hd));
    std::vector<double> a;
    std::vector<double> b;
    for (const auto& r : res.records) a.push_back(r.q);
    for (const auto& r : direct.records) b.push_back(r.q);
    rep.estimate("mean_Q_labels", mean_of(a));
    rep.estimate("mean_Q_direct", mean_of(b));
  }
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

/// Sum over m > K of m A e^{-kappa m}, from a log-linear fit of |c_m| over the
/// last four lags of the leading run m >= 1 with |c_m| > 3 se. Returns +inf
/// when the fit shows no decay.
double fitted_tail(const std::vector<std::pair<int, Estimate>>& side, int truncation, int& points) {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> se;
  for (const auto& [m, c] : side) {
    if (m < 1) continue;
    if (!(std::abs(c.value) > 3.0 * c.se)) break;
    x.push_back(m);
    y.push_back(std::log(std::abs(c.value)));
    se.push_back(c.se / std::abs(c.value));
  }
  // The decay is faster than exponential, so only the outermost points set the rate.
  const std::size_t keep = std::min<std::size_t>(x.size(), 4);
  x.erase(x.begin(), x.end() - static_cast<std::ptrdiff_t>(keep));
  y.erase(y.begin(), y.end() - static_cast<std::ptrdiff_t>(keep));
  se.erase(se.begin(), se.end() - static_cast<std::ptrdiff_t>(keep));
  points = static_cast<int>(x.size());
  if (x.size() < 2) return 0.0;
  const LineFit fit = weighted_line_fit(x, y, se);
  if (!(fit.slope < 0.0)) return INFINITY;
  double tail = 0.0;
  for (int m = truncation + 1; m <= truncation + 10000; ++m) {
    const double term = m * std::exp(fit.intercept + fit.slope * m);
    tail += term;
    if (term < 1e-18 * tail) break;
  }
  return tail;
}

}  // namespace

ExperimentReport exp_covariance_identity(const CovarianceConfig& cfg) {
  const EnsembleOptions& opt = cfg.ensemble;
  validate_common(cfg.beta, cfg.t, opt);
  validate_window(cfg.window, opt.margin, "covariance");
  if (cfg.truncation < 1) throw ConfigError("covariance: truncation must be positive");
  const int K = cfg.truncation;
  // Translation invariance: Cov(omega_{j+n}(t), omega_j(0)) does not depend on
  // j, so every reference site j whose span j-K..j+K stays inside the margin
  // contributes to the same estimate.
  const int j_lo = cfg.window.ell + opt.margin + K;
  const int j_hi = cfg.window.r - opt.margin - K;
  if (j_lo > j_hi) throw ConfigError("covariance: window too narrow for the truncation and margin");
  const std::vector<int> sites{cfg.z};
  validate_sites(cfg.window, sites, opt.margin);
  const RateParams params(cfg.beta);
  const StationaryMarginal mu(cfg.theta, params);
  const double rho = mu.density();

  ExperimentReport rep;
  rep.name = "covariance_identity";
  rep.tag = "height variance as a weighted covariance sum";
  rep.echo("beta", cfg.beta);
  rep.echo("theta", cfg.theta);
  rep.echo("t", cfg.t);
  rep.echo("z", std::to_string(cfg.z));
  rep.echo("truncation", std::to_string(K));
  rep.echo("reference_sites", "[" + std::to_string(j_lo) + "," + std::to_string(j_hi) + "]");
  echo_ensemble(rep, opt);

  struct CRecord {
    double h = 0.0;
    std::vector<double> c;  // lags -K..K, averaged over reference sites
    bool contaminated = false;
  };
  const auto res = run_ensemble<CRecord>(cfg.window, opt, [&](const Window& w, std::uint64_t i) {
    Rng rng = make_stream(opt.seed, i, kSingleLane);
    const VolumeSpec spec = volume(w, cfg.theta, cfg.theta, opt.omega_max);
    SingleProcess proc(spec, params, init_stationary(mu, spec, rng));
    std::vector<double> start;
    for (int j = j_lo; j <= j_hi; ++j) start.push_back(proc.field().omega(j) - rho);
    proc.run_until(cfg.t, rng);
    CRecord rec;
    rec.h = static_cast<double>(proc.field().height(cfg.z));
    rec.c.assign(static_cast<std::size_t>(2 * K + 1), 0.0);
    const double norm = 1.0 / static_cast<double>(j_hi - j_lo + 1);
    for (int n = -K; n <= K; ++n) {
      double acc = 0.0;
      for (int j = j_lo; j <= j_hi; ++j)
        acc += (proc.field().omega(j + n) - rho) * start[static_cast<std::size_t>(j - j_lo)];
      rec.c[static_cast<std::size_t>(n + K)] = acc * norm;
    }
    return rec;
  });
  record_contamination(rep, opt.replicas, res.contaminated, res.window, res.widenings, "single");

  std::vector<double> hs;
  std::vector<double> weighted;
  for (const auto& r : res.records) {
    hs.push_back(r.h);
    double s = 0.0;
    for (int n = -K; n <= K; ++n) s += std::abs(n - cfg.z) * r.c[static_cast<std::size_t>(n + K)];
    weighted.push_back(s);
  }
  const Estimate lhs = variance_of(hs);
  const Estimate rhs = mean_of(weighted);

  std::vector<std::pair<int, Estimate>> right;
  std::vector<std::pair<int, Estimate>> left;
  rep.table.header = {"n", "cov", "se"};
  std::vector<double> col;
  for (int n = -K; n <= K; ++n) {
    col.clear();
    for (const auto& r : res.records) col.push_back(r.c[static_cast<std::size_t>(n + K)]);
    const Estimate c = mean_of(col);
    rep.table.rows.push_back({double(n), c.value, c.se});
    if (n > 0) right.emplace_back(n, c);
    if (n < 0) left.emplace_back(-n, c);
  }
  std::reverse(left.begin(), left.end());
  int pr = 0;
  int pl = 0;
  const double tail = fitted_tail(right, K, pr) + fitted_tail(left, K, pl);

  rep.estimate("var_h", lhs);
  rep.estimate("weighted_covariance_sum", rhs);
  rep.estimate("identity_gap", difference(lhs, rhs));
  rep.check("var_omega", mu.variance());
  rep.check("truncation_tail", tail);
  rep.check("truncation_tail_fraction", rhs.value != 0.0 ? tail / std::abs(rhs.value) : INFINITY);
  rep.check("fit_points_right", pr);
  rep.check("fit_points_left", pl);
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport exp_scaling_scan(const ScalingConfig& cfg) {
  const EnsembleOptions& opt = cfg.ensemble;
  if (cfg.t_grid.size() < 2) throw ConfigError("scaling: t_grid needs at least two points");
  for (std::size_t k = 0; k < cfg.t_grid.size(); ++k) {
    validate_common(cfg.beta, cfg.t_grid[k], opt);
    if (!(cfg.t_grid[k] > 0.0) || (k > 0 && !(cfg.t_grid[k] > cfg.t_grid[k - 1])))
      throw ConfigError("scaling: t_grid must be positive and increasing");
  }
  validate_window(cfg.window, opt.margin, "scaling");
  const RateParams params(cfg.beta);
  const double theta = theta_of_rho(cfg.rho, params);
  const StationaryMarginal mu(theta, params);
  const double speed = flux_and_speed(cfg.rho, params).speed;
  const double var_omega = mu.variance();

  // Snapshot times and observation sites.
  std::vector<double> times = cfg.t_grid;
  if (!cfg.off_offsets.empty()) times.push_back(cfg.off_time);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  struct Probe {
    std::size_t time;
    int site;
  };
  const auto time_index = [&](double t) {
    return static_cast<std::size_t>(std::find(times.begin(), times.end(), t) - times.begin());
  };
  std::vector<Probe> probes;
  std::vector<int> sites;
  for (double t : cfg.t_grid) {
    probes.push_back({time_index(t), static_cast<int>(std::floor(speed * t))});
    sites.push_back(probes.back().site);
  }
  for (double off : cfg.off_offsets) {
    probes.push_back({time_index(cfg.off_time), static_cast<int>(std::floor((speed + off) * cfg.off_time))});
    sites.push_back(probes.back().site);
  }
  validate_sites(cfg.window, sites, opt.margin);

  ExperimentReport rep;
  rep.name = "scaling_scan";
  rep.tag = "current variance along and off the characteristic";
  rep.echo("beta", cfg.beta);
  rep.echo("rho", cfg.rho);
  std::string grid;
  for (double t : cfg.t_grid) grid += (grid.empty() ? "" : ",") + num(t);
  rep.echo("t_grid", grid);
  rep.echo("off_time", cfg.off_time);
  echo_ensemble(rep, opt);

  struct SRecord {
    std::vector<double> h;
    bool contaminated = false;
  };
  const auto res = run_ensemble<SRecord>(cfg.window, opt, [&](const Window& w, std::uint64_t i) {
    Rng rng = make_stream(opt.seed, i, kSingleLane);
    const VolumeSpec spec = volume(w, theta, theta, opt.omega_max);
    SingleProcess proc(spec, params, init_stationary(mu, spec, rng));
    SRecord rec;
    rec.h.resize(probes.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
      proc.run_until(times[k], rng);
      for (std::size_t p = 0; p < probes.size(); ++p)
        if (probes[p].time == k) rec.h[p] = static_cast<double>(proc.field().height(probes[p].site));
    }
    return rec;
  });
  record_contamination(rep, opt.replicas, res.contaminated, res.window, res.widenings, "single");

  const auto probe_variance = [&](std::size_t p) {
    std::vector<double> hs;
    for (const auto& r : res.records) hs.push_back(r.h[p]);
    return variance_of(hs);
  };
  std::vector<double> lx;
  std::vector<double> ly;
  std::vector<double> lse;
  rep.table.header = {"t", "site", "var_h", "se"};
  for (std::size_t p = 0; p < cfg.t_grid.size(); ++p) {
    const Estimate v = probe_variance(p);
    rep.estimate("var_h_char@t=" + num(cfg.t_grid[p]), v);
    rep.table.rows.push_back({cfg.t_grid[p], double(probes[p].site), v.value, v.se});
    lx.push_back(std::log(cfg.t_grid[p]));
    ly.push_back(std::log(v.value));
    lse.push_back(v.se / v.value);
  }
  const LineFit fit = weighted_line_fit(lx, ly, lse);
  rep.estimate("loglog_slope", {fit.slope, fit.slope_se});
  double worst_rel = 0.0;
  for (std::size_t k = 0; k < cfg.off_offsets.size(); ++k) {
    const std::size_t p = cfg.t_grid.size() + k;
    const Estimate v = probe_variance(p);
    const double off = cfg.off_offsets[k];
    const double d = var_omega * std::abs(off);
    const Estimate per_t{v.value / cfg.off_time, v.se / cfg.off_time};
    const std::string tag = "@V=V_rho" + std::string(off >= 0 ? "+" : "") + num(off);
    rep.estimate("var_h_over_t" + tag, per_t);
    rep.check("D" + tag, d);
    const double rel = std::abs(per_t.value - d) / d;
    rep.check("relative_error" + tag, rel);
    worst_rel = std::max(worst_rel, rel);
    rep.table.rows.push_back({cfg.off_time, double(probes[p].site), v.value, v.se});
  }
  rep.check("speed", speed);
  rep.check("var_omega", var_omega);
  if (!cfg.off_offsets.empty()) rep.check("max_off_characteristic_relative_error", worst_rel);

  if (cfg.tail_replicas > 0) {
    EnsembleOptions tail_opt = opt;
    tail_opt.replicas = cfg.tail_replicas;
    validate_common(cfg.beta, cfg.tail_t, tail_opt);
    validate_window(cfg.tail_window, opt.margin, "tail");
    const DefectPairFactory factory(cfg.tail_rho, params, opt.omega_max);
    const auto tail = run_ensemble<QRecord>(cfg.tail_window, tail_opt, [&](const Window& w, std::uint64_t i) {
      Rng rng = make_stream(opt.seed, i, kTailLane);
      return factory.run(w, cfg.tail_t, opt.margin, rng);
    });
    record_contamination(rep, tail_opt.replicas, tail.contaminated, tail.window, tail.widenings, "tail");
    rep.echo("tail_rho", cfg.tail_rho);
    rep.echo("tail_t", cfg.tail_t);
    rep.echo("tail_replicas", std::to_string(cfg.tail_replicas));
    for (double ratio : cfg.tail_ratios) {
      const double K = ratio * cfg.tail_t;
      std::uint64_t hits = 0;
      for (const auto& r : tail.records) hits += std::abs(r.q) > K ? 1 : 0;
      rep.estimate("P(|Q|>" + num(ratio) + "t)", proportion(hits, tail_opt.replicas));
    }
  }
  return rep;
}

}  // namespace taeblp
