#include "taeblp/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "taeblp/coupling.hpp"
#include "taeblp/errors.hpp"

namespace taeblp {

namespace {

struct Neumaier {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) noexcept {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const noexcept { return sum + carry; }
};

void record(CheckReport& rep, double err, double tol, const std::string& where) {
  if (!(err <= tol)) {
    if (rep.pass) rep.detail = where;
    rep.pass = false;
  }
  if (!(err <= rep.max_error)) rep.max_error = std::isfinite(err) ? std::max(rep.max_error, err) : err;
}

std::string point(double beta, long d, const std::string& what) {
  std::ostringstream os;
  os << "beta=" << beta << " d=" << d << " " << what;
  return os.str();
}

// Refresh laws written from the f-difference form of p and q, independent of
// RefreshTable. Values are relative to a = 0, b = d - 1.
struct IndependentLaws {
  double p;
  double q;
};

IndependentLaws independent_laws(double beta, long d) {
  if (d == 1) return {1.0, 1.0};
  const RateParams params(beta);
  // eta = 0, omega = d, shifted to keep the arguments inside the rate guard.
  const long eta = -d / 2;
  const long omega = eta + d;
  const double denom = rate_f(omega, params) - rate_f(eta, params);
  return {(rate_f(omega, params) - rate_f(omega - 1, params)) / denom,
          (rate_f(eta + 1, params) - rate_f(eta, params)) / denom};
}

}  // namespace

// ---------------------------------------------------------------------------

CheckReport check_refresh_tables(double beta, int d_max, const RefreshTable& table) {
  if (d_max < 2) throw ConfigError("check_refresh_tables: d_max must be at least 2");
  CheckReport rep;
  rep.id = "refresh.tables";
  for (long d = 1; d <= d_max; ++d) {
    const auto law = independent_laws(beta, d);
    const auto joint = table.joint(d);
    // Closed forms agree with the f-difference form.
    record(rep, std::abs(table.p(d) - law.p), kAlgebraTol, point(beta, d, "p closed form"));
    record(rep, std::abs(table.q(d) - law.q), kAlgebraTol, point(beta, d, "q closed form"));

    const long a = 0;
    const long b = d - 1;
    const std::array<std::pair<long, long>, 6> lines{
        {{a, a}, {b - 1, a}, {b, a}, {b - 1, a + 1}, {b, a + 1}, {b, b}}};
    Neumaier total;
    std::map<long, double> y_margin;
    std::map<long, double> z_margin;
    for (std::size_t k = 0; k < 6; ++k) {
      const double m = joint[k];
      record(rep, std::max(0.0, -m), kAlgebraTol,
             point(beta, d, "negative mass on line " + std::to_string(k + 1)));
      total.add(m);
      if (d == 1) continue;
      y_margin[lines[k].first] += m;
      z_margin[lines[k].second] += m;
      if (m > kAlgebraTol && lines[k].first < lines[k].second)
        record(rep, 1.0, 0.0, point(beta, d, "line " + std::to_string(k + 1) + " has y < z"));
    }
    record(rep, std::abs(total.value() - 1.0), kAlgebraTol, point(beta, d, "mass sum"));
    if (d == 1) {
      record(rep, std::abs(joint[0] - 1.0), kAlgebraTol, point(beta, d, "degenerate table"));
      record(rep, std::abs(law.p - 1.0) + std::abs(law.q - 1.0), kAlgebraTol,
             point(beta, d, "p(1) = q(1) = 1"));
      continue;
    }
    std::map<long, double> y_law;
    y_law[a] += law.q;
    y_law[b - 1] += 1.0 - law.p - law.q;
    y_law[b] += law.p;
    std::map<long, double> z_law;
    z_law[a] += law.p;
    z_law[a + 1] += 1.0 - law.p - law.q;
    z_law[b] += law.q;
    for (const auto& [v, m] : y_law)
      record(rep, std::abs(y_margin[v] - m), kAlgebraTol,
             point(beta, d, "y-marginal at offset " + std::to_string(v)));
    for (const auto& [v, m] : z_law)
      record(rep, std::abs(z_margin[v] - m), kAlgebraTol,
             point(beta, d, "z-marginal at offset " + std::to_string(v)));
    if (d == 2) {
      record(rep, std::abs(law.p + law.q - 1.0), kAlgebraTol, point(beta, d, "p(2) + q(2) = 1"));
      record(rep, std::abs(joint[1]) + std::abs(joint[3]) + std::abs(joint[4]), kAlgebraTol,
             point(beta, d, "lines 2, 4, 5 vanish"));
    } else {
      record(rep, std::max(0.0, law.q - law.p), kAlgebraTol, point(beta, d, "p >= q"));
      record(rep, std::max(0.0, law.p + law.q - 1.0), kAlgebraTol, point(beta, d, "p + q <= 1"));
    }
  }
  return rep;
}

CheckReport check_refresh_tables(double beta, int d_max) {
  return check_refresh_tables(beta, d_max, RefreshTable(beta));
}

// ---------------------------------------------------------------------------

DominationResult check_label_domination(double beta, int a, int b, const RefreshTable& table) {
  if (a > b) throw ConfigError("check_label_domination: need a <= b");
  const GeometricLabelLaw nu(beta);
  DominationResult res;
  res.report.id = "refresh.label_domination";
  // Beyond `last` the geometric tail is below 1e-20 and nu* = nu there.
  const int first = std::min(a, 0);
  const int last = std::max(b, 0) + static_cast<int>(std::ceil(46.0 / beta)) + 1;
  res.first = first;
  const std::size_t n = static_cast<std::size_t>(last - first + 1);
  res.nu.resize(n);
  res.nu_star.resize(n);
  double inside = 0.0;
  for (int m = first; m <= last; ++m) {
    const double w = nu.pmf(m);
    res.nu[static_cast<std::size_t>(m - first)] = w;
    if (m >= a && m <= b)
      inside += w;
    else
      res.nu_star[static_cast<std::size_t>(m - first)] = w;
  }
  const long d = static_cast<long>(b) - a + 1;
  const auto law = table.z_law(d);
  const auto at = [&](int m) -> double& { return res.nu_star[static_cast<std::size_t>(m - first)]; };
  at(a) += law[0] * inside;
  if (d >= 2) {
    at(a + 1) += law[1] * inside;
    at(b) += law[2] * inside;
  }
  std::ostringstream where;
  where << "beta=" << beta << " a=" << a << " b=" << b;
  double cdf = 0.0;
  double cdf_star = 0.0;
  for (int m = first; m <= last; ++m) {
    cdf += res.nu[static_cast<std::size_t>(m - first)];
    cdf_star += res.nu_star[static_cast<std::size_t>(m - first)];
    record(res.report, std::max(0.0, cdf - cdf_star), kAlgebraTol,
           where.str() + " CDF at m=" + std::to_string(m));
  }
  if (a >= 0)
    record(res.report, std::abs(at(a) - nu.pmf(a)), kAlgebraTol, where.str() + " nu*(a) = nu(a)");
  record(res.report, std::max(0.0, at(b) - nu.pmf(b)), kAlgebraTol, where.str() + " nu*(b) <= nu(b)");
  return res;
}

DominationResult check_label_domination(double beta, int a, int b) {
  return check_label_domination(beta, a, b, RefreshTable(beta));
}

// ---------------------------------------------------------------------------

CheckReport check_measure_identities(double beta, double tol) {
  const RateParams params(beta);
  CheckReport rep;
  rep.id = "measure.shift_identities";
  for (int k = -12; k <= 12; ++k) {
    const double theta = 0.29 * k;
    const StationaryMarginal m0(theta, params);
    const StationaryMarginal m1(theta + beta, params);
    std::ostringstream where;
    where << "beta=" << beta << " theta=" << theta;
    const double z_ratio = std::exp(m1.log_partition() - m0.log_partition() - theta - 0.5 * beta);
    record(rep, std::abs(z_ratio - 1.0), tol, where.str() + " partition shift");
    record(rep, std::abs(m1.density() - m0.density() - 1.0) / std::max(1.0, std::abs(m1.density())),
           tol, where.str() + " density shift");
    for (int z = -30; z <= 30; ++z)
      record(rep, std::abs(std::expm1(m1.log_pmf(z) - m0.log_pmf(z - 1))), tol,
             where.str() + " pmf shift at z=" + std::to_string(z));
    Neumaier mass;
    for (double w : m0.table()) mass.add(w);
    record(rep, std::abs(mass.value() - 1.0), 10.0 * m0.tail_tol(), where.str() + " normalization");
  }
  for (int k = -8; k <= 8; ++k) {
    const double rho = 0.25 * k;
    const double h = 0.25;
    const double second = flux_and_speed(rho - h, params).flux + flux_and_speed(rho + h, params).flux -
                          2.0 * flux_and_speed(rho, params).flux;
    std::ostringstream where;
    where << "beta=" << beta << " rho=" << rho << " flux second difference " << second;
    record(rep, second > 0.0 ? 0.0 : 1.0, 0.0, where.str());
  }
  return rep;
}

// ---------------------------------------------------------------------------

std::vector<SiteFunction> site_function_suite(int sites) {
  if (sites < 2) throw ConfigError("site_function_suite: need at least two sites");
  const std::size_t last = static_cast<std::size_t>(sites - 1);
  const std::size_t mid = static_cast<std::size_t>(sites / 2);
  std::vector<SiteFunction> suite;
  suite.push_back({"one", [](std::span<const int>) { return 1.0; }});
  suite.push_back({"omega_first", [](std::span<const int> w) { return double(w[0]); }});
  suite.push_back({"omega_mid", [mid](std::span<const int> w) { return double(w[mid]); }});
  suite.push_back({"omega_last", [last](std::span<const int> w) { return double(w[last]); }});
  suite.push_back({"sum", [](std::span<const int> w) {
                     double s = 0.0;
                     for (int v : w) s += v;
                     return s;
                   }});
  suite.push_back({"pair_product", [](std::span<const int> w) { return double(w[0]) * w[1]; }});
  suite.push_back({"indicator_mid_zero", [mid](std::span<const int> w) { return w[mid] == 0 ? 1.0 : 0.0; }});
  suite.push_back({"indicator_step", [last](std::span<const int> w) {
                     return (w[0] >= 1 && w[last] <= 0) ? 1.0 : 0.0;
                   }});
  suite.push_back({"capped_square_mid", [mid](std::span<const int> w) {
                     return std::min(double(w[mid]) * w[mid], 25.0);
                   }});
  suite.push_back({"capped_exponentials", [last](std::span<const int> w) {
                     return std::min(std::exp(0.5 * w[0]), 10.0) + std::min(std::exp(-0.5 * w[last]), 10.0);
                   }});
  return suite;
}

namespace {

// Support of one marginal: values within `band` of the mode with pmf >= 1e-40.
std::vector<std::pair<int, double>> support(const StationaryMarginal& m, int band) {
  const long mode = std::lround(m.theta() / m.beta());
  std::vector<std::pair<int, double>> out;
  for (long z = mode - band; z <= mode + band; ++z) {
    const double w = m.pmf(z);
    if (w >= 1e-40) out.emplace_back(static_cast<int>(z), w);
  }
  return out;
}

// Odometer over a product of supports.
template <class F>
void for_each_config(const std::vector<std::vector<std::pair<int, double>>>& supports, F&& f) {
  const std::size_t n = supports.size();
  std::vector<std::size_t> idx(n, 0);
  std::vector<int> values(n);
  for (;;) {
    double w = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      values[k] = supports[k][idx[k]].first;
      w *= supports[k][idx[k]].second;
    }
    f(std::span<const int>(values), w);
    std::size_t k = 0;
    while (k < n && ++idx[k] == supports[k].size()) idx[k++] = 0;
    if (k == n) break;
  }
}

}  // namespace

ResidualReport stationarity_residual(double theta, double beta, int sites, Boundary boundary,
                                     int band, std::span<const SiteFunction> suite) {
  if (sites < 2 || sites > 5) throw ConfigError("stationarity_residual: use 2..5 sites");
  const RateParams params(beta);
  const StationaryMarginal m(theta, params);
  const auto sup = support(m, band);
  double kept = 0.0;
  for (const auto& [z, w] : sup) kept += w;
  ResidualReport rep;
  rep.neglected_mass = 1.0 - std::pow(kept, sites);

  const std::size_t n = static_cast<std::size_t>(sites);
  std::vector<std::vector<std::pair<int, double>>> supports(n, sup);
  std::vector<Neumaier> acc(suite.size());
  std::vector<int> moved(n);
  const double left_in = std::exp(theta);
  const double right_out = std::exp(-theta);

  for_each_config(supports, [&](std::span<const int> w, double weight) {
    const auto add_move = [&](double rate, int from, int to) {
      std::copy(w.begin(), w.end(), moved.begin());
      if (from >= 0) moved[static_cast<std::size_t>(from)] -= 1;
      if (to >= 0) moved[static_cast<std::size_t>(to)] += 1;
      for (std::size_t k = 0; k < suite.size(); ++k)
        acc[k].add(weight * rate * (suite[k].phi(moved) - suite[k].phi(w)));
    };
    for (int i = 0; i + 1 < sites; ++i)
      add_move(rate_f(w[static_cast<std::size_t>(i)], params) +
                   rate_f(-w[static_cast<std::size_t>(i + 1)], params),
               i, i + 1);
    if (boundary == Boundary::theta) {
      add_move(left_in + rate_f(-w[0], params), -1, 0);
      add_move(right_out + rate_f(w[n - 1], params), sites - 1, -1);
    }
  });
  for (std::size_t k = 0; k < suite.size(); ++k) {
    const double r = std::abs(acc[k].value());
    rep.residuals.emplace_back(suite[k].name, r);
    rep.max_residual = std::max(rep.max_residual, r);
  }
  return rep;
}

// ---------------------------------------------------------------------------

std::vector<PairFunction> pair_function_suite() {
  using S = std::span<const int>;
  std::vector<PairFunction> suite;
  suite.push_back({"one", [](S, S) { return 1.0; }});
  suite.push_back({"shock_at_0", [](S lo, S up) { return up[1] - lo[1] == 1 ? 1.0 : 0.0; }});
  suite.push_back({"shock_at_1", [](S lo, S up) { return up[2] - lo[2] == 1 ? 1.0 : 0.0; }});
  suite.push_back({"shock_position", [](S lo, S up) {
                     return -1.0 * (up[0] - lo[0]) + 1.0 * (up[2] - lo[2]);
                   }});
  suite.push_back({"lower_0", [](S lo, S) { return double(lo[1]); }});
  suite.push_back({"upper_1", [](S, S up) { return double(up[2]); }});
  suite.push_back({"lower_m1_upper_0", [](S lo, S up) { return double(lo[0]) * up[1]; }});
  suite.push_back({"low_left_and_shock", [](S lo, S up) {
                     return (lo[0] <= 0 && up[1] - lo[1] == 1) ? 1.0 : 0.0;
                   }});
  suite.push_back({"capped_exponentials", [](S lo, S up) {
                     return std::min(std::exp(0.5 * up[1]), 10.0) - std::min(std::exp(0.5 * lo[2]), 10.0);
                   }});
  return suite;
}

ResidualReport shock_generator_residual(double rho, double beta, int band,
                                        std::span<const PairFunction> suite) {
  const RateParams params(beta);
  const ShockMeasure shock(rho, params);
  const auto left_sup = support(shock.left(), band);
  const auto right_sup = support(shock.right(), band);
  double kept_left = 0.0;
  double kept_right = 0.0;
  for (const auto& [z, w] : left_sup) kept_left += w;
  for (const auto& [z, w] : right_sup) kept_right += w;

  ResidualReport rep;
  rep.neglected_mass = 1.0 - kept_left * kept_left * kept_right * kept_right;

  // Window sites -1, 0, 1 plus one extra bricklayer site; each site's pair is
  // one-dimensional under the shock measure (equal pair, or (y, y+1) at the shock).
  constexpr int kFirst = -2;
  constexpr int kLast = 2;
  const auto site_support = [&](int site, int shock_site) { return site < shock_site ? left_sup : right_sup; };
  const auto pair_at = [](int site, int shock_site, int y) {
    return std::pair<int, int>{y, site == shock_site ? y + 1 : y};
  };

  std::vector<Neumaier> lhs(suite.size());
  std::array<int, 3> lo{};
  std::array<int, 3> up{};
  std::array<int, 3> lo2{};
  std::array<int, 3> up2{};

  for (int s = kFirst; s <= kLast; ++s) {
    for (Side side : {Side::right, Side::left}) {
      const int column = side == Side::right ? s : s - 1;
      if (column + 1 < -1 || column > 1) continue;  // touches no window site
      std::vector<int> sites{-1, 0, 1};
      if (s < -1 || s > 1) sites.push_back(s);
      std::vector<std::vector<std::pair<int, double>>> supports;
      for (int site : sites) supports.push_back(site_support(site, 0));
      for_each_config(supports, [&](std::span<const int> ys, double weight) {
        std::array<int, kLast - kFirst + 1> lower{};
        std::array<int, kLast - kFirst + 1> upper{};
        for (std::size_t k = 0; k < sites.size(); ++k) {
          const auto [l, u] = pair_at(sites[k], 0, ys[k]);
          lower[static_cast<std::size_t>(sites[k] - kFirst)] = l;
          upper[static_cast<std::size_t>(sites[k] - kFirst)] = u;
        }
        const std::array<int, 2> values{lower[static_cast<std::size_t>(s - kFirst)],
                                        upper[static_cast<std::size_t>(s - kFirst)]};
        const ChannelSet set = joint_site_channels(values, side, params);
        for (int k = 0; k < 3; ++k) {
          lo[static_cast<std::size_t>(k)] = lower[static_cast<std::size_t>(k + 1)];
          up[static_cast<std::size_t>(k)] = upper[static_cast<std::size_t>(k + 1)];
        }
        for (int m = 0; m < set.size; ++m) {
          const Channel& ch = set.channels[static_cast<std::size_t>(m)];
          if (ch.rate == 0.0) continue;
          lo2 = lo;
          up2 = up;
          for (int layer = 0; layer < 2; ++layer) {
            if (!((ch.mask >> layer) & 1u)) continue;
            auto& arr = layer == 0 ? lo2 : up2;
            if (column >= -1 && column <= 1) arr[static_cast<std::size_t>(column + 1)] -= 1;
            if (column + 1 >= -1 && column + 1 <= 1) arr[static_cast<std::size_t>(column + 2)] += 1;
          }
          for (std::size_t f = 0; f < suite.size(); ++f)
            lhs[f].add(weight * ch.rate * (suite[f].phi(lo2, up2) - suite[f].phi(lo, up)));
        }
      });
    }
  }

  // Expectations of phi under the shock measure translated to k.
  const auto expect = [&](int k) {
    std::vector<Neumaier> e(suite.size());
    std::vector<std::vector<std::pair<int, double>>> supports;
    for (int site = -1; site <= 1; ++site) supports.push_back(site_support(site, k));
    for_each_config(supports, [&](std::span<const int> ys, double weight) {
      for (int site = -1; site <= 1; ++site) {
        const auto [l, u] = pair_at(site, k, ys[static_cast<std::size_t>(site + 1)]);
        lo[static_cast<std::size_t>(site + 1)] = l;
        up[static_cast<std::size_t>(site + 1)] = u;
      }
      for (std::size_t f = 0; f < suite.size(); ++f) e[f].add(weight * suite[f].phi(lo, up));
    });
    std::vector<double> out;
    for (const auto& v : e) out.push_back(v.value());
    return out;
  };
  const auto e0 = expect(0);
  const auto ep = expect(1);
  const auto em = expect(-1);
  const WalkRates rates = rw_rates(rho, params);
  for (std::size_t f = 0; f < suite.size(); ++f) {
    const double rhs = rates.right * (ep[f] - e0[f]) + rates.left * (em[f] - e0[f]);
    const double r = std::abs(lhs[f].value() - rhs);
    rep.residuals.emplace_back(suite[f].name, r);
    rep.max_residual = std::max(rep.max_residual, r);
  }
  return rep;
}

// ---------------------------------------------------------------------------

double rw_law(double right, double left, double t, long k) {
  if (!(right > 0.0) || !(left > 0.0)) throw ConfigError("rw_law: rates must be positive");
  if (t < 0.0) throw ConfigError("rw_law: negative time");
  if (t == 0.0) return k == 0 ? 1.0 : 0.0;
  const double lr = std::log(right * t);
  const double ll = std::log(left * t);
  const double decay = -(right + left) * t;
  const long j0 = std::max(0L, -k);
  const auto term = [&](long j) {
    const double kj = static_cast<double>(k + j);
    const double jj = static_cast<double>(j);
    return decay + kj * lr + jj * ll - std::lgamma(kj + 1.0) - std::lgamma(jj + 1.0);
  };
  // Terms are log-concave in j: walk to the peak, then sum outward.
  std::vector<double> logs;
  double peak = -INFINITY;
  for (long j = j0;; ++j) {
    const double l = term(j);
    logs.push_back(l);
    peak = std::max(peak, l);
    if (l < peak && l < peak + std::log(1e-14) - 10.0) break;
    if (j > j0 + 1000000) throw NumericError("rw_law: series did not converge");
  }
  Neumaier sum;
  for (double l : logs) sum.add(std::exp(l - peak));
  return sum.value() * std::exp(peak);
}

// ---------------------------------------------------------------------------

std::vector<CheckReport> run_verify_suite(const VerifyOptions& options) {
  std::vector<CheckReport> out;
  for (double beta : options.betas) static_cast<void>(RateParams(beta));
  if (options.d_max < 2) throw ConfigError("verify: d_max must be at least 2");

  const auto merge = [](CheckReport& into, const CheckReport& part) {
    into.max_error = std::max(into.max_error, part.max_error);
    if (!part.pass && into.pass) {
      into.pass = false;
      into.detail = part.detail;
    }
  };

  CheckReport tables{"refresh.tables", true, 0.0, ""};
  CheckReport domination{"refresh.label_domination", true, 0.0, ""};
  CheckReport identities{"measure.shift_identities", true, 0.0, ""};
  for (double beta : options.betas) {
    const RefreshTable table(beta, options.p_perturbation);
    merge(tables, check_refresh_tables(beta, options.d_max, table));
    for (int a = -10; a <= 20; ++a)
      for (int b = a; b <= 20; ++b) merge(domination, check_label_domination(beta, a, b, table).report);
    merge(identities, check_measure_identities(beta));
  }
  out.push_back(tables);
  out.push_back(domination);
  out.push_back(identities);

  CheckReport stationarity{"generator.stationarity", true, 0.0, ""};
  const auto suite3 = site_function_suite(3);
  const auto suite4 = site_function_suite(4);
  for (double theta : {0.0, 0.6}) {
    for (int sites : {3, 4}) {
      const auto r = stationarity_residual(theta, 1.0, sites, Boundary::theta, 25,
                                           sites == 3 ? suite3 : suite4);
      std::ostringstream where;
      where << "theta=" << theta << " sites=" << sites;
      record(stationarity, r.max_residual, 1e-6, where.str());
    }
  }
  out.push_back(stationarity);

  CheckReport conservation{"generator.frozen_conservation", true, 0.0, ""};
  {
    std::vector<SiteFunction> sum_only;
    for (auto& f : suite3)
      if (f.name == "sum" || f.name == "one") sum_only.push_back(f);
    const auto r = stationarity_residual(0.0, 1.0, 3, Boundary::frozen, 25, sum_only);
    record(conservation, r.max_residual, 0.0, "frozen volume, sum of increments");
  }
  out.push_back(conservation);

  CheckReport shock{"shock.generator", true, 0.0, ""};
  const auto pair_suite = pair_function_suite();
  for (double rho : {0.0, 0.5}) {
    const auto r = shock_generator_residual(rho, 1.0, 25, pair_suite);
    std::ostringstream where;
    where << "rho=" << rho;
    record(shock, r.max_residual, 1e-6, where.str());
  }
  out.push_back(shock);

  CheckReport walk{"walk.law", true, 0.0, ""};
  {
    const WalkRates rates = rw_rates(0.0, RateParams(1.0));
    Neumaier mass;
    Neumaier mean;
    Neumaier second;
    for (long k = -80; k <= 120; ++k) {
      const double p = rw_law(rates.right, rates.left, 4.0, k);
      mass.add(p);
      mean.add(static_cast<double>(k) * p);
      second.add(static_cast<double>(k) * static_cast<double>(k) * p);
    }
    const double m = mean.value();
    record(walk, std::abs(mass.value() - 1.0), 1e-12, "mass");
    record(walk, std::abs(m - (rates.right - rates.left) * 4.0), 1e-9, "mean");
    record(walk, std::abs(second.value() - m * m - (rates.right + rates.left) * 4.0), 1e-9, "variance");
  }
  out.push_back(walk);
  return out;
}

}  // namespace taeblp
