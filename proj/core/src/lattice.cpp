#include "taeblp/lattice.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "taeblp/errors.hpp"

namespace taeblp {

void VolumeSpec::validate() const {
  if (!(ell < 0 && r > 0)) {
    std::ostringstream os;
    os << "volume must satisfy ell < 0 < r, got (" << ell << ", " << r << ")";
    throw ConfigError(os.str());
  }
  if (omega_max < 1) throw ConfigError("omega_max must be at least 1");
  if (!std::isfinite(theta_left) || !std::isfinite(theta_right))
    throw ConfigError("boundary theta must be finite");
}

// ---------------------------------------------------------------------------

IncrementField::IncrementField(int ell, int r)
    : ell_(ell),
      r_(r),
      omega_(static_cast<std::size_t>(r - ell + 3), 0),
      height_(static_cast<std::size_t>(r - ell + 4), 0) {}

void IncrementField::reset_heights() {
  const int zero = -ell_ + 2;
  height_[static_cast<std::size_t>(zero)] = 0;
  for (int c = 1; c <= r_ + 1; ++c)
    height_[static_cast<std::size_t>(c - ell_ + 2)] =
        height_[static_cast<std::size_t>(c - ell_ + 1)] - omega(c);
  for (int c = -1; c >= ell_ - 2; --c)
    height_[static_cast<std::size_t>(c - ell_ + 2)] =
        height_[static_cast<std::size_t>(c - ell_ + 3)] + omega(c + 1);
}

bool IncrementField::gradient_consistent() const noexcept {
  for (int i = ell_ - 1; i <= r_ + 1; ++i)
    if (static_cast<std::int64_t>(omega(i)) != height(i - 1) - height(i)) return false;
  return true;
}

std::int64_t IncrementField::omega_sum(int first, int last) const noexcept {
  std::int64_t s = 0;
  for (int i = first; i <= last; ++i) s += omega(i);
  return s;
}

IncrementField init_stationary(const StationaryMarginal& marginal, const VolumeSpec& spec,
                               Rng& rng) {
  spec.validate();
  IncrementField field(spec.ell, spec.r);
  for (int i = field.first_site(); i <= field.last_site(); ++i)
    field.set_omega(i, marginal.sample(rng));
  field.reset_heights();
  return field;
}

IncrementField init_stationary(double theta, const VolumeSpec& spec, const RateParams& params,
                               Rng& rng) {
  return init_stationary(StationaryMarginal(theta, params), spec, rng);
}

// ---------------------------------------------------------------------------

void write_snapshot(std::ostream& os, const Snapshot& snap) {
  const IncrementField& f = snap.field;
  os << std::setprecision(17) << "# taeblp-snapshot theta=" << snap.theta << " beta=" << snap.beta
     << " clock=" << f.clock << " seed=" << snap.seed << " ell=" << f.ell() << " r=" << f.r()
     << '\n';
  for (int i = f.first_site(); i <= f.last_site(); ++i)
    os << i << ' ' << f.omega(i) << ' ' << f.height(i) << '\n';
}

Snapshot read_snapshot(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# taeblp-snapshot", 0) != 0)
    throw ConfigError("snapshot: missing header line");
  Snapshot snap;
  double clock = 0.0;
  int ell = 0;
  int r = 0;
  std::istringstream hs(header.substr(std::string("# taeblp-snapshot").size()));
  std::string token;
  while (hs >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw ConfigError("snapshot: bad header token " + token);
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "theta") snap.theta = std::stod(value);
    else if (key == "beta") snap.beta = std::stod(value);
    else if (key == "clock") clock = std::stod(value);
    else if (key == "seed") snap.seed = std::stoull(value);
    else if (key == "ell") ell = std::stoi(value);
    else if (key == "r") r = std::stoi(value);
    else throw ConfigError("snapshot: unknown header key " + key);
  }
  if (!(ell < 0 && r > 0)) throw ConfigError("snapshot: header lacks a valid window");
  IncrementField field(ell, r);
  field.clock = clock;
  for (int expect = field.first_site(); expect <= field.last_site(); ++expect) {
    int i = 0;
    int w = 0;
    std::int64_t h = 0;
    if (!(is >> i >> w >> h) || i != expect) throw ConfigError("snapshot: malformed site line");
    field.set_omega(i, w);
    field.set_height(i, h);
  }
  field.set_height(ell - 2, field.height(ell - 1) + field.omega(ell - 1));
  if (!field.gradient_consistent()) throw ConfigError("snapshot: inconsistent heights");
  snap.field = std::move(field);
  return snap;
}

// ---------------------------------------------------------------------------

RateTable::RateTable(RateParams params, int omega_max)
    : beta_(params.beta), omega_max_(omega_max), offset_(omega_max + 1) {
  table_.resize(static_cast<std::size_t>(2 * offset_ + 1));
  for (int z = -offset_; z <= offset_; ++z)
    table_[static_cast<std::size_t>(z + offset_)] = rate_f(z, params);
}

// ---------------------------------------------------------------------------

SingleProcess::SingleProcess(const VolumeSpec& spec, RateParams params, IncrementField field)
    : spec_(spec),
      rates_(params, spec.omega_max),
      field_(std::move(field)),
      index_(static_cast<std::size_t>(spec.last_column() - spec.first_column() + 1)),
      left_phantom_(std::exp(spec.theta_left)),
      right_phantom_(std::exp(-spec.theta_right)) {
  spec_.validate();
  if (field_.ell() != spec_.ell || field_.r() != spec_.r)
    throw ConfigError("field window does not match the volume");
  for (int i = spec_.ell; i <= spec_.r; ++i) check_band(i);
  for (int c = spec_.first_growth_column(); c <= spec_.last_growth_column(); ++c)
    refresh_column(c);
  index_.rebuild();
}

double SingleProcess::column_rate(int c) const {
  if (!spec_.is_growth_column(c)) {
    std::ostringstream os;
    os << "column " << c << " does not grow in this volume";
    throw ConfigError(os.str());
  }
  const double right = c == spec_.ell - 1 ? left_phantom_ : rates_.f(field_.omega(c));
  const double left = c == spec_.r ? right_phantom_ : rates_.f(-field_.omega(c + 1));
  return right + left;
}

void SingleProcess::refresh_column(int c) {
  index_.set(static_cast<std::size_t>(c - spec_.first_column()), column_rate(c));
}

void SingleProcess::check_band(int i) const {
  const int w = field_.omega(i);
  if (w > spec_.omega_max || w < -spec_.omega_max) throw BandViolation(i, w, field_.clock);
}

std::uint64_t SingleProcess::run_until(double t_end, Rng& rng) {
  if (t_end < field_.clock) throw ConfigError("run_until: t_end lies before the clock");
  const int first_growth = spec_.first_growth_column();
  const int last_growth = spec_.last_growth_column();
  std::uint64_t laid = 0;
  for (;;) {
    const double total = index_.total();
    if (!(total > 0.0)) break;
    const double dt = exponential(rng, total);
    if (field_.clock + dt > t_end) break;
    field_.clock += dt;
    const std::size_t ch = index_.find(uniform01(rng) * total);
    const int c = static_cast<int>(ch) + spec_.first_column();
    field_.apply_brick(c);
    ++laid;
    if (spec_.is_bulk_site(c)) check_band(c);
    if (spec_.is_bulk_site(c + 1)) check_band(c + 1);
    for (int k = c - 1; k <= c + 1; ++k)
      if (k >= first_growth && k <= last_growth) refresh_column(k);
  }
  field_.clock = t_end;
  events_ += laid;
  return laid;
}

}  // namespace taeblp
