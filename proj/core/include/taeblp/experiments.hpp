#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "taeblp/convexity.hpp"
#include "taeblp/report.hpp"

namespace taeblp {

/// Observation window [ell, r] of a finite-volume run.
struct Window {
  int ell = -30;
  int r = 30;
};

/// Settings shared by every experiment.
struct EnsembleOptions {
  std::uint64_t replicas = 10000;
  std::uint64_t seed = 1;
  int workers = 0;              ///< 0: TAEBLP_WORKERS, else hardware concurrency
  int margin = 10;              ///< a tracked label this close to an edge contaminates
  bool widen_on_contamination = true;
  int omega_max = kDefaultOmegaMax;
};

/// Contamination above this fraction doubles the window and reruns.
inline constexpr double kWidenThreshold = 1e-3;
/// Contamination above this fraction marks the run invalid.
inline constexpr double kInvalidThreshold = 1e-2;

/// Worker count: `requested` if positive, else TAEBLP_WORKERS, else the hardware.
int resolve_workers(int requested);

/// Calls body(i) for i in [0, n) on a pool of `workers` threads. Indices are
/// split into fixed contiguous blocks; the first exception is rethrown.
void parallel_for(std::uint64_t n, int workers, const std::function<void(std::uint64_t)>& body);

// ---------------------------------------------------------------------------

/// Mean position of the single discrepancy against the characteristic speed,
/// and Var(h_i(t)) from an independent stationary ensemble against
/// Var(omega) E|Q(t) - i|.
struct CharacteristicConfig {
  double rho = 0.0;
  double beta = 1.0;
  double t = 2.0;
  Window pair_window{-30, 30};
  Window single_window{-30, 30};
  std::vector<int> sites;  ///< empty: {0, floor(V t)}
  EnsembleOptions ensemble;
};
ExperimentReport exp_characteristic_Q(const CharacteristicConfig& config);

/// Second class particle started from the shock measure against the
/// asymmetric random walk law.
struct ShockConfig {
  double rho = 0.0;
  double beta = 1.0;
  double t = 4.0;
  Window window{-60, 60};
  EnsembleOptions ensemble;
};
ExperimentReport exp_shock_random_walk(const ShockConfig& config);

/// Tagged labels y, z on an ordered pair at densities lam < rho.
struct ConvexityConfig {
  double lam = 0.5;
  double rho = 1.0;
  double beta = 1.0;
  double t = 2.0;
  Window window{-30, 30};
  int m_max = 10;
  RefreshTrigger trigger = RefreshTrigger::any_change;
  bool refresh_at_start = true;  ///< joint refresh of (y, z) at time 0
  bool compare_direct = true;    ///< also run the direct pair for the Q-law check
  EnsembleOptions ensemble;
};
ExperimentReport exp_convexity_labels(const ConvexityConfig& config);

/// Var(h_z(t)) against sum_n |n - z| Cov(omega_n(t), omega_0(0)).
struct CovarianceConfig {
  double theta = 0.0;
  double beta = 1.0;
  double t = 2.0;
  int z = 0;
  int truncation = 12;  ///< sum over |n| <= truncation; the rest is a fitted tail
  Window window{-40, 40};
  EnsembleOptions ensemble;
};
ExperimentReport exp_covariance_identity(const CovarianceConfig& config);

/// Height variance along and off the characteristic, plus the tail of Q.
struct ScalingConfig {
  double rho = 1.0;
  double beta = 1.0;
  std::vector<double> t_grid{8.0, 16.0, 32.0, 64.0};
  Window window{-100, 230};
  std::vector<double> off_offsets{-1.0, 1.0};  ///< V = V^rho + offset
  double off_time = 32.0;
  // Tail of |Q(t)| from a separate pair ensemble; skipped when tail_replicas = 0.
  double tail_rho = 0.0;
  double tail_t = 8.0;
  Window tail_window{-50, 50};
  std::vector<double> tail_ratios{2.0, 3.0, 4.0};
  std::uint64_t tail_replicas = 20000;
  EnsembleOptions ensemble;
};
ExperimentReport exp_scaling_scan(const ScalingConfig& config);

}  // namespace taeblp
