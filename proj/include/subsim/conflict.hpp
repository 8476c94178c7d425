#pragma once

// Probability of conflict between an observer and a tracked intruder:
// Direct Monte Carlo baseline, Metropolis-Hastings conditional sampler over
// intruder states, Subset Simulation driver, and the closed-loop
// measure / filter / estimate scenario run.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "subsim/dynamics.hpp"
#include "subsim/scenarios.hpp"
#include "subsim/subset_simulation.hpp"
#include "subsim/tracking.hpp"

namespace subsim {

class NotPositiveSemidefiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConflictQuery {
  AircraftState observer = AircraftState::Zero();  // intended state vector O
  KalmanEstimate intruder_estimate;                // (U_hat, S_hat)
  double protected_radius = kProtectedRadius;      // r_t, m
  double horizon = 20.0;                           // t, s
  double sample_rate = 20.0;                       // f, Hz

  void validate() const;
};

struct PcResult {
  double pc = 0.0;
  std::size_t conflict_count = 0;  // D
  std::size_t levels_used = 1;
  std::size_t samples_used = 0;    // N_T
  bool floor_reached = false;      // no conflict found; pc is an upper bound
};

/// Gaussian N(mean, covariance) with a Cholesky factor. A covariance that is
/// PSD but not factorable gets the smallest diagonal jitter (10^-12 scale,
/// growing by 10x) that restores factorability.
class GaussianPrior {
 public:
  GaussianPrior(const AircraftState& mean, const StateMatrix& covariance);

  AircraftState draw(Stream& rng) const;
  /// log density up to an additive constant.
  double log_density(const AircraftState& x) const;

  double jitter() const { return jitter_; }
  const AircraftState& mean() const { return mean_; }

 private:
  AircraftState mean_;
  StateMatrix lower_;  // covariance + jitter I = L L^T
  double jitter_ = 0.0;
};

/// One step of a conflict chain.
struct ConflictChainEntry {
  AircraftState state;  // retained sample U_{k+1}
  Approach approach;    // its closest approach to the observer
  double candidate_miss = 0.0;
  bool accepted = false;
};

/// Observer trajectory, intruder prior and the conditional kernel for one
/// query. Samples are intruder states; the response is the miss-distance.
/// Trajectories are not stored; propagate(state, f, t) regenerates them.
class ConflictSystem {
 public:
  using Sample = AircraftState;

  explicit ConflictSystem(const ConflictQuery& query);

  AircraftState draw_prior(Stream& rng) const;
  double response(const AircraftState& x) const;
  Approach approach(const AircraftState& x) const;

  /// min(1, beta) for moving current -> candidate at the given level
  /// threshold; zero when the candidate miss is not strictly below it.
  double acceptance_probability(const AircraftState& current, const Approach& current_approach,
                                const AircraftState& candidate,
                                const Approach& candidate_approach, double threshold) const;

  std::vector<ConflictChainEntry> chain_record(const AircraftState& seed, double threshold,
                                               std::size_t length, Stream& rng) const;

  std::vector<Scored<AircraftState>> conditional_chain(const AircraftState& seed,
                                                       double threshold, std::size_t length,
                                                       Stream& rng) const;

  const ConflictQuery& query() const { return query_; }
  const Trajectory& observer_trajectory() const { return observer_; }
  const GaussianPrior& prior() const { return prior_; }

 private:
  ConflictQuery query_;
  Trajectory observer_;
  GaussianPrior prior_;
};

/// D = #{miss <= r_t} over n prior draws; draw k uses substream (seed, 0, k).
PcResult pc_dmc(const ConflictQuery& query, std::size_t n, std::uint64_t seed);

/// One chain per seed; chain j uses substream (stream_seed, j).
std::vector<std::vector<ConflictChainEntry>> mh_conflict_samples(
    const ConflictQuery& query, std::span<const AircraftState> seeds,
    std::size_t chain_length, double threshold, std::uint64_t stream_seed);

struct SsConflictResult {
  PcResult result;
  CcdfTable<AircraftState> table;
  SubsetDiagnostics diagnostics;
};

SsConflictResult pc_ss(const ConflictQuery& query, const SubsetConfig& config,
                       std::uint64_t seed);

struct ScenarioStep {
  std::size_t index = 0;  // K + 1
  double time = 0.0;      // s
  PcResult ss;
  PcResult dmc;
  AircraftState observer_truth;
  AircraftState intruder_truth;
  KalmanEstimate estimate;
  bool measured = false;
  double miss_true = 0.0;  // true miss-distance over the horizon
};

struct ScenarioRunOptions {
  /// Evaluate P_c on every `stride`-th step (the filter still runs on every
  /// step). Step K+1 is evaluated when (K+1) % stride == 0.
  std::size_t stride = 1;
  /// Skip P_c on steps earlier than this time, s.
  double start_time = 0.0;
  bool run_dmc = true;
};

/// Observer and intruder truth propagate each step; the intruder is measured
/// every f/f_M steps; the filter predicts/updates; then P_c is estimated by
/// SS and by DMC with the same number of samples SS consumed.
std::vector<ScenarioStep> simulate_scenario(const ScenarioSpec& spec,
                                            const SubsetConfig& ss_config, std::uint64_t seed,
                                            const ScenarioRunOptions& options = {});

/// Filter state at step `step_index` without any P_c estimation, returned as
/// the query a P_c estimator would see at that step.
ConflictQuery freeze_query(const ScenarioSpec& spec, std::size_t step_index, std::uint64_t seed);

}  // namespace subsim
