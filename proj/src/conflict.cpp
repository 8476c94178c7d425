#include "subsim/conflict.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Dense>

namespace subsim {
namespace {

constexpr std::uint64_t kInitStream = 0xffffffffULL;
constexpr std::uint64_t kSsStream = 1;
constexpr std::uint64_t kDmcStream = 2;
constexpr std::uint64_t kMeasurementStream = 3;

double squared_offset(const Approach& a) {
  const double dx = a.intruder_point.x - a.observer_point.x;
  const double dy = a.intruder_point.y - a.observer_point.y;
  return dx * dx + dy * dy;
}

// Truth propagation, measurement scheduling and filtering shared by the full
// scenario run and freeze_query, so both see identical filter states.
class TruthAndFilter {
 public:
  TruthAndFilter(const ScenarioSpec& spec, std::uint64_t seed)
      : spec_(spec),
        seed_(seed),
        dt_(1.0 / spec.sample_rate),
        a_(transition_matrix(dt_)),
        observer_(spec.observer_initial()),
        intruder_(spec.intruder_initial()) {
    spec_.validate();
    Stream init_rng(seed_, {kInitStream});
    estimate_ = initial_estimate(intruder_, spec_.noise, spec_.filter_init, init_rng);
  }

  // Advances from K to K+1 and returns whether a measurement was taken.
  bool advance() {
    ++index_;
    observer_ = a_ * observer_;
    intruder_ = a_ * intruder_;
    std::optional<Measurement> z;
    if (counter_ == spec_.measurement_interval()) {
      Stream rng(seed_, {index_, kMeasurementStream});
      z = simulate_measurement(intruder_, spec_.noise, rng);
      counter_ = 0;
    }
    ++counter_;
    estimate_ = kf_step(estimate_, z, dt_, spec_.noise);
    return z.has_value();
  }

  ConflictQuery query() const {
    ConflictQuery q;
    q.observer = observer_;
    q.intruder_estimate = estimate_;
    q.protected_radius = spec_.protected_radius;
    q.horizon = spec_.horizon;
    q.sample_rate = spec_.sample_rate;
    return q;
  }

  std::size_t index() const { return index_; }
  const AircraftState& observer() const { return observer_; }
  const AircraftState& intruder() const { return intruder_; }
  const KalmanEstimate& estimate() const { return estimate_; }

 private:
  ScenarioSpec spec_;
  std::uint64_t seed_;
  double dt_;
  StateMatrix a_;
  AircraftState observer_;
  AircraftState intruder_;
  KalmanEstimate estimate_;
  std::size_t counter_ = 0;  // M_c
  std::size_t index_ = 0;    // K
};

}  // namespace

void ConflictQuery::validate() const {
  if (!(protected_radius > 0.0))
    throw std::invalid_argument("ConflictQuery: protected_radius must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("ConflictQuery: horizon must be positive");
  horizon_steps(sample_rate, horizon);
  if (!observer.allFinite() || !intruder_estimate.mean.allFinite() ||
      !intruder_estimate.covariance.allFinite())
    throw std::invalid_argument("ConflictQuery: non-finite state");
}

GaussianPrior::GaussianPrior(const AircraftState& mean, const StateMatrix& covariance)
    : mean_(mean) {
  const StateMatrix sym = 0.5 * (covariance + covariance.transpose());
  if ((sym - covariance).cwiseAbs().maxCoeff() >
      1e-9 * std::max(1.0, covariance.cwiseAbs().maxCoeff()))
    throw NotPositiveSemidefiniteError("GaussianPrior: covariance is not symmetric");
  const Eigen::SelfAdjointEigenSolver<StateMatrix> eig(sym, Eigen::EigenvaluesOnly);
  const double largest = std::max(eig.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  if (eig.eigenvalues().minCoeff() < -1e-10 * largest)
    throw NotPositiveSemidefiniteError(
        "GaussianPrior: covariance has a negative eigenvalue " +
        std::to_string(eig.eigenvalues().minCoeff()));

  Eigen::LLT<StateMatrix> llt(sym);
  double jitter = 1e-12 * largest;
  while (llt.info() != Eigen::Success) {
    llt.compute(sym + jitter * StateMatrix::Identity());
    jitter_ = jitter;
    jitter *= 10.0;
  }
  lower_ = llt.matrixL();
}

AircraftState GaussianPrior::draw(Stream& rng) const {
  AircraftState z;
  for (int i = 0; i < 6; ++i) z(i) = rng.normal();
  return mean_ + lower_ * z;
}

double GaussianPrior::log_density(const AircraftState& x) const {
  const AircraftState z =
      lower_.triangularView<Eigen::Lower>().solve(AircraftState(x - mean_));
  return -0.5 * z.squaredNorm();
}

ConflictSystem::ConflictSystem(const ConflictQuery& query)
    : query_(query),
      observer_(propagate(query.observer, query.sample_rate, query.horizon)),
      prior_(query.intruder_estimate.mean, query.intruder_estimate.covariance) {
  query_.validate();
}

AircraftState ConflictSystem::draw_prior(Stream& rng) const { return prior_.draw(rng); }

double ConflictSystem::response(const AircraftState& x) const {
  return approach(x).miss_distance;
}

Approach ConflictSystem::approach(const AircraftState& x) const {
  return closest_approach(observer_, x);
}

double ConflictSystem::acceptance_probability(const AircraftState& current,
                                              const Approach& current_approach,
                                              const AircraftState& candidate,
                                              const Approach& candidate_approach,
                                              double threshold) const {
  if (!(candidate_approach.miss_distance < threshold)) return 0.0;
  // Target: isotropic Gaussian of the intruder minimum point about the
  // observer minimum point, variance r_t^2.
  const double variance = query_.protected_radius * query_.protected_radius;
  const double log_target =
      -(squared_offset(candidate_approach) - squared_offset(current_approach)) /
      (2.0 * variance);
  const double log_prior = prior_.log_density(candidate) - prior_.log_density(current);
  const double log_beta = log_target + log_prior;
  return log_beta >= 0.0 ? 1.0 : std::exp(log_beta);
}

std::vector<ConflictChainEntry> ConflictSystem::chain_record(const AircraftState& seed,
                                                             double threshold,
                                                             std::size_t length,
                                                             Stream& rng) const {
  Approach current_approach = approach(seed);
  if (!(current_approach.miss_distance <= threshold))
    throw std::invalid_argument("mh_conflict_samples: seed miss-distance " +
                                std::to_string(current_approach.miss_distance) +
                                " exceeds threshold " + std::to_string(threshold));
  AircraftState current = seed;
  std::vector<ConflictChainEntry> chain;
  chain.reserve(length);
  for (std::size_t k = 0; k < length; ++k) {
    // Only the accelerations are perturbed.
    AircraftState candidate = current;
    candidate(state::kAx) += rng.normal();
    candidate(state::kAy) += rng.normal();
    const Approach candidate_approach = approach(candidate);
    const double alpha = acceptance_probability(current, current_approach, candidate,
                                                candidate_approach, threshold);
    const double e = rng.uniform();
    const bool accepted = e < alpha;
    if (accepted) {
      current = candidate;
      current_approach = candidate_approach;
    }
    chain.push_back({current, current_approach, candidate_approach.miss_distance, accepted});
  }
  return chain;
}

std::vector<Scored<AircraftState>> ConflictSystem::conditional_chain(
    const AircraftState& seed, double threshold, std::size_t length, Stream& rng) const {
  const auto record = chain_record(seed, threshold, length, rng);
  std::vector<Scored<AircraftState>> out;
  out.reserve(record.size());
  for (const auto& entry : record) out.push_back({entry.state, entry.approach.miss_distance});
  return out;
}

PcResult pc_dmc(const ConflictQuery& query, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("pc_dmc: n must be at least 1");
  const ConflictSystem system(query);
  const auto rows = draw_level_zero(system, n, seed);
  PcResult out;
  out.conflict_count = count_failures<AircraftState>(rows, query.protected_radius);
  out.pc = static_cast<double>(out.conflict_count) / static_cast<double>(n);
  out.levels_used = 1;
  out.samples_used = n;
  out.floor_reached = out.conflict_count == 0;
  return out;
}

std::vector<std::vector<ConflictChainEntry>> mh_conflict_samples(
    const ConflictQuery& query, std::span<const AircraftState> seeds,
    std::size_t chain_length, double threshold, std::uint64_t stream_seed) {
  const ConflictSystem system(query);
  std::vector<std::vector<ConflictChainEntry>> chains;
  chains.reserve(seeds.size());
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    Stream rng(stream_seed, {j});
    chains.push_back(system.chain_record(seeds[j], threshold, chain_length, rng));
  }
  return chains;
}

SsConflictResult pc_ss(const ConflictQuery& query, const SubsetConfig& config,
                       std::uint64_t seed) {
  const ConflictSystem system(query);
  auto run = run_subset_simulation(system, config, query.protected_radius, seed);
  SsConflictResult out;
  out.result.pc = run.estimate;
  out.result.conflict_count = run.diagnostics.conflict_count;
  out.result.levels_used = run.diagnostics.levels_completed;
  out.result.samples_used = run.diagnostics.samples_used;
  out.result.floor_reached = run.diagnostics.floor_reached;
  out.table = std::move(run.table);
  out.diagnostics = std::move(run.diagnostics);
  return out;
}

std::vector<ScenarioStep> simulate_scenario(const ScenarioSpec& spec,
                                            const SubsetConfig& ss_config, std::uint64_t seed,
                                            const ScenarioRunOptions& options) {
  spec.validate();
  ss_config.validate();
  if (options.stride == 0) throw std::invalid_argument("simulate_scenario: stride must be >= 1");
  TruthAndFilter world(spec, seed);
  std::vector<ScenarioStep> steps;
  const std::size_t total = spec.steps();
  steps.reserve(total / options.stride + 1);
  for (std::size_t k = 0; k < total; ++k) {
    const bool measured = world.advance();
    const std::size_t index = world.index();
    const double time = static_cast<double>(index) / spec.sample_rate;
    if (index % options.stride != 0 || time < options.start_time - 1e-12) continue;

    ScenarioStep step;
    step.index = index;
    step.time = time;
    step.observer_truth = world.observer();
    step.intruder_truth = world.intruder();
    step.estimate = world.estimate();
    step.measured = measured;

    const ConflictQuery query = world.query();
    step.ss = pc_ss(query, ss_config, derive_seed(seed, {index, kSsStream})).result;
    if (options.run_dmc)
      step.dmc = pc_dmc(query, step.ss.samples_used, derive_seed(seed, {index, kDmcStream}));
    const Trajectory observer_path = propagate(world.observer(), spec.sample_rate, spec.horizon);
    step.miss_true = closest_approach(observer_path, world.intruder()).miss_distance;
    steps.push_back(std::move(step));
  }
  return steps;
}

ConflictQuery freeze_query(const ScenarioSpec& spec, std::size_t step_index,
                           std::uint64_t seed) {
  spec.validate();
  if (step_index == 0 || step_index > spec.steps())
    throw std::invalid_argument("freeze_query: step index out of range");
  TruthAndFilter world(spec, seed);
  while (world.index() < step_index) world.advance();
  return world.query();
}

}  // namespace subsim
