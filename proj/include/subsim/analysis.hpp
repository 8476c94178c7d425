#pragma once

// Coefficient-of-variation study: repeated P_c estimates on a frozen query
// for a range of sample budgets, for both estimators.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "subsim/conflict.hpp"
#include "subsim/scenarios.hpp"
#include "subsim/subset_simulation.hpp"

namespace subsim {

enum class Method { DirectMonteCarlo, SubsetSimulation };

std::string to_string(Method method);

/// A scenario snapshot: the filter state at `time` seconds into `scenario`.
struct Phase {
  std::string name;
  ScenarioSpec scenario;
  double time = 0.0;

  std::size_t step_index() const;
};

/// Head-on, L_a = 152.4 m, L_o = 2000 m, t = 1 s (P_c around 1e-1).
Phase phase_p1();
/// Head-on, L_a = 1000 m, L_o = 20000 m, 200 s run, t = 100 s.
Phase phase_p2();
Phase phase_by_name(const std::string& name);

struct CovStudyConfig {
  std::size_t repetitions = 50;
  std::vector<std::size_t> dmc_sizes;
  std::vector<std::size_t> ss_sizes;  // per-level N
  Phase phase;
  double level_probability = 0.1;
  std::size_t max_levels = 7;
  std::uint64_t seed = 1;

  void validate() const;
};

struct CovPoint {
  Method method = Method::DirectMonteCarlo;
  std::size_t requested_n = 0;
  double avg_samples = 0.0;
  double mean_pc = 0.0;
  double std_pc = 0.0;
  double cov = 0.0;        // std / mean
  bool undefined = false;  // mean == 0, cov not defined
};

/// Mean, sample standard deviation (n - 1) and their ratio.
CovPoint summarize(std::span<const double> estimates, std::span<const double> samples_used);

/// Expected DMC c.o.v. for probability p with n samples: sqrt((1-p)/(p n)).
double binomial_cov(double p, double n);

/// The frozen query is resolved once from `config.phase` and reused for all
/// repetitions, so only estimator randomness varies.
std::vector<CovPoint> cov_study(const CovStudyConfig& config);

/// As cov_study, on an already frozen query.
std::vector<CovPoint> cov_study(const CovStudyConfig& config, const ConflictQuery& query);

}  // namespace subsim
