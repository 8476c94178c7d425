#include "subsim/analysis.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace subsim {

std::string to_string(Method method) {
  return method == Method::DirectMonteCarlo ? "dmc" : "ss";
}

std::size_t Phase::step_index() const {
  return static_cast<std::size_t>(std::llround(time * scenario.sample_rate));
}

Phase phase_p1() {
  return {"p1", build_head_on(kProtectedRadius, 2000.0), 1.0};
}

Phase phase_p2() {
  auto spec = build_head_on(1000.0, 20000.0, {{"duration", 200.0}, {"horizon", 200.0}});
  return {"p2", spec, 100.0};
}

Phase phase_by_name(const std::string& name) {
  if (name == "p1") return phase_p1();
  if (name == "p2") return phase_p2();
  throw std::invalid_argument("unknown phase '" + name + "' (expected p1 or p2)");
}

void CovStudyConfig::validate() const {
  if (repetitions < 2)
    throw std::invalid_argument("cov study: at least 2 repetitions are needed");
  for (auto n : dmc_sizes)
    if (n == 0) throw std::invalid_argument("cov study: DMC sizes must be positive");
  for (auto n : ss_sizes)
    SubsetConfig{n, level_probability, max_levels, IntervalVariant::Shifted}.validate();
  phase.scenario.validate();
  if (phase.step_index() == 0 || phase.step_index() > phase.scenario.steps())
    throw std::invalid_argument("cov study: phase time outside the scenario");
}

CovPoint summarize(std::span<const double> estimates, std::span<const double> samples_used) {
  if (estimates.size() < 2 || samples_used.size() != estimates.size())
    throw std::invalid_argument("summarize: need at least two paired estimates");
  const double n = static_cast<double>(estimates.size());
  CovPoint point;
  point.mean_pc = std::accumulate(estimates.begin(), estimates.end(), 0.0) / n;
  point.avg_samples = std::accumulate(samples_used.begin(), samples_used.end(), 0.0) / n;
  double ss = 0.0;
  for (double e : estimates) ss += (e - point.mean_pc) * (e - point.mean_pc);
  point.std_pc = std::sqrt(ss / (n - 1.0));
  point.undefined = !(point.mean_pc > 0.0);
  point.cov = point.undefined ? std::nan("") : point.std_pc / point.mean_pc;
  return point;
}

double binomial_cov(double p, double n) {
  if (!(p > 0.0 && p <= 1.0) || !(n > 0.0))
    throw std::invalid_argument("binomial_cov: need 0 < p <= 1 and n > 0");
  return std::sqrt((1.0 - p) / (p * n));
}

std::vector<CovPoint> cov_study(const CovStudyConfig& config) {
  config.validate();
  return cov_study(config, freeze_query(config.phase.scenario, config.phase.step_index(),
                                        config.seed));
}

std::vector<CovPoint> cov_study(const CovStudyConfig& config, const ConflictQuery& query) {
  if (config.repetitions < 2)
    throw std::invalid_argument("cov study: at least 2 repetitions are needed");
  std::vector<CovPoint> points;
  std::vector<double> estimates(config.repetitions);
  std::vector<double> samples(config.repetitions);

  for (std::size_t size_idx = 0; size_idx < config.dmc_sizes.size(); ++size_idx) {
    const std::size_t n = config.dmc_sizes[size_idx];
    for (std::size_t r = 0; r < config.repetitions; ++r) {
      const auto res = pc_dmc(query, n, derive_seed(config.seed, {0, size_idx, r}));
      estimates[r] = res.pc;
      samples[r] = static_cast<double>(res.samples_used);
    }
    auto point = summarize(estimates, samples);
    point.method = Method::DirectMonteCarlo;
    point.requested_n = n;
    points.push_back(point);
  }

  for (std::size_t size_idx = 0; size_idx < config.ss_sizes.size(); ++size_idx) {
    const SubsetConfig ss{config.ss_sizes[size_idx], config.level_probability,
                          config.max_levels, IntervalVariant::Shifted};
    for (std::size_t r = 0; r < config.repetitions; ++r) {
      const auto res = pc_ss(query, ss, derive_seed(config.seed, {1, size_idx, r}));
      estimates[r] = res.result.pc;
      samples[r] = static_cast<double>(res.result.samples_used);
    }
    auto point = summarize(estimates, samples);
    point.method = Method::SubsetSimulation;
    point.requested_n = ss.n_samples;
    points.push_back(point);
  }
  return points;
}

}  // namespace subsim
