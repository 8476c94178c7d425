#include "subsim/subset_simulation.hpp"

#include <cmath>
#include <functional>

namespace subsim {
namespace {

// p0 * N and 1 / p0 are computed in floating point; accept values within a
// few ulps of an integer.
bool near_integer(double x, std::size_t& out) {
  const double r = std::round(x);
  if (r < 1.0 || std::abs(x - r) > 1e-9 * std::max(1.0, r)) return false;
  out = static_cast<std::size_t>(r);
  return true;
}

}  // namespace

void SubsetConfig::validate() const {
  if (n_samples == 0) throw std::invalid_argument("SubsetConfig: N must be positive");
  if (!(level_probability > 0.0 && level_probability < 1.0))
    throw std::invalid_argument("SubsetConfig: p0 must lie in (0, 1)");
  if (max_levels == 0) throw std::invalid_argument("SubsetConfig: m must be positive");
  std::size_t nc = 0, ns = 0;
  if (!near_integer(level_probability * static_cast<double>(n_samples), nc))
    throw std::invalid_argument("SubsetConfig: p0 * N must be a positive integer");
  if (!near_integer(1.0 / level_probability, ns))
    throw std::invalid_argument("SubsetConfig: 1 / p0 must be a positive integer");
  if (nc * ns != n_samples)
    throw std::invalid_argument("SubsetConfig: N_c * N_s must equal N");
}

std::size_t SubsetConfig::chains() const {
  return static_cast<std::size_t>(
      std::llround(level_probability * static_cast<double>(n_samples)));
}

std::size_t SubsetConfig::chain_length() const {
  return static_cast<std::size_t>(std::llround(1.0 / level_probability));
}

std::vector<double> probability_intervals(std::size_t level, const SubsetConfig& config) {
  config.validate();
  if (level >= config.max_levels)
    throw std::out_of_range("probability_intervals: level " + std::to_string(level) +
                            " >= max_levels " + std::to_string(config.max_levels));
  const std::size_t n = config.n_samples;
  // p0^i / N = 1 / (N * N_s^i); one division keeps every entry correctly
  // rounded, so the floor at level 6 with N = 100 is the double nearest 1e-8.
  const double denominator = static_cast<double>(n) *
                             std::pow(static_cast<double>(config.chain_length()),
                                      static_cast<double>(level));
  std::vector<double> out(n);
  // out[k] holds the 1-based entry k + 1.
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t offset =
        config.interval_variant == IntervalVariant::Standard ? k + 1 : k;
    out[k] = static_cast<double>(n - offset) / denominator;
  }
  return out;
}

double intermediate_threshold(std::span<const double> sorted_responses,
                              const SubsetConfig& config) {
  const std::size_t n = config.n_samples;
  if (sorted_responses.size() != n)
    throw std::invalid_argument("intermediate_threshold: expected " + std::to_string(n) +
                                " responses, got " +
                                std::to_string(sorted_responses.size()));
  if (!std::is_sorted(sorted_responses.begin(), sorted_responses.end(), std::greater<>{}))
    throw std::invalid_argument("intermediate_threshold: responses not sorted descending");
  return sorted_responses[n - config.chains() - 1];
}

std::size_t levels_for_target(double target, double level_probability) {
  if (!(target > 0.0 && target < 1.0) ||
      !(level_probability > 0.0 && level_probability < 1.0))
    throw std::invalid_argument("levels_for_target: arguments must lie in (0, 1)");
  const double m = std::log(target) / std::log(level_probability);
  return static_cast<std::size_t>(std::ceil(m - 1e-9));
}

double estimate_probability(std::span<const double> final_intervals,
                            std::size_t conflict_count) {
  const std::size_t n = final_intervals.size();
  if (n == 0) throw std::invalid_argument("estimate_probability: empty interval vector");
  if (conflict_count > n)
    throw std::invalid_argument("estimate_probability: D > N");
  if (conflict_count == 0) return final_intervals[n - 1];
  return final_intervals[n - conflict_count];
}

}  // namespace subsim
