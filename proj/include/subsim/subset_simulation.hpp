#pragma once

// Generic Subset Simulation engine.
//
// The engine is parameterized over a RareEventSystem: something that can
// draw an input sample from the prior, map a sample to a scalar response
// (smaller = closer to failure), and grow a Metropolis-Hastings chain that
// stays inside {response <= threshold}. Level 0 is plain Monte Carlo; each
// further level keeps the N_c samples with the smallest responses as seeds
// and grows N_c chains of length N_s from them.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "subsim/random.hpp"

namespace subsim {

enum class IntervalVariant {
  Standard,  // P_n = p0^i (N - n) / N,       n = 1..N  (last entry 0)
  Shifted,   // P_{n+1} = p0^i (N - n) / N,   n = 0..N-1 (last entry p0^i / N)
};

struct SubsetConfig {
  std::size_t n_samples = 100;       // N, samples per level
  double level_probability = 0.1;    // p0
  std::size_t max_levels = 7;        // m
  IntervalVariant interval_variant = IntervalVariant::Shifted;

  /// Throws std::invalid_argument unless p0*N and 1/p0 are positive integers.
  void validate() const;

  std::size_t chains() const;        // N_c = p0 N
  std::size_t chain_length() const;  // N_s = 1 / p0
};

/// Raised when a conditional kernel breaks its contract (wrong chain length
/// or a response above the level threshold).
class KernelContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

template <class Sample>
struct Scored {
  Sample sample;
  double response = 0.0;
};

template <class Sample>
struct CcdfRow {
  double probability = 0.0;
  double response = 0.0;
  Sample sample;
  std::size_t level = 0;
};

template <class Sample>
struct CcdfTable {
  std::vector<CcdfRow<Sample>> rows;
  std::size_t levels_completed = 0;
};

/// One level's sorted responses and samples plus its probability intervals.
template <class Sample>
struct LevelBlock {
  std::size_t level = 0;
  std::vector<double> intervals;
  std::vector<Scored<Sample>> rows;  // descending response
};

struct SubsetDiagnostics {
  std::size_t levels_completed = 0;
  std::size_t conflict_count = 0;  // D on the final level
  std::size_t samples_used = 0;    // N * levels_completed
  bool floor_reached = false;      // D == 0 after the last level
  std::vector<double> thresholds;  // b_1, b_2, ...
  std::size_t stalled_levels = 0;  // levels where b_i == b_{i-1}
};

template <class Sample>
struct SubsetResult {
  double estimate = 0.0;
  CcdfTable<Sample> table;
  SubsetDiagnostics diagnostics;
};

// clang-format off
template <class S>
concept RareEventSystem = requires(const S& sys, Stream& rng,
                                   const typename S::Sample& x,
                                   double threshold, std::size_t length) {
  { sys.draw_prior(rng) } -> std::convertible_to<typename S::Sample>;
  { sys.response(x) } -> std::convertible_to<double>;
  { sys.conditional_chain(x, threshold, length, rng) }
      -> std::convertible_to<std::vector<Scored<typename S::Sample>>>;
};
// clang-format on

std::vector<double> probability_intervals(std::size_t level, const SubsetConfig& config);

/// b_i = B^{(i-1)}_{N-N_c}: the (N - N_c)-th entry (1-based) of the previous
/// level's descending responses.
double intermediate_threshold(std::span<const double> sorted_responses,
                              const SubsetConfig& config);

/// Number of levels needed to reach `target` with level probability p0,
/// i.e. the smallest m with p0^m <= target.
std::size_t levels_for_target(double target, double level_probability);

/// Read-off of the probability for D failing samples on the final level.
/// D > 0 gives P_{N-D+1}; D == 0 gives the last interval P_N.
double estimate_probability(std::span<const double> final_intervals,
                            std::size_t conflict_count);

template <class Sample>
std::vector<double> responses_of(std::span<const Scored<Sample>> rows) {
  std::vector<double> out(rows.size());
  std::transform(rows.begin(), rows.end(), out.begin(),
                 [](const auto& r) { return r.response; });
  return out;
}

/// Stable descending sort; ties keep draw order.
template <class Sample>
void sort_descending(std::vector<Scored<Sample>>& rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.response > b.response; });
}

/// The last N_c entries of a level sorted by descending response.
template <class Sample>
std::vector<Sample> select_seeds(std::span<const Scored<Sample>> sorted,
                                 const SubsetConfig& config) {
  if (sorted.size() != config.n_samples)
    throw std::invalid_argument("select_seeds: expected " +
                                std::to_string(config.n_samples) + " samples, got " +
                                std::to_string(sorted.size()));
  const std::size_t nc = config.chains();
  std::vector<Sample> seeds;
  seeds.reserve(nc);
  for (std::size_t n = sorted.size() - nc; n < sorted.size(); ++n)
    seeds.push_back(sorted[n].sample);
  return seeds;
}

/// Concatenates level blocks, dropping the N_c seed rows of every non-final
/// level.
template <class Sample>
CcdfTable<Sample> assemble_ccdf(std::span<const LevelBlock<Sample>> blocks,
                                const SubsetConfig& config) {
  if (blocks.empty()) throw std::invalid_argument("assemble_ccdf: no level blocks");
  const std::size_t n = config.n_samples;
  const std::size_t nc = config.chains();
  CcdfTable<Sample> table;
  table.levels_completed = blocks.size();
  table.rows.reserve(n + (blocks.size() - 1) * (n - nc));
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& block = blocks[b];
    if (block.rows.size() != n || block.intervals.size() != n)
      throw std::invalid_argument("assemble_ccdf: block " + std::to_string(b) +
                                  " does not hold N rows");
    if (block.level != b)
      throw std::invalid_argument("assemble_ccdf: blocks out of level order");
    const std::size_t keep = (b + 1 == blocks.size()) ? n : n - nc;
    for (std::size_t k = 0; k < keep; ++k)
      table.rows.push_back({block.intervals[k], block.rows[k].response,
                            block.rows[k].sample, block.level});
  }
  return table;
}

/// Table form of the read-off: the final level occupies the last N rows.
template <class Sample>
double estimate_probability(const CcdfTable<Sample>& table, std::size_t conflict_count,
                            std::size_t final_level, const SubsetConfig& config) {
  const std::size_t n = config.n_samples;
  if (table.rows.size() < n || table.levels_completed != final_level + 1)
    throw std::invalid_argument("estimate_probability: table does not end at level " +
                                std::to_string(final_level));
  std::vector<double> intervals(n);
  for (std::size_t k = 0; k < n; ++k)
    intervals[k] = table.rows[table.rows.size() - n + k].probability;
  return estimate_probability(intervals, conflict_count);
}

template <class Sample>
std::size_t count_failures(std::span<const Scored<Sample>> rows, double failure_threshold) {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(),
                    [&](const auto& r) { return r.response <= failure_threshold; }));
}

/// Level-0 draws. Draw n uses substream (seed, 0, n), so a Direct Monte Carlo
/// run with the same seed sees exactly the same samples.
template <RareEventSystem System>
std::vector<Scored<typename System::Sample>> draw_level_zero(const System& system,
                                                             std::size_t n,
                                                             std::uint64_t seed) {
  std::vector<Scored<typename System::Sample>> rows;
  rows.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Stream rng(seed, {0, k});
    auto x = system.draw_prior(rng);
    const double r = system.response(x);
    rows.push_back({std::move(x), r});
  }
  return rows;
}

template <RareEventSystem System>
SubsetResult<typename System::Sample> run_subset_simulation(const System& system,
                                                            const SubsetConfig& config,
                                                            double failure_threshold,
                                                            std::uint64_t seed) {
  using Sample = typename System::Sample;
  config.validate();
  const std::size_t n = config.n_samples;
  const std::size_t nc = config.chains();
  const std::size_t ns = config.chain_length();

  std::vector<LevelBlock<Sample>> blocks;
  blocks.reserve(config.max_levels);

  LevelBlock<Sample> current{0, probability_intervals(0, config),
                             draw_level_zero(system, n, seed)};
  sort_descending(current.rows);
  std::size_t failures = count_failures<Sample>(current.rows, failure_threshold);
  blocks.push_back(std::move(current));

  SubsetDiagnostics diag;
  std::size_t level = 0;
  while (failures < nc && level + 1 < config.max_levels) {
    ++level;
    const auto& prev = blocks.back();
    const auto prev_responses = responses_of<Sample>(prev.rows);
    const double threshold = intermediate_threshold(prev_responses, config);
    if (!diag.thresholds.empty() && threshold >= diag.thresholds.back())
      ++diag.stalled_levels;
    diag.thresholds.push_back(threshold);

    const auto seeds = select_seeds<Sample>(prev.rows, config);
    LevelBlock<Sample> next{level, probability_intervals(level, config), {}};
    next.rows.reserve(n);
    for (std::size_t j = 0; j < nc; ++j) {
      Stream rng(seed, {level, j});
      auto chain = system.conditional_chain(seeds[j], threshold, ns, rng);
      if (chain.size() != ns)
        throw KernelContractError("conditional chain returned " +
                                  std::to_string(chain.size()) + " samples, expected " +
                                  std::to_string(ns));
      for (auto& entry : chain) {
        if (!(entry.response <= threshold))
          throw KernelContractError("conditional chain response above level threshold");
        next.rows.push_back(std::move(entry));
      }
    }
    sort_descending(next.rows);
    failures = count_failures<Sample>(next.rows, failure_threshold);
    blocks.push_back(std::move(next));
  }

  SubsetResult<Sample> result;
  result.estimate = estimate_probability(blocks.back().intervals, failures);
  result.table = assemble_ccdf<Sample>(blocks, config);
  diag.levels_completed = blocks.size();
  diag.conflict_count = failures;
  diag.samples_used = n * blocks.size();
  diag.floor_reached = failures == 0;
  result.diagnostics = std::move(diag);
  return result;
}

}  // namespace subsim
