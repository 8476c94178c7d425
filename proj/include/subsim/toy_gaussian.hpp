#pragma once

// Two-dimensional reference problem: probability that a standard bivariate
// normal draw lands inside a small disc far from the origin.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "subsim/random.hpp"
#include "subsim/subset_simulation.hpp"

namespace subsim::toy {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct CircleRegion {
  Point2 center;
  double radius = 1.0;

  void validate() const;
};

/// Target density of the conditional Metropolis-Hastings kernel.
/// Prior: the standard bivariate normal, so chains sample the prior
/// restricted to the current level. DiscTilt: N(C, r_c^2 I), which pulls
/// chains toward the disc centre and overstates the probability; kept to
/// reproduce the illustrative two-level run.
enum class ToyKernel { Prior, DiscTilt };

const char* to_string(ToyKernel kernel);
ToyKernel toy_kernel_from_string(const std::string& name);

/// The disc used throughout the examples: C = [3, -3], r_c = 1.
CircleRegion reference_region();

double distance_to_center(Point2 sample, const CircleRegion& region);

/// Fraction of n standard-normal draws with distance <= r_c. Draw k uses
/// substream (seed, 0, k), the same as level 0 of ss_toy.
double dmc_estimate(const CircleRegion& region, std::size_t n, std::uint64_t seed);

/// One Metropolis-Hastings chain of `length` samples grown from `seed`.
/// Candidate = current + N(0, I); candidates with distance above `threshold`
/// are rejected outright.
std::vector<Scored<Point2>> mh_chain(Point2 seed, std::size_t length,
                                     const CircleRegion& region, double threshold,
                                     Stream& rng, ToyKernel kernel = ToyKernel::Prior);

/// One chain per seed; chain j uses substream (stream_seed, j).
std::vector<std::vector<Scored<Point2>>> mh_chains(std::span<const Point2> seeds,
                                                   std::size_t length,
                                                   const CircleRegion& region,
                                                   double threshold,
                                                   std::uint64_t stream_seed,
                                                   ToyKernel kernel = ToyKernel::Prior);

/// Standard-normal mass inside the disc by polar 2D quadrature, refined until
/// successive grids agree to 1e-9 relative.
double oracle_probability(const CircleRegion& region);

class ToySystem {
 public:
  using Sample = Point2;

  explicit ToySystem(CircleRegion region, ToyKernel kernel = ToyKernel::Prior);

  Point2 draw_prior(Stream& rng) const;
  double response(const Point2& x) const;
  std::vector<Scored<Point2>> conditional_chain(const Point2& seed, double threshold,
                                                std::size_t length, Stream& rng) const;

  const CircleRegion& region() const { return region_; }
  ToyKernel kernel() const { return kernel_; }

 private:
  CircleRegion region_;
  ToyKernel kernel_;
};

SubsetResult<Point2> ss_toy(const CircleRegion& region, const SubsetConfig& config,
                            std::uint64_t seed, ToyKernel kernel = ToyKernel::Prior);

}  // namespace subsim::toy
