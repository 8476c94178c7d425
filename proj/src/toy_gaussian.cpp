#include "subsim/toy_gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace subsim::toy {
namespace {

double sq(double v) { return v * v; }

// log of an isotropic 2D Gaussian density, up to the shared constant.
double log_isotropic(Point2 x, Point2 mean, double variance) {
  return -(sq(x.x - mean.x) + sq(x.y - mean.y)) / (2.0 * variance);
}

}  // namespace

const char* to_string(ToyKernel kernel) {
  return kernel == ToyKernel::Prior ? "prior" : "disc-tilt";
}

ToyKernel toy_kernel_from_string(const std::string& name) {
  if (name == "prior") return ToyKernel::Prior;
  if (name == "disc-tilt") return ToyKernel::DiscTilt;
  throw std::invalid_argument("unknown toy kernel '" + name + "' (prior|disc-tilt)");
}

void CircleRegion::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("CircleRegion: radius must be positive and finite");
  if (!std::isfinite(center.x) || !std::isfinite(center.y))
    throw std::invalid_argument("CircleRegion: center must be finite");
}

CircleRegion reference_region() { return {{3.0, -3.0}, 1.0}; }

double distance_to_center(Point2 sample, const CircleRegion& region) {
  return std::hypot(sample.x - region.center.x, sample.y - region.center.y);
}

double dmc_estimate(const CircleRegion& region, std::size_t n, std::uint64_t seed) {
  region.validate();
  if (n == 0) throw std::invalid_argument("dmc_estimate: n must be at least 1");
  const ToySystem system(region);
  std::size_t inside = 0;
  for (std::size_t k = 0; k < n; ++k) {
    Stream rng(seed, {0, k});
    if (system.response(system.draw_prior(rng)) <= region.radius) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(n);
}

std::vector<Scored<Point2>> mh_chain(Point2 seed, std::size_t length,
                                     const CircleRegion& region, double threshold,
                                     Stream& rng, ToyKernel kernel) {
  double current_r = distance_to_center(seed, region);
  if (!(current_r <= threshold))
    throw std::invalid_argument("mh_chain: seed distance " + std::to_string(current_r) +
                                " exceeds threshold " + std::to_string(threshold));
  const Point2 target_mean = kernel == ToyKernel::Prior ? Point2{} : region.center;
  const double target_var = kernel == ToyKernel::Prior ? 1.0 : sq(region.radius);
  constexpr double proposal_var = 1.0;

  std::vector<Scored<Point2>> chain;
  chain.reserve(length);
  Point2 current = seed;
  for (std::size_t k = 0; k < length; ++k) {
    const Point2 candidate{current.x + rng.normal(), current.y + rng.normal()};
    const double candidate_r = distance_to_center(candidate, region);
    const bool inside = candidate_r <= threshold;

    const double log_q = log_isotropic(candidate, current, proposal_var) -
                         log_isotropic(current, candidate, proposal_var);
    const double log_p = log_isotropic(candidate, target_mean, target_var) -
                         log_isotropic(current, target_mean, target_var);
    const double alpha = inside ? std::min(1.0, std::exp(log_q + log_p)) : 0.0;
    const double e = rng.uniform();
    if (e < alpha) {
      current = candidate;
      current_r = candidate_r;
    }
    chain.push_back({current, current_r});
  }
  return chain;
}

std::vector<std::vector<Scored<Point2>>> mh_chains(std::span<const Point2> seeds,
                                                   std::size_t length,
                                                   const CircleRegion& region,
                                                   double threshold,
                                                   std::uint64_t stream_seed,
                                                   ToyKernel kernel) {
  region.validate();
  std::vector<std::vector<Scored<Point2>>> chains;
  chains.reserve(seeds.size());
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    Stream rng(stream_seed, {j});
    chains.push_back(mh_chain(seeds[j], length, region, threshold, rng, kernel));
  }
  return chains;
}

double oracle_probability(const CircleRegion& region) {
  region.validate();
  // Polar coordinates about the disc centre. Beyond ~12 standard deviations
  // from the origin the density is below 1e-31, so the radial range is
  // clipped there.
  const double d = std::hypot(region.center.x, region.center.y);
  const double rho_max = std::min(region.radius, d + 12.0);
  const double rho_min = std::max(0.0, d - 12.0);
  if (rho_min >= rho_max) return 0.0;

  auto integrate = [&](std::size_t n_rho, std::size_t n_theta) {
    // Composite Simpson in rho, periodic trapezoid in theta.
    const double h = (rho_max - rho_min) / static_cast<double>(n_rho);
    const double dtheta = 2.0 * std::numbers::pi / static_cast<double>(n_theta);
    double total = 0.0;
    for (std::size_t i = 0; i <= n_rho; ++i) {
      const double rho = rho_min + h * static_cast<double>(i);
      double ring = 0.0;
      for (std::size_t j = 0; j < n_theta; ++j) {
        const double theta = dtheta * static_cast<double>(j);
        const double x = region.center.x + rho * std::cos(theta);
        const double y = region.center.y + rho * std::sin(theta);
        ring += std::exp(-0.5 * (x * x + y * y));
      }
      ring *= dtheta * rho / (2.0 * std::numbers::pi);
      const double w = (i == 0 || i == n_rho) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      total += w * ring;
    }
    return total * h / 3.0;
  };

  std::size_t n_rho = 64;
  std::size_t n_theta = 64;
  double previous = integrate(n_rho, n_theta);
  for (int refinement = 0; refinement < 10; ++refinement) {
    n_rho *= 2;
    n_theta *= 2;
    const double next = integrate(n_rho, n_theta);
    if (std::abs(next - previous) <= 1e-9 * std::abs(next)) return std::min(next, 1.0);
    previous = next;
  }
  return std::min(previous, 1.0);
}

ToySystem::ToySystem(CircleRegion region, ToyKernel kernel)
    : region_(region), kernel_(kernel) {
  region_.validate();
}

Point2 ToySystem::draw_prior(Stream& rng) const {
  const double x = rng.normal();
  const double y = rng.normal();
  return {x, y};
}

double ToySystem::response(const Point2& x) const { return distance_to_center(x, region_); }

std::vector<Scored<Point2>> ToySystem::conditional_chain(const Point2& seed,
                                                         double threshold,
                                                         std::size_t length,
                                                         Stream& rng) const {
  return mh_chain(seed, length, region_, threshold, rng, kernel_);
}

SubsetResult<Point2> ss_toy(const CircleRegion& region, const SubsetConfig& config,
                            std::uint64_t seed, ToyKernel kernel) {
  const ToySystem system(region, kernel);
  return run_subset_simulation(system, config, region.radius, seed);
}

}  // namespace subsim::toy
