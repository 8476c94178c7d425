#include "subsim/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace subsim {
namespace {

inline double planar_distance(const AircraftState& a, const AircraftState& b) {
  return std::hypot(b(state::kX) - a(state::kX), b(state::kY) - a(state::kY));
}

inline Approach make_approach(const AircraftState& observer, const AircraftState& intruder,
                              double distance, std::size_t k) {
  return {distance,
          {observer(state::kX), observer(state::kY)},
          {intruder(state::kX), intruder(state::kY)},
          k};
}

}  // namespace

StateMatrix transition_matrix(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("transition_matrix: dt must be positive");
  StateMatrix a = StateMatrix::Identity();
  for (int axis : {0, 3}) {
    a(axis, axis + 1) = dt;
    a(axis, axis + 2) = 0.5 * dt * dt;
    a(axis + 1, axis + 2) = dt;
  }
  return a;
}

std::size_t horizon_steps(double rate_hz, double horizon_s) {
  if (!(rate_hz > 0.0) || !(horizon_s > 0.0))
    throw std::invalid_argument("horizon: rate and horizon must be positive");
  const double tf = rate_hz * horizon_s;
  const double rounded = std::round(tf);
  if (std::abs(tf - rounded) > 1e-9 * std::max(1.0, rounded) || rounded < 1.0)
    throw std::invalid_argument("horizon: t * f = " + std::to_string(tf) +
                                " is not a positive integer");
  return static_cast<std::size_t>(rounded);
}

Trajectory propagate(const AircraftState& initial, double rate_hz, double horizon_s) {
  const std::size_t steps = horizon_steps(rate_hz, horizon_s);
  Trajectory traj;
  traj.dt = 1.0 / rate_hz;
  const StateMatrix a = transition_matrix(traj.dt);
  traj.states.reserve(steps + 1);
  traj.states.push_back(initial);
  for (std::size_t k = 0; k < steps; ++k) traj.states.push_back(a * traj.states.back());
  return traj;
}

Approach min_distance(const Trajectory& observer, const Trajectory& intruder) {
  if (observer.states.size() != intruder.states.size() || observer.states.empty())
    throw std::invalid_argument("min_distance: trajectories differ in length");
  if (observer.dt != intruder.dt)
    throw std::invalid_argument("min_distance: trajectories differ in time step");
  std::size_t best_k = 0;
  double best = planar_distance(observer.states[0], intruder.states[0]);
  for (std::size_t k = 1; k < observer.states.size(); ++k) {
    const double r = planar_distance(observer.states[k], intruder.states[k]);
    if (r < best) {
      best = r;
      best_k = k;
    }
  }
  return make_approach(observer.states[best_k], intruder.states[best_k], best, best_k);
}

Approach closest_approach(const Trajectory& observer, const AircraftState& intruder) {
  if (observer.states.empty() || !(observer.dt > 0.0))
    throw std::invalid_argument("closest_approach: empty observer trajectory");
  const StateMatrix a = transition_matrix(observer.dt);
  AircraftState current = intruder;
  AircraftState best_state = current;
  std::size_t best_k = 0;
  double best = planar_distance(observer.states[0], current);
  for (std::size_t k = 1; k < observer.states.size(); ++k) {
    current = a * current;
    const double r = planar_distance(observer.states[k], current);
    if (r < best) {
      best = r;
      best_k = k;
      best_state = current;
    }
  }
  return make_approach(observer.states[best_k], best_state, best, best_k);
}

}  // namespace subsim
