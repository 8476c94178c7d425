#pragma once

// Nearly-constant-acceleration point-mass kinematics in the horizontal plane.
// State ordering is [x, u, a_x, y, v, a_y] (m, m/s, m/s^2).

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace subsim {

using AircraftState = Eigen::Matrix<double, 6, 1>;
using StateMatrix = Eigen::Matrix<double, 6, 6>;

namespace state {
inline constexpr int kX = 0;
inline constexpr int kU = 1;
inline constexpr int kAx = 2;
inline constexpr int kY = 3;
inline constexpr int kV = 4;
inline constexpr int kAy = 5;
}  // namespace state

struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;
};

struct Trajectory {
  std::vector<AircraftState> states;  // k = 0 .. t*f
  double dt = 0.0;
};

/// Closest point of approach between two equally sampled trajectories.
struct Approach {
  double miss_distance = 0.0;
  PlanarPoint observer_point;
  PlanarPoint intruder_point;
  std::size_t step_index = 0;
};

StateMatrix transition_matrix(double dt);

/// Number of steps t*f; throws unless it is a positive integer.
std::size_t horizon_steps(double rate_hz, double horizon_s);

/// J(0) = initial, J(k+1) = A J(k), for k = 0 .. t*f - 1.
Trajectory propagate(const AircraftState& initial, double rate_hz, double horizon_s);

/// Pointwise planar distance minimum; ties go to the smallest index.
Approach min_distance(const Trajectory& observer, const Trajectory& intruder);

/// Same result as min_distance(observer, propagate(intruder, ...)) without
/// materialising the intruder trajectory.
Approach closest_approach(const Trajectory& observer, const AircraftState& intruder);

}  // namespace subsim
