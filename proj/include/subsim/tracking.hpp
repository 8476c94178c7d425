#pragma once

// Noisy position measurements of the intruder and a linear Kalman filter over
// the nearly-constant-acceleration model.

#include <optional>
#include <stdexcept>

#include <Eigen/Core>

#include "subsim/dynamics.hpp"
#include "subsim/random.hpp"

namespace subsim {

struct NoiseConfig {
  double sigma_x = 0.1;     // measurement noise std, m
  double sigma_y = 0.1;     // measurement noise std, m
  double sigma_ax2 = 0.01;  // acceleration variance, m^2 s^-4
  double sigma_ay2 = 0.01;

  void validate() const;
};

/// Filter start-up. The initial covariance is diagonal with these standard
/// deviations per axis.
struct FilterInit {
  double position_std = 10.0;     // m
  double velocity_std = 5.0;      // m/s
  double acceleration_std = 1.0;  // m/s^2
  bool perfect_init = false;      // mean = truth exactly

  void validate() const;
};

struct KalmanEstimate {
  AircraftState mean = AircraftState::Zero();
  StateMatrix covariance = StateMatrix::Zero();
};

struct Measurement {
  double x = 0.0;
  double y = 0.0;
};

using MeasurementMatrix = Eigen::Matrix<double, 2, 6>;

class SingularInnovationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// White-noise-jerk process noise: per axis Q_sigma(dt) * sigma_a^2 / dt.
StateMatrix process_noise(double dt, const NoiseConfig& noise);

/// Selects (x, y) from the state.
MeasurementMatrix measurement_matrix();

Measurement simulate_measurement(const AircraftState& truth, const NoiseConfig& noise,
                                 Stream& rng);

/// Predict, then update when a measurement is present. The covariance is
/// symmetrised after each stage.
KalmanEstimate kf_step(const KalmanEstimate& estimate,
                       const std::optional<Measurement>& measurement, double dt,
                       const NoiseConfig& noise);

/// Mean = truth with one measurement-noise draw on position (or exact truth
/// under perfect_init); covariance = diag of FilterInit variances.
KalmanEstimate initial_estimate(const AircraftState& truth, const NoiseConfig& noise,
                                const FilterInit& init, Stream& rng);

}  // namespace subsim
