#include "subsim/tracking.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace subsim {
namespace {

void symmetrize(StateMatrix& m) { m = 0.5 * (m + m.transpose()).eval(); }

bool non_negative_finite(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void NoiseConfig::validate() const {
  if (!non_negative_finite(sigma_x) || !non_negative_finite(sigma_y) ||
      !non_negative_finite(sigma_ax2) || !non_negative_finite(sigma_ay2))
    throw std::invalid_argument("NoiseConfig: all noise parameters must be >= 0");
}

void FilterInit::validate() const {
  if (!non_negative_finite(position_std) || !non_negative_finite(velocity_std) ||
      !non_negative_finite(acceleration_std))
    throw std::invalid_argument("FilterInit: standard deviations must be >= 0");
}

StateMatrix process_noise(double dt, const NoiseConfig& noise) {
  if (!(dt > 0.0)) throw std::invalid_argument("process_noise: dt must be positive");
  noise.validate();
  const double dt2 = dt * dt;
  const double dt3 = dt2 * dt;
  Eigen::Matrix3d block;
  block << dt2 * dt3 / 20.0, dt2 * dt2 / 8.0, dt3 / 6.0,  //
      dt2 * dt2 / 8.0, dt3 / 3.0, dt2 / 2.0,              //
      dt3 / 6.0, dt2 / 2.0, dt;
  StateMatrix q = StateMatrix::Zero();
  q.topLeftCorner<3, 3>() = block * (noise.sigma_ax2 / dt);
  q.bottomRightCorner<3, 3>() = block * (noise.sigma_ay2 / dt);
  return q;
}

MeasurementMatrix measurement_matrix() {
  MeasurementMatrix h = MeasurementMatrix::Zero();
  h(0, state::kX) = 1.0;
  h(1, state::kY) = 1.0;
  return h;
}

Measurement simulate_measurement(const AircraftState& truth, const NoiseConfig& noise,
                                 Stream& rng) {
  noise.validate();
  const Eigen::Vector2d z = measurement_matrix() * truth;
  const double wx = noise.sigma_x * rng.normal();
  const double wy = noise.sigma_y * rng.normal();
  return {z(0) + wx, z(1) + wy};
}

KalmanEstimate kf_step(const KalmanEstimate& estimate,
                       const std::optional<Measurement>& measurement, double dt,
                       const NoiseConfig& noise) {
  const StateMatrix a = transition_matrix(dt);
  KalmanEstimate next;
  next.mean = a * estimate.mean;
  next.covariance = a * estimate.covariance * a.transpose() + process_noise(dt, noise);
  symmetrize(next.covariance);
  if (!measurement) return next;

  const MeasurementMatrix h = measurement_matrix();
  const Eigen::Matrix2d r =
      Eigen::Vector2d(noise.sigma_x * noise.sigma_x, noise.sigma_y * noise.sigma_y)
          .asDiagonal();
  const Eigen::Matrix2d innovation_cov = h * next.covariance * h.transpose() + r;
  const double det = innovation_cov.determinant();
  const double scale = innovation_cov.diagonal().cwiseAbs().prod();
  if (!std::isfinite(det) || det <= 1e-14 * scale || scale == 0.0)
    throw SingularInnovationError("kf_step: innovation covariance is singular");
  const Eigen::Matrix<double, 6, 2> gain =
      next.covariance * h.transpose() * innovation_cov.inverse();
  const Eigen::Vector2d innovation =
      Eigen::Vector2d(measurement->x, measurement->y) - h * next.mean;
  next.mean += gain * innovation;
  next.covariance = (StateMatrix::Identity() - gain * h) * next.covariance;
  symmetrize(next.covariance);
  return next;
}

KalmanEstimate initial_estimate(const AircraftState& truth, const NoiseConfig& noise,
                                const FilterInit& init, Stream& rng) {
  init.validate();
  KalmanEstimate est;
  est.mean = truth;
  if (!init.perfect_init) {
    const Measurement z = simulate_measurement(truth, noise, rng);
    est.mean(state::kX) = z.x;
    est.mean(state::kY) = z.y;
  }
  const double p = init.position_std * init.position_std;
  const double v = init.velocity_std * init.velocity_std;
  const double acc = init.acceleration_std * init.acceleration_std;
  AircraftState diag;
  diag << p, v, acc, p, v, acc;
  est.covariance = diag.asDiagonal();
  return est;
}

}  // namespace subsim
