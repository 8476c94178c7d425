#pragma once

// Hand-written covariance recursion for one axis (position, velocity,
// acceleration) of the nearly-constant-acceleration filter. Plain doubles
// and loops only; shares no code with the library filter.

#include <cstddef>
#include <vector>

namespace riccati {

struct Channel {
  double dt = 0.05;
  double accel_var = 0.01;  // sigma_a^2
  double meas_var = 0.01;   // sigma^2 of the position measurement
};

using Mat3 = double[3][3];

inline void predict(Mat3 p, const Channel& c) {
  const double t = c.dt;
  const double f[3][3] = {{1, t, t * t / 2}, {0, 1, t}, {0, 0, 1}};
  const double s = c.accel_var / t;
  const double q[3][3] = {{s * t * t * t * t * t / 20, s * t * t * t * t / 8, s * t * t * t / 6},
                          {s * t * t * t * t / 8, s * t * t * t / 3, s * t * t / 2},
                          {s * t * t * t / 6, s * t * t / 2, s * t}};
  double fp[3][3] = {};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) fp[i][j] += f[i][k] * p[k][j];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double v = q[i][j];
      for (int k = 0; k < 3; ++k) v += fp[i][k] * f[j][k];
      p[i][j] = v;
    }
}

// Position measurement: gain k = P[:,0] / (P00 + r), P <- P - k P[0,:].
inline void update(Mat3 p, const Channel& c) {
  const double s = p[0][0] + c.meas_var;
  double k[3], row[3];
  for (int i = 0; i < 3; ++i) {
    k[i] = p[i][0] / s;
    row[i] = p[0][i];
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) p[i][j] -= k[i] * row[j];
}

/// Position variance after each step (predict, then update every
/// `interval`-th step, counting from 1).
inline std::vector<double> position_variance(const Channel& c, double p0, double v0,
                                             double a0, std::size_t steps,
                                             std::size_t interval) {
  double p[3][3] = {{p0, 0, 0}, {0, v0, 0}, {0, 0, a0}};
  std::vector<double> out;
  out.reserve(steps);
  for (std::size_t k = 1; k <= steps; ++k) {
    predict(p, c);
    if (k % interval == 0) update(p, c);
    out.push_back(p[0][0]);
  }
  return out;
}

}  // namespace riccati
