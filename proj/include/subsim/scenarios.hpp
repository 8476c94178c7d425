#pragma once

// Encounter geometries. Headings are measured counter-clockwise from the +x
// axis, so heading 0 deg flies along +x and 180 deg along -x.

#include <string>

#include <nlohmann/json.hpp>

#include "subsim/dynamics.hpp"
#include "subsim/tracking.hpp"

namespace subsim {

inline constexpr double kMetersPerSecondPerKnot = 1852.0 / 3600.0;
inline constexpr double kProtectedRadius = 152.4;  // 500 ft

constexpr double knots_to_mps(double knots) { return knots * kMetersPerSecondPerKnot; }

enum class EncounterKind { HeadOn, Overtaking, Converging };

std::string to_string(EncounterKind kind);
EncounterKind encounter_kind_from_string(const std::string& name);

struct ScenarioSpec {
  EncounterKind kind = EncounterKind::HeadOn;
  double lateral_separation = 0.0;       // L_a, m
  double longitudinal_separation = 2000.0;  // L_o, m
  double observer_speed = knots_to_mps(150.0);
  double intruder_speed = knots_to_mps(150.0);
  double observer_heading = 0.0;    // deg
  double intruder_heading = 180.0;  // deg
  double duration = 20.0;           // s
  double sample_rate = 20.0;        // f, Hz
  double measurement_rate = 2.0;    // f_M, Hz
  double protected_radius = kProtectedRadius;  // r_t, m
  NoiseConfig noise;
  double converging_angle = 90.0;  // deg, Converging only
  double horizon = 20.0;           // prediction horizon per query, s
  FilterInit filter_init;

  /// Throws std::invalid_argument on a spec that breaks its invariants.
  void validate() const;

  std::size_t steps() const;  // duration * sample_rate
  std::size_t measurement_interval() const;  // sample_rate / measurement_rate

  AircraftState observer_initial() const;
  AircraftState intruder_initial() const;
};

/// Observer at the origin heading 0 deg; intruder at (L_o, L_a) heading
/// 180 deg; both at 150 kn.
ScenarioSpec build_head_on(double lateral_sep, double longitudinal_sep,
                           const nlohmann::json& overrides = nlohmann::json::object());

/// Both heading 180 deg; the 300 kn intruder starts L_o behind the 150 kn
/// observer, offset L_a laterally.
ScenarioSpec build_overtaking(double lateral_sep, double longitudinal_sep = 1000.0,
                              const nlohmann::json& overrides = nlohmann::json::object());

/// Observer heading 0 deg reaches the crossing point (L_o, 0) after
/// L_o / v_o seconds. The intruder heads `angle` degrees and starts so that
/// it reaches the crossing point L_a metres (along its track) later than a
/// simultaneous arrival. Defaults are not taken from published results.
ScenarioSpec build_converging(double angle_deg, double lateral_sep = 0.0,
                              double longitudinal_sep = 2000.0,
                              const nlohmann::json& overrides = nlohmann::json::object());

void to_json(nlohmann::json& j, const ScenarioSpec& spec);
/// Missing keys keep the values already in `spec`.
void from_json(const nlohmann::json& j, ScenarioSpec& spec);

ScenarioSpec load_scenario_file(const std::string& path);

}  // namespace subsim
