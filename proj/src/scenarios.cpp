#include "subsim/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace subsim {
namespace {

double radians(double deg) { return deg * std::numbers::pi / 180.0; }

AircraftState moving_state(double x, double y, double speed, double heading_deg) {
  AircraftState s;
  s << x, speed * std::cos(radians(heading_deg)), 0.0, y,
      speed * std::sin(radians(heading_deg)), 0.0;
  return s;
}

bool integral_ratio(double num, double den) {
  const double q = num / den;
  return q >= 1.0 && std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, q);
}

ScenarioSpec with_overrides(ScenarioSpec spec, const nlohmann::json& overrides) {
  if (!overrides.is_object())
    throw std::invalid_argument("scenario overrides must be a JSON object");
  from_json(overrides, spec);
  spec.validate();
  return spec;
}

void require_separations(double lateral, double longitudinal) {
  if (!(lateral >= 0.0) || !(longitudinal >= 0.0))
    throw std::invalid_argument("separations must be non-negative");
}

}  // namespace

std::string to_string(EncounterKind kind) {
  switch (kind) {
    case EncounterKind::HeadOn: return "head-on";
    case EncounterKind::Overtaking: return "overtaking";
    case EncounterKind::Converging: return "converging";
  }
  return "unknown";
}

EncounterKind encounter_kind_from_string(const std::string& name) {
  if (name == "head-on") return EncounterKind::HeadOn;
  if (name == "overtaking") return EncounterKind::Overtaking;
  if (name == "converging") return EncounterKind::Converging;
  throw std::invalid_argument("unknown encounter kind '" + name + "'");
}

void ScenarioSpec::validate() const {
  if (!(lateral_separation >= 0.0) || !(longitudinal_separation >= 0.0))
    throw std::invalid_argument("ScenarioSpec: separations must be non-negative");
  if (!(observer_speed > 0.0) || !(intruder_speed > 0.0))
    throw std::invalid_argument("ScenarioSpec: speeds must be positive");
  if (!(sample_rate > 0.0) || !(measurement_rate > 0.0))
    throw std::invalid_argument("ScenarioSpec: rates must be positive");
  if (!(duration > 0.0) || !integral_ratio(duration * sample_rate, 1.0))
    throw std::invalid_argument("ScenarioSpec: duration * sample_rate must be a positive integer");
  if (!(horizon > 0.0) || !integral_ratio(horizon * sample_rate, 1.0))
    throw std::invalid_argument("ScenarioSpec: horizon * sample_rate must be a positive integer");
  if (!integral_ratio(sample_rate, measurement_rate))
    throw std::invalid_argument("ScenarioSpec: sample_rate must be a multiple of measurement_rate");
  if (!(protected_radius > 0.0))
    throw std::invalid_argument("ScenarioSpec: protected_radius must be positive");
  if (kind == EncounterKind::Converging &&
      !(converging_angle > 0.0 && converging_angle < 180.0))
    throw std::invalid_argument("ScenarioSpec: converging_angle must lie in (0, 180)");
  noise.validate();
  filter_init.validate();
}

std::size_t ScenarioSpec::steps() const {
  return static_cast<std::size_t>(std::llround(duration * sample_rate));
}

std::size_t ScenarioSpec::measurement_interval() const {
  return static_cast<std::size_t>(std::llround(sample_rate / measurement_rate));
}

AircraftState ScenarioSpec::observer_initial() const {
  return moving_state(0.0, 0.0, observer_speed, observer_heading);
}

AircraftState ScenarioSpec::intruder_initial() const {
  if (kind != EncounterKind::Converging)
    return moving_state(longitudinal_separation, lateral_separation, intruder_speed,
                        intruder_heading);
  const double h = radians(observer_heading);
  const double cross_x = longitudinal_separation * std::cos(h);
  const double cross_y = longitudinal_separation * std::sin(h);
  const double arrival = longitudinal_separation / observer_speed;
  const double back = intruder_speed * arrival + lateral_separation;
  const double hi = radians(intruder_heading);
  return moving_state(cross_x - back * std::cos(hi), cross_y - back * std::sin(hi),
                      intruder_speed, intruder_heading);
}

ScenarioSpec build_head_on(double lateral_sep, double longitudinal_sep,
                           const nlohmann::json& overrides) {
  require_separations(lateral_sep, longitudinal_sep);
  ScenarioSpec spec;
  spec.kind = EncounterKind::HeadOn;
  spec.lateral_separation = lateral_sep;
  spec.longitudinal_separation = longitudinal_sep;
  return with_overrides(spec, overrides);
}

ScenarioSpec build_overtaking(double lateral_sep, double longitudinal_sep,
                              const nlohmann::json& overrides) {
  require_separations(lateral_sep, longitudinal_sep);
  ScenarioSpec spec;
  spec.kind = EncounterKind::Overtaking;
  spec.lateral_separation = lateral_sep;
  spec.longitudinal_separation = longitudinal_sep;
  spec.observer_heading = 180.0;
  spec.intruder_heading = 180.0;
  spec.intruder_speed = knots_to_mps(300.0);
  return with_overrides(spec, overrides);
}

ScenarioSpec build_converging(double angle_deg, double lateral_sep, double longitudinal_sep,
                              const nlohmann::json& overrides) {
  require_separations(lateral_sep, longitudinal_sep);
  if (!(angle_deg > 0.0 && angle_deg < 180.0))
    throw std::invalid_argument("build_converging: angle must lie in (0, 180) degrees");
  ScenarioSpec spec;
  spec.kind = EncounterKind::Converging;
  spec.lateral_separation = lateral_sep;
  spec.longitudinal_separation = longitudinal_sep;
  spec.converging_angle = angle_deg;
  spec.observer_heading = 0.0;
  spec.intruder_heading = angle_deg;
  auto merged = with_overrides(spec, overrides);
  // The intruder track follows the converging angle unless overridden.
  if (!overrides.contains("intruder_heading"))
    merged.intruder_heading = merged.observer_heading + merged.converging_angle;
  return merged;
}

void to_json(nlohmann::json& j, const ScenarioSpec& s) {
  j = nlohmann::json{
      {"kind", to_string(s.kind)},
      {"lateral_separation", s.lateral_separation},
      {"longitudinal_separation", s.longitudinal_separation},
      {"observer_speed", s.observer_speed},
      {"intruder_speed", s.intruder_speed},
      {"observer_heading", s.observer_heading},
      {"intruder_heading", s.intruder_heading},
      {"duration", s.duration},
      {"sample_rate", s.sample_rate},
      {"measurement_rate", s.measurement_rate},
      {"protected_radius", s.protected_radius},
      {"sigma_x", s.noise.sigma_x},
      {"sigma_y", s.noise.sigma_y},
      {"sigma_ax2", s.noise.sigma_ax2},
      {"sigma_ay2", s.noise.sigma_ay2},
      {"converging_angle", s.converging_angle},
      {"horizon", s.horizon},
      {"init_position_std", s.filter_init.position_std},
      {"init_velocity_std", s.filter_init.velocity_std},
      {"init_acceleration_std", s.filter_init.acceleration_std},
      {"perfect_init", s.filter_init.perfect_init},
  };
}

void from_json(const nlohmann::json& j, ScenarioSpec& s) {
  static const char* const known[] = {
      "kind", "lateral_separation", "longitudinal_separation", "observer_speed",
      "intruder_speed", "observer_heading", "intruder_heading", "duration",
      "sample_rate", "measurement_rate", "protected_radius", "sigma_x", "sigma_y",
      "sigma_ax2", "sigma_ay2", "converging_angle", "horizon", "init_position_std",
      "init_velocity_std", "init_acceleration_std", "perfect_init"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw std::invalid_argument("unknown scenario key '" + key + "'");
  }
  auto read = [&](const char* key, double& out) {
    if (j.contains(key)) out = j.at(key).get<double>();
  };
  if (j.contains("kind")) s.kind = encounter_kind_from_string(j.at("kind").get<std::string>());
  read("lateral_separation", s.lateral_separation);
  read("longitudinal_separation", s.longitudinal_separation);
  read("observer_speed", s.observer_speed);
  read("intruder_speed", s.intruder_speed);
  read("observer_heading", s.observer_heading);
  read("intruder_heading", s.intruder_heading);
  read("duration", s.duration);
  read("sample_rate", s.sample_rate);
  read("measurement_rate", s.measurement_rate);
  read("protected_radius", s.protected_radius);
  read("sigma_x", s.noise.sigma_x);
  read("sigma_y", s.noise.sigma_y);
  read("sigma_ax2", s.noise.sigma_ax2);
  read("sigma_ay2", s.noise.sigma_ay2);
  read("converging_angle", s.converging_angle);
  read("horizon", s.horizon);
  read("init_position_std", s.filter_init.position_std);
  read("init_velocity_std", s.filter_init.velocity_std);
  read("init_acceleration_std", s.filter_init.acceleration_std);
  if (j.contains("perfect_init")) s.filter_init.perfect_init = j.at("perfect_init").get<bool>();
}

ScenarioSpec load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("malformed scenario file '" + path + "': " + e.what());
  }
  if (!j.is_object())
    throw std::invalid_argument("scenario file '" + path + "' must hold a JSON object");
  // Start from the preset of the requested kind so unspecified keys take
  // that geometry's defaults.
  const auto kind = j.contains("kind")
                        ? encounter_kind_from_string(j.at("kind").get<std::string>())
                        : EncounterKind::HeadOn;
  ScenarioSpec spec = kind == EncounterKind::Overtaking   ? build_overtaking(0.0)
                      : kind == EncounterKind::Converging ? build_converging(90.0)
                                                          : build_head_on(0.0, 2000.0);
  from_json(j, spec);
  if (kind == EncounterKind::Converging && !j.contains("intruder_heading"))
    spec.intruder_heading = spec.observer_heading + spec.converging_angle;
  spec.validate();
  return spec;
}

}  // namespace subsim
