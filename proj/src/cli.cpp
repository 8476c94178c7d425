#include "subsim/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include <CLI11.hpp>

#include "subsim/analysis.hpp"
#include "subsim/conflict.hpp"
#include "subsim/format.hpp"
#include "subsim/scenarios.hpp"
#include "subsim/toy_gaussian.hpp"
#include "subsim/tracking.hpp"

namespace subsim::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Snapshot values rounded to the same precision the CSVs carry.
double rounded_probability(double v) {
  if (!std::isfinite(v)) return v;
  const std::string text = format_probability(v);
  double out = v;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

IntervalVariant interval_variant_from_string(const std::string& name) {
  if (name == "shifted") return IntervalVariant::Shifted;
  if (name == "standard") return IntervalVariant::Standard;
  throw std::invalid_argument("unknown interval variant '" + name + "' (shifted|standard)");
}

SubsetConfig subset_config_from(const json& c) {
  SubsetConfig cfg{c.at("n").get<std::size_t>(), c.at("p0").get<double>(),
                   c.at("levels").get<std::size_t>(),
                   interval_variant_from_string(c.at("intervals").get<std::string>())};
  if (cfg.n_samples == 0) throw std::invalid_argument("--n must be at least 1");
  if (cfg.max_levels == 0) throw std::invalid_argument("--levels must be at least 1");
  cfg.validate();
  return cfg;
}

fs::path out_dir_of(const json& c) { return fs::path(c.at("out_dir").get<std::string>()); }

std::string scenario_file_name(const ScenarioSpec& spec) {
  return to_string(spec.kind) + "_La" + format_shortest(spec.lateral_separation) + ".csv";
}

std::vector<ScenarioSpec> scenario_specs(const json& c) {
  ScenarioSpec base;
  from_json(c.at("scenario"), base);
  std::vector<ScenarioSpec> specs;
  for (double la : c.at("lateral_separations").get<std::vector<double>>()) {
    if (!(la >= 0.0))
      throw std::invalid_argument("lateral separation must be non-negative, got " +
                                  format_shortest(la));
    ScenarioSpec s = base;
    s.lateral_separation = la;
    s.validate();
    specs.push_back(s);
  }
  if (specs.empty()) throw std::invalid_argument("no lateral separations given");
  return specs;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  return f;
}

void write_toy(const json& c, std::uint64_t seed, std::ostream& log) {
  const auto config = subset_config_from(c);
  const toy::CircleRegion region{{c.at("center").at(0).get<double>(),
                                  c.at("center").at(1).get<double>()},
                                 c.at("radius").get<double>()};
  region.validate();
  const auto kernel = toy::toy_kernel_from_string(c.at("kernel").get<std::string>());
  const auto result = toy::ss_toy(region, config, seed, kernel);
  const double oracle = toy::oracle_probability(region);

  const auto outputs = planned_outputs("toy", c);
  {
    auto f = open_output(outputs[0]);
    f << "probability,response\n";
    for (const auto& row : result.table.rows)
      f << format_probability(row.probability) << ',' << format_distance(row.response)
        << '\n';
  }
  json summary = {
      {"estimate", rounded_probability(result.estimate)},
      {"oracle", rounded_probability(oracle)},
      {"ratio", oracle > 0.0 ? json(rounded_probability(result.estimate / oracle)) : json(nullptr)},
      {"levels_completed", result.diagnostics.levels_completed},
      {"conflict_count", result.diagnostics.conflict_count},
      {"samples_used", result.diagnostics.samples_used},
      {"floor_reached", result.diagnostics.floor_reached},
  };
  open_output(outputs[1]) << summary.dump(2) << '\n';
  log << "estimate " << format_probability(result.estimate) << "  oracle "
      << format_probability(oracle) << "  levels " << result.diagnostics.levels_completed
      << '\n';
}

void write_scenarios(const json& c, std::uint64_t seed, std::ostream& log) {
  const auto config = subset_config_from(c);
  const auto specs = scenario_specs(c);
  ScenarioRunOptions options;
  options.stride = c.at("stride").get<std::size_t>();
  options.start_time = c.at("start_time").get<double>();
  options.run_dmc = c.at("run_dmc").get<bool>();
  const auto outputs = planned_outputs("scenario", c);

  for (std::size_t s = 0; s < specs.size(); ++s) {
    const auto steps = simulate_scenario(specs[s], config, seed, options);
    auto f = open_output(outputs[s]);
    f << "t,pc_ss,pc_ss_floor_flag,levels,samples,pc_dmc,D_ss,D_dmc,miss_true\n";
    for (const auto& st : steps) {
      f << format_distance(st.time) << ',' << format_probability(st.ss.pc) << ','
        << (st.ss.floor_reached ? 1 : 0) << ',' << st.ss.levels_used << ','
        << st.ss.samples_used << ',';
      if (options.run_dmc)
        f << format_probability(st.dmc.pc) << ',' << st.ss.conflict_count << ','
          << st.dmc.conflict_count;
      else
        f << ',' << st.ss.conflict_count << ',';
      f << ',' << format_distance(st.miss_true) << '\n';
    }
    log << outputs[s] << ": " << steps.size() << " steps\n";
  }
}

CovStudyConfig cov_config_from(const json& c, std::uint64_t seed) {
  CovStudyConfig cfg;
  cfg.repetitions = c.at("reps").get<std::size_t>();
  cfg.dmc_sizes = c.at("dmc_sizes").get<std::vector<std::size_t>>();
  cfg.ss_sizes = c.at("ss_sizes").get<std::vector<std::size_t>>();
  cfg.phase = phase_by_name(c.at("phase").get<std::string>());
  cfg.level_probability = c.at("p0").get<double>();
  cfg.max_levels = c.at("levels").get<std::size_t>();
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

void write_cov(const json& c, std::uint64_t seed, std::ostream& log) {
  const auto cfg = cov_config_from(c, seed);
  const auto points = cov_study(cfg);
  auto f = open_output(planned_outputs("cov-study", c)[0]);
  f << "method,requested_n,avg_samples,mean_pc,std_pc,cov,undefined_flag\n";
  for (const auto& p : points) {
    f << to_string(p.method) << ',' << p.requested_n << ',' << format_distance(p.avg_samples)
      << ',' << format_probability(p.mean_pc) << ',' << format_probability(p.std_pc) << ','
      << format_probability(p.cov) << ',' << (p.undefined ? 1 : 0) << '\n';
    log << to_string(p.method) << " n=" << p.requested_n << " avg="
        << format_distance(p.avg_samples) << " cov=" << format_probability(p.cov) << '\n';
  }
}

std::vector<std::size_t> size_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (double v : parse_real_list(text)) {
    if (!(v >= 1.0) || v != std::floor(v))
      throw std::invalid_argument("sample sizes must be positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

}  // namespace

void to_json(json& j, const RunManifest& m) {
  j = json{{"command", m.command},
           {"config_snapshot", m.config_snapshot},
           {"master_seed", m.master_seed},
           {"tool_version", m.tool_version},
           {"outputs", m.outputs}};
}

void from_json(const json& j, RunManifest& m) {
  j.at("command").get_to(m.command);
  m.config_snapshot = j.at("config_snapshot");
  j.at("master_seed").get_to(m.master_seed);
  j.at("tool_version").get_to(m.tool_version);
  j.at("outputs").get_to(m.outputs);
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const char* env_value) {
  if (flag) return *flag;
  if (env_value == nullptr || *env_value == '\0') return 1;
  const std::string_view text(env_value);
  std::uint64_t seed = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw std::invalid_argument("SUBSIM_SEED is not an unsigned 64-bit integer: '" +
                                std::string(text) + "'");
  return seed;
}

std::vector<std::string> planned_outputs(const std::string& command, const json& config) {
  const fs::path dir = out_dir_of(config);
  if (command == "toy")
    return {(dir / "toy_ccdf.csv").string(), (dir / "toy_summary.json").string()};
  if (command == "scenario") {
    std::vector<std::string> out;
    for (const auto& spec : scenario_specs(config))
      out.push_back((dir / scenario_file_name(spec)).string());
    return out;
  }
  if (command == "cov-study")
    return {(dir / ("cov_" + config.at("phase").get<std::string>() + ".csv")).string()};
  throw std::invalid_argument("unknown command '" + command + "'");
}

std::string manifest_path(const std::string& command, const json& config) {
  const std::string stem = command == "cov-study" ? "cov" : command;
  return (out_dir_of(config) / (stem + "_manifest.json")).string();
}

void execute(const RunManifest& manifest, std::ostream& log) {
  const auto& c = manifest.config_snapshot;
  fs::create_directories(out_dir_of(c));
  open_output(manifest_path(manifest.command, c)) << json(manifest).dump(2) << '\n';
  if (manifest.command == "toy")
    write_toy(c, manifest.master_seed, log);
  else if (manifest.command == "scenario")
    write_scenarios(c, manifest.master_seed, log);
  else if (manifest.command == "cov-study")
    write_cov(c, manifest.master_seed, log);
  else
    throw std::invalid_argument("unknown command '" + manifest.command + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subset Simulation and Direct Monte Carlo conflict probability estimation",
               "subsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::optional<std::uint64_t> seed_flag;
  std::string out_dir = ".";

  // toy
  auto* toy_cmd = app.add_subcommand("toy", "Disc probability under a standard 2D normal");
  std::size_t toy_n = 100, toy_levels = 5;
  double toy_p0 = 0.1;
  std::string toy_intervals = "shifted", toy_kernel = "prior";
  std::vector<double> toy_center{3.0, -3.0};
  double toy_radius = 1.0;
  toy_cmd->add_option("--n", toy_n, "Samples per level")->capture_default_str();
  toy_cmd->add_option("--levels", toy_levels, "Maximum number of levels m")->capture_default_str();
  toy_cmd->add_option("--p0", toy_p0, "Level probability")->capture_default_str();
  toy_cmd->add_option("--seed", seed_flag, "Master seed (default: SUBSIM_SEED or 1)");
  toy_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
  toy_cmd->add_option("--intervals", toy_intervals, "shifted|standard")->capture_default_str();
  toy_cmd->add_option("--kernel", toy_kernel, "prior|disc-tilt")->capture_default_str();
  toy_cmd->add_option("--center", toy_center, "Disc centre x y")->expected(2);
  toy_cmd->add_option("--radius", toy_radius, "Disc radius")->capture_default_str();

  // scenario
  auto* sc_cmd = app.add_subcommand("scenario", "Closed-loop tracking run with per-step P_c");
  std::string sc_file, sc_preset, sc_lateral;
  std::size_t sc_n = 100, sc_levels = 7, sc_stride = 1;
  double sc_p0 = 0.1, sc_start = 0.0, sc_angle = 90.0;
  std::optional<double> sc_longitudinal;
  bool sc_no_dmc = false;
  std::string sc_intervals = "shifted";
  auto* file_opt = sc_cmd->add_option("--scenario", sc_file, "Scenario JSON file");
  auto* preset_opt =
      sc_cmd->add_option("--preset", sc_preset, "head-on|overtaking|converging");
  file_opt->excludes(preset_opt);
  sc_cmd->add_option("--lateral-sep", sc_lateral, "Comma separated L_a list, m");
  sc_cmd->add_option("--longitudinal-sep", sc_longitudinal, "L_o, m (presets only)");
  sc_cmd->add_option("--angle", sc_angle, "Converging angle, deg")->capture_default_str();
  sc_cmd->add_option("--seed", seed_flag, "Master seed (default: SUBSIM_SEED or 1)");
  sc_cmd->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  sc_cmd->add_option("--n", sc_n, "SS samples per level")->capture_default_str();
  sc_cmd->add_option("--levels", sc_levels, "Maximum number of levels m")->capture_default_str();
  sc_cmd->add_option("--p0", sc_p0, "Level probability")->capture_default_str();
  sc_cmd->add_option("--intervals", sc_intervals, "shifted|standard")->capture_default_str();
  sc_cmd->add_option("--stride", sc_stride, "Estimate P_c every k-th step")->capture_default_str();
  sc_cmd->add_option("--start-time", sc_start, "First time to estimate P_c, s");
  sc_cmd->add_flag("--no-dmc", sc_no_dmc, "Skip the matched-budget DMC estimate");

  // cov-study
  auto* cov_cmd = app.add_subcommand("cov-study", "Coefficient of variation vs sample budget");
  std::string cov_phase = "p2", cov_dmc = "100,1000,10000", cov_ss = "300,1000,3000";
  std::size_t cov_reps = 20, cov_levels = 7;
  double cov_p0 = 0.1;
  cov_cmd->add_option("--phase", cov_phase, "p1|p2")->capture_default_str();
  cov_cmd->add_option("--reps", cov_reps, "Repetitions per budget")->capture_default_str();
  cov_cmd->add_option("--seed", seed_flag, "Master seed (default: SUBSIM_SEED or 1)");
  cov_cmd->add_option("--dmc-sizes", cov_dmc, "Comma separated DMC sample sizes")
      ->capture_default_str();
  cov_cmd->add_option("--ss-sizes", cov_ss, "Comma separated SS per-level N")
      ->capture_default_str();
  cov_cmd->add_option("--levels", cov_levels, "SS maximum levels")->capture_default_str();
  cov_cmd->add_option("--p0", cov_p0, "SS level probability")->capture_default_str();
  cov_cmd->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();

  // replay
  auto* replay_cmd = app.add_subcommand("replay", "Re-run a command from its manifest");
  std::string replay_manifest;
  std::optional<std::string> replay_out;
  replay_cmd->add_option("manifest", replay_manifest, "Manifest JSON")->required();
  replay_cmd->add_option("--out-dir", replay_out, "Write outputs here instead");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    RunManifest manifest;
    if (replay_cmd->parsed()) {
      std::ifstream in(replay_manifest);
      if (!in) throw std::invalid_argument("cannot open manifest '" + replay_manifest + "'");
      manifest = json::parse(in).get<RunManifest>();
      if (replay_out) manifest.config_snapshot["out_dir"] = *replay_out;
    } else {
      manifest.master_seed = resolve_seed(seed_flag, std::getenv("SUBSIM_SEED"));
      json c;
      if (toy_cmd->parsed()) {
        manifest.command = "toy";
        c = {{"n", toy_n},           {"levels", toy_levels},   {"p0", toy_p0},
             {"intervals", toy_intervals}, {"kernel", toy_kernel}, {"center", toy_center},
             {"radius", toy_radius}};
        if (toy_center.size() != 2) throw std::invalid_argument("--center takes two values");
      } else if (sc_cmd->parsed()) {
        manifest.command = "scenario";
        ScenarioSpec base;
        if (!sc_file.empty()) {
          base = load_scenario_file(sc_file);
        } else if (!sc_preset.empty()) {
          const auto kind = encounter_kind_from_string(sc_preset);
          if (kind == EncounterKind::HeadOn)
            base = build_head_on(0.0, sc_longitudinal.value_or(2000.0));
          else if (kind == EncounterKind::Overtaking)
            base = build_overtaking(0.0, sc_longitudinal.value_or(1000.0));
          else
            base = build_converging(sc_angle, 0.0, sc_longitudinal.value_or(2000.0));
        } else {
          throw std::invalid_argument("scenario: give --scenario <file> or --preset <name>");
        }
        const std::vector<double> lateral = sc_lateral.empty()
                                                ? std::vector<double>{base.lateral_separation}
                                                : parse_real_list(sc_lateral);
        json spec_json;
        to_json(spec_json, base);
        c = {{"scenario", spec_json}, {"lateral_separations", lateral},
             {"n", sc_n},             {"levels", sc_levels},
             {"p0", sc_p0},           {"intervals", sc_intervals},
             {"stride", sc_stride},   {"start_time", sc_start},
             {"run_dmc", !sc_no_dmc}};
        if (sc_stride == 0) throw std::invalid_argument("--stride must be at least 1");
      } else {
        manifest.command = "cov-study";
        c = {{"phase", cov_phase},      {"reps", cov_reps},
             {"dmc_sizes", size_list(cov_dmc)}, {"ss_sizes", size_list(cov_ss)},
             {"levels", cov_levels},    {"p0", cov_p0}};
      }
      c["out_dir"] = out_dir;
      manifest.config_snapshot = c;
    }

    // Validate everything up front so a usage error never leaves a partial
    // manifest behind.
    const auto& c = manifest.config_snapshot;
    if (manifest.command == "cov-study") {
      cov_config_from(c, manifest.master_seed);
    } else {
      subset_config_from(c);
      if (manifest.command == "toy") {
        toy::toy_kernel_from_string(c.at("kernel").get<std::string>());
        toy::CircleRegion{{c.at("center").at(0).get<double>(),
                           c.at("center").at(1).get<double>()},
                          c.at("radius").get<double>()}
            .validate();
      }
    }
    manifest.outputs = planned_outputs(manifest.command, c);
    execute(manifest, out);
    out << "manifest " << manifest_path(manifest.command, c) << '\n';
    return kSuccess;
  } catch (const KernelContractError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: bad configuration: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace subsim::cli
