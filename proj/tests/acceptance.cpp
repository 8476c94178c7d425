// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "riccati_oracle.hpp"
#include "subsim/analysis.hpp"
#include "subsim/conflict.hpp"
#include "subsim/subset_simulation.hpp"
#include "subsim/toy_gaussian.hpp"
#include "subsim/tracking.hpp"

using namespace subsim;

namespace {

// Noncentral chi-square CDF (2 dof, non-centrality 18) at 1, from scipy.
constexpr double kReferenceDiscMass = 2.5368780882e-04;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

Outcome toy_oracle() {
  const auto region = toy::reference_region();
  const double oracle = toy::oracle_probability(region);
  std::vector<double> e;
  for (std::uint64_t s = 0; s < 50; ++s)
    e.push_back(toy::ss_toy(region, SubsetConfig{100, 0.1, 5}, 1000 + s).estimate);
  const double med = median(e);
  const double ratio = med / oracle;
  const bool oracle_ok = std::abs(oracle / kReferenceDiscMass - 1.0) < 1e-6;
  return {oracle_ok && ratio >= 1.0 / 3.0 && ratio <= 3.0,
          "median " + fmt("%.3e", med) + " vs oracle " + fmt("%.6e", oracle) + ", ratio " +
              fmt("%.2f", ratio)};
}

Outcome dmc_poverty() {
  const auto region = toy::reference_region();
  int zeros = 0;
  for (std::uint64_t s = 0; s < 100; ++s) zeros += toy::dmc_estimate(region, 100, s) == 0.0;
  return {zeros >= 95, std::to_string(zeros) + "/100 runs return 0"};
}

Outcome level_arithmetic() {
  const SubsetConfig c{100, 0.1, 7, IntervalVariant::Shifted};
  const double floor = probability_intervals(6, c).back();
  return {c.chains() == 10 && c.chain_length() == 10 && floor == 1e-8,
          "N_c=" + std::to_string(c.chains()) + " N_s=" + std::to_string(c.chain_length()) +
              " floor=" + fmt("%.17g", floor)};
}

Outcome head_on_conflict() {
  const auto spec = build_head_on(0.0, 2000.0);
  const auto steps = simulate_scenario(spec, SubsetConfig{100, 0.1, 7}, 1);
  double first_high = -1.0;
  std::size_t window = 0, level0 = 0;
  for (const auto& st : steps) {
    if (st.time >= 12.5) break;
    ++window;
    level0 += st.ss.levels_used == 1;
    if (first_high < 0 && st.ss.pc >= 0.99) first_high = st.time;
  }
  const double share = static_cast<double>(level0) / static_cast<double>(window);
  return {first_high >= 0 && share > 0.5,
          "pc_ss >= 0.99 first at t=" + fmt("%.2f", first_high) + " s, level-0 share " +
              fmt("%.3f", share) + " over " + std::to_string(window) + " steps"};
}

Outcome post_pass_rarity() {
  const auto spec = build_head_on(kProtectedRadius, 2000.0);
  ScenarioRunOptions opt;
  opt.start_time = 14.0 + 1e-9;
  opt.stride = 6;  // steps 282, 288, ..., 396
  const auto steps = simulate_scenario(spec, SubsetConfig{100, 0.1, 7}, 1, opt);
  std::size_t rare = 0, dmc_zero = 0;
  for (const auto& st : steps) {
    rare += st.ss.pc <= 1e-7 || st.ss.floor_reached;
    dmc_zero += st.dmc.pc == 0.0;
  }
  const std::size_t n = steps.size();
  return {n == 20 && rare == n && dmc_zero * 10 >= 9 * n,
          std::to_string(rare) + "/" + std::to_string(n) + " steps at or below 1e-7, DMC zero in " +
              std::to_string(dmc_zero) + "/" + std::to_string(n)};
}

Outcome cov_study_p2() {
  CovStudyConfig c;
  c.phase = phase_p2();
  c.repetitions = 20;
  c.dmc_sizes = {100, 1000, 10000};
  c.ss_sizes = {300, 1000, 3000};
  c.seed = 1;
  const auto points = cov_study(c);

  // Reference p: pooled DMC hits over every DMC run.
  double hits = 0.0, draws = 0.0;
  for (const auto& p : points)
    if (p.method == Method::DirectMonteCarlo) {
      hits += p.mean_pc * p.avg_samples * c.repetitions;
      draws += p.avg_samples * c.repetitions;
    }
  const double p_ref = hits / draws;

  const CovPoint* ss_best = nullptr;
  const CovPoint* dmc_1e4 = nullptr;
  bool analytic_ok = p_ref > 0.0;
  std::string curve;
  for (const auto& p : points) {
    if (p.method == Method::SubsetSimulation) {
      if (!ss_best || std::abs(p.avg_samples - 1e4) < std::abs(ss_best->avg_samples - 1e4))
        ss_best = &p;
      continue;
    }
    if (p.requested_n == 10000) dmc_1e4 = &p;
    if (p.undefined || !(p_ref > 0.0)) {
      curve += " n=" + std::to_string(p.requested_n) + ":undefined";
      continue;
    }
    const double expect = binomial_cov(p_ref, static_cast<double>(p.requested_n));
    // A sample c.o.v. over R runs cannot exceed sqrt(R); such points say
    // nothing about the estimator.
    if (expect > std::sqrt(static_cast<double>(c.repetitions))) {
      curve += " n=" + std::to_string(p.requested_n) + ":unresolvable(analytic " +
               fmt("%.2f", expect) + ")";
      continue;
    }
    const double r = p.cov / expect;
    analytic_ok = analytic_ok && r >= 1.0 / 1.5 && r <= 1.5;
    curve += " n=" + std::to_string(p.requested_n) + ":" + fmt("%.2f", r);
  }
  const bool ss_ok = ss_best && !ss_best->undefined && ss_best->cov <= 0.15;
  const bool dmc_ok = dmc_1e4 && (dmc_1e4->undefined || dmc_1e4->cov >= 0.30);
  std::string detail = "p_ref " + fmt("%.3e", p_ref);
  if (ss_best)
    detail += ", SS cov " + fmt("%.3f", ss_best->cov) + " at avg " +
              fmt("%.0f", ss_best->avg_samples) + " (mean " + fmt("%.3e", ss_best->mean_pc) +
              ")";
  if (dmc_1e4) detail += ", DMC cov " + fmt("%.3f", dmc_1e4->cov) + " at 1e4";
  detail += ", DMC/analytic" + curve;
  detail += std::string(" [ss ") + (ss_ok ? "ok" : "FAIL") + ", dmc " +
            (dmc_ok ? "ok" : "FAIL") + ", curve " + (analytic_ok ? "ok" : "FAIL") + "]";
  return {ss_ok && dmc_ok && analytic_ok, detail};
}

Outcome property_suites() {
  const int status = std::system(SUBSIM_PROPERTY_TESTS " > /dev/null 2>&1");
  return {status == 0, std::string("property test binary exit status ") +
                           std::to_string(status)};
}

Outcome kalman_channel() {
  const NoiseConfig noise;
  const double dt = 0.05;
  const std::size_t steps = 500, interval = 10;
  const riccati::Channel ch{dt, noise.sigma_ax2, noise.sigma_x * noise.sigma_x};
  const auto oracle = riccati::position_variance(ch, 100, 25, 1, steps, interval);

  // Filter covariance against the recursion.
  KalmanEstimate est;
  AircraftState d;
  d << 100, 25, 1, 100, 25, 1;
  est.covariance = d.asDiagonal();
  double worst_cov = 0.0;
  for (std::size_t k = 1; k <= steps; ++k) {
    std::optional<Measurement> z;
    if (k % interval == 0) z = Measurement{0, 0};
    est = kf_step(est, z, dt, noise);
    if (k > 400) worst_cov = std::max(worst_cov, std::abs(est.covariance(0, 0) / oracle[k - 1] - 1));
  }

  // Empirical error variance: truth driven by the modelled jerk noise.
  const StateMatrix q = process_noise(dt, noise);
  const Eigen::LLT<Eigen::Matrix3d> llt(q.topLeftCorner<3, 3>());
  const Eigen::Matrix3d lq = llt.matrixL();
  const StateMatrix a = transition_matrix(dt);
  const int runs = 2000;
  double sq = 0.0, ref = 0.0;
  std::size_t count = 0;
  for (int r = 0; r < runs; ++r) {
    Stream rng(8, {static_cast<std::uint64_t>(r)});
    AircraftState truth = AircraftState::Zero();
    KalmanEstimate e;
    e.covariance = d.asDiagonal();
    for (int i = 0; i < 6; ++i) e.mean(i) = std::sqrt(d(i)) * rng.normal();
    for (std::size_t k = 1; k <= steps; ++k) {
      truth = a * truth;
      const Eigen::Vector3d w = lq * Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
      truth.segment<3>(0) += w;
      std::optional<Measurement> z;
      if (k % interval == 0) z = simulate_measurement(truth, noise, rng);
      e = kf_step(e, z, dt, noise);
      if (k > 400) {
        const double err = e.mean(0) - truth(0);
        sq += err * err;
        ref += oracle[k - 1];
        ++count;
      }
    }
  }
  const double empirical = sq / static_cast<double>(count);
  const double predicted = ref / static_cast<double>(count);
  const double rel = std::abs(empirical / predicted - 1.0);
  return {worst_cov <= 0.05 && rel <= 0.05,
          "filter vs recursion max rel " + fmt("%.2e", worst_cov) + ", empirical " +
              fmt("%.4e", empirical) + " vs " + fmt("%.4e", predicted) + " (rel " +
              fmt("%.3f", rel) + ")"};
}

struct Criterion {
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"C1 toy oracle agreement", 30, toy_oracle},
      {"C2 DMC poverty at N=100", 5, dmc_poverty},
      {"C3 level arithmetic", 1, level_arithmetic},
      {"C4 head-on conflict, L_a=0", 600, head_on_conflict},
      {"C5 post-pass rarity, L_a=152.4", 600, post_pass_rarity},
      {"C6 c.o.v. study, p2 phase", 1800, cov_study_p2},
      {"C7 property suites", 120, property_suites},
      {"C8 Kalman channel oracle", 10, kalman_channel},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("[%s] %s: %s; %.2f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs, c.budget_s, in_time ? "" : " OVER TIME");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
