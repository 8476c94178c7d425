#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <locale>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "subsim/cli.hpp"
#include "subsim/format.hpp"

namespace fs = std::filesystem;
using namespace subsim;
using nlohmann::json;

namespace {

const std::string kData = SUBSIM_TEST_DATA;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("subsim_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Decimal comma and digit grouping, to show formatting ignores the locale.
struct CommaPunct : std::numpunct<char> {
  char do_decimal_point() const override { return ','; }
  char do_thousands_sep() const override { return '.'; }
  std::string do_grouping() const override { return "\3"; }
};

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_distance(152.4) == "152.400");
  CHECK(format_distance(-0.0004) == "-0.000");
  CHECK(format_probability(1e-8) == "1.00000e-08");
  CHECK(format_probability(2.5368780882e-04) == "2.53688e-04");
  CHECK(format_probability(1.0) == "1.00000e+00");
  CHECK(format_probability(std::nan("")) == "nan");
  CHECK(format_shortest(152.4) == "152.4");

  const auto old = std::locale::global(std::locale(std::locale::classic(), new CommaPunct));
  CHECK(format_distance(1234.5) == "1234.500");
  CHECK(format_probability(0.25) == "2.50000e-01");
  std::locale::global(old);

  CHECK(parse_real_list("0,100, 152.4 ,1e3") == std::vector<double>{0, 100, 152.4, 1000});
  CHECK_THROWS_AS(parse_real_list("1,,2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_real_list("1;2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_real_list(""), std::invalid_argument);
}

TEST_CASE("seed resolution") {
  CHECK(cli::resolve_seed(5, "9") == 5);
  CHECK(cli::resolve_seed(std::nullopt, "9") == 9);
  CHECK(cli::resolve_seed(std::nullopt, nullptr) == 1);
  CHECK(cli::resolve_seed(std::nullopt, "") == 1);
  CHECK(cli::resolve_seed(std::nullopt, "18446744073709551615") == 18446744073709551615ULL);
  CHECK_THROWS_AS(cli::resolve_seed(std::nullopt, "12x"), std::invalid_argument);
  CHECK_THROWS_AS(cli::resolve_seed(std::nullopt, "-3"), std::invalid_argument);
}

TEST_CASE("usage errors exit 2") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"toy", "--n", "0"}).code == 2);
  CHECK(invoke({"toy", "--p0", "0.3"}).code == 2);
  CHECK(invoke({"toy", "--bogus"}).code == 2);
  CHECK(invoke({"toy", "--kernel", "tilt"}).code == 2);
  CHECK(invoke({"cov-study", "--reps", "1"}).code == 2);
  CHECK(invoke({"cov-study", "--phase", "p9"}).code == 2);
  CHECK(invoke({"scenario", "--preset", "head-on", "--lateral-sep", "-5"}).code == 2);
  CHECK(invoke({"scenario", "--preset", "sideways"}).code == 2);
  CHECK(invoke({"scenario"}).code == 2);
  CHECK(invoke({"scenario", "--scenario", kData + "/missing.json"}).code == 2);
  CHECK(invoke({"scenario", "--scenario", kData + "/unknown_key.json"}).code == 2);
  CHECK(invoke({"replay", "/nonexistent/manifest.json"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("toy command") {
  const auto dir = scratch("toy");
  const auto r = invoke({"toy", "--n", "100", "--levels", "5", "--seed", "11", "--out",
                      dir.string()});
  REQUIRE(r.code == 0);
  const auto summary = json::parse(slurp(dir / "toy_summary.json"));
  const std::size_t levels = summary.at("levels_completed").get<std::size_t>();
  CHECK(summary.at("oracle").get<double>() == doctest::Approx(2.53688e-4));
  CHECK(summary.at("ratio").get<double>() ==
        doctest::Approx(summary.at("estimate").get<double>() / 2.53688e-4).epsilon(1e-5));

  const auto csv = lines(slurp(dir / "toy_ccdf.csv"));
  REQUIRE(!csv.empty());
  CHECK(csv.front() == "probability,response");
  CHECK(csv.size() - 1 == 100 + (levels - 1) * 90);
  CHECK(csv[1].rfind("1.00000e+00,", 0) == 0);

  const auto manifest = json::parse(slurp(dir / "toy_manifest.json"));
  CHECK(manifest.at("command") == "toy");
  CHECK(manifest.at("master_seed") == 11);
  CHECK(manifest.at("tool_version") == cli::kToolVersion);
  CHECK(manifest.at("outputs").size() == 2);
  CHECK(manifest.at("config_snapshot").at("n") == 100);

  SUBCASE("one level is direct Monte Carlo") {
    const auto d = scratch("toy1");
    REQUIRE(invoke({"toy", "--levels", "1", "--seed", "11", "--out", d.string()}).code == 0);
    const auto s = json::parse(slurp(d / "toy_summary.json"));
    CHECK(s.at("levels_completed") == 1);
    CHECK(lines(slurp(d / "toy_ccdf.csv")).size() == 101);
  }
  SUBCASE("replay reproduces the bytes") {
    const auto d = scratch("toy_replay");
    REQUIRE(invoke({"replay", (dir / "toy_manifest.json").string(), "--out-dir", d.string()})
                .code == 0);
    CHECK(slurp(d / "toy_ccdf.csv") == slurp(dir / "toy_ccdf.csv"));
    CHECK(slurp(d / "toy_summary.json") == slurp(dir / "toy_summary.json"));
  }
}

TEST_CASE("scenario command") {
  const auto a = scratch("sc_a");
  const auto b = scratch("sc_b");
  const std::vector<std::string> base{"scenario", "--preset", "head-on", "--lateral-sep",
                                      "0,1000", "--seed", "5", "--stride", "40"};
  auto args_a = base;
  args_a.insert(args_a.end(), {"--out-dir", a.string()});
  auto args_b = base;
  args_b.insert(args_b.end(), {"--out-dir", b.string()});
  REQUIRE(invoke(args_a).code == 0);
  REQUIRE(invoke(args_b).code == 0);
  for (const char* name : {"head-on_La0.csv", "head-on_La1000.csv"}) {
    const auto text = slurp(a / name);
    CHECK(text == slurp(b / name));
    const auto rows = lines(text);
    REQUIRE(rows.size() == 11);
    CHECK(rows[0] == "t,pc_ss,pc_ss_floor_flag,levels,samples,pc_dmc,D_ss,D_dmc,miss_true");
    CHECK(rows[1].rfind("2.000,", 0) == 0);
  }
  const auto manifest = json::parse(slurp(a / "scenario_manifest.json"));
  CHECK(manifest.at("outputs").size() == 2);
  CHECK(manifest.at("config_snapshot").at("scenario").at("kind") == "head-on");

  SUBCASE("scenario file") {
    const auto d = scratch("sc_file");
    REQUIRE(invoke({"scenario", "--scenario", kData + "/head_on_short.json", "--stride", "20",
                 "--out-dir", d.string(), "--no-dmc"})
                .code == 0);
    const auto rows = lines(slurp(d / "head-on_La100.csv"));
    REQUIRE(rows.size() == 5);
    CHECK(rows[1].find(",,") != std::string::npos);  // no DMC column values
  }
  SUBCASE("environment seed") {
    const auto d = scratch("sc_env");
    ::setenv("SUBSIM_SEED", "5", 1);
    auto args = base;
    args.erase(args.begin() + 5, args.begin() + 7);  // drop --seed 5
    args.insert(args.end(), {"--out-dir", d.string()});
    REQUIRE(invoke(args).code == 0);
    ::unsetenv("SUBSIM_SEED");
    CHECK(slurp(d / "head-on_La0.csv") == slurp(a / "head-on_La0.csv"));
  }
}

TEST_CASE("cov-study command") {
  const auto d = scratch("cov");
  REQUIRE(invoke({"cov-study", "--phase", "p1", "--reps", "3", "--dmc-sizes", "50",
               "--ss-sizes", "50", "--seed", "2", "--out-dir", d.string()})
              .code == 0);
  const auto rows = lines(slurp(d / "cov_p1.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "method,requested_n,avg_samples,mean_pc,std_pc,cov,undefined_flag");
  CHECK(rows[1].rfind("dmc,50,50.000,", 0) == 0);
  CHECK(rows[2].rfind("ss,50,50.000,", 0) == 0);
  CHECK(fs::exists(d / "cov_manifest.json"));
}
