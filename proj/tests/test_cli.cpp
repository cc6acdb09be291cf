#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "pbsrdd/cli/compare.hpp"
#include "pbsrdd/cli/config.hpp"
#include "pbsrdd/cli/csv.hpp"
#include "pbsrdd/cli/expression.hpp"
#include "pbsrdd/cli/study.hpp"
#include "pbsrdd/cli/svg.hpp"
#include "pbsrdd/core/error.hpp"

using namespace pbsrdd;
using namespace pbsrdd::cli;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("expression precedence") {
  const double L = 2 * std::numbers::pi;
  CHECK(Expression("-x^2", L)(3.0) == -9.0);
  CHECK(Expression("2^3^2", L)(0.0) == 512.0);
  CHECK(Expression("2^-1", L)(0.0) == 0.5);
  CHECK(Expression("1 + 2 * 3 - 4 / 2", L)(0.0) == 5.0);
  CHECK(Expression("(1 + 2) * 3", L)(0.0) == 9.0);
  CHECK(Expression("max(x, 1) + min(x, 1)", L)(4.0) == 5.0);
  CHECK(Expression("L / pi", L)(0.0) == doctest::Approx(2.0).epsilon(1e-15));
  // periodic distance wraps around the domain
  CHECK(Expression("dist(x, 0.5)", L)(L - 0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(Expression("exp(-5 * dist(x, 0.75 * pi)^2)", L)(0.75 * std::numbers::pi) == 1.0);
}

TEST_CASE("expression errors") {
  CHECK_THROWS_AS(Expression("y + 1", 1.0), ModelError);
  CHECK_THROWS_AS(Expression("foo(x)", 1.0), ModelError);
  CHECK_THROWS_AS(Expression("exp(x, 1)", 1.0), ModelError);
  CHECK_THROWS_AS(Expression("dist(x)", 1.0), ModelError);
  CHECK_THROWS_AS(Expression("(x", 1.0), ModelError);
  CHECK_THROWS_AS(Expression("x +", 1.0), ModelError);
  CHECK_THROWS_AS(Expression("", 1.0), ModelError);
}

TEST_CASE("config defaults and overrides") {
  auto config = parse_config_text("{}");
  CHECK(config.voxels == 64);
  CHECK(config.kappa == 200.0);
  CHECK(config.replicates == 10000);
  REQUIRE(config.record_times.size() == 81);
  CHECK(config.record_times.back() == 40.0);
  CHECK(config.field_times == std::vector<double>{40.0});

  auto free = parse_config_text(R"({"potentials": {"kappa": 0}, "gamma": [20, 40]})");
  CHECK(free.kappa == 0.0);
  CHECK(free.gammas == std::vector<double>{20, 40});
  CHECK(config_hash(free) != config_hash(config));

  CHECK_THROWS_WITH_AS(parse_config_text(R"({"potentials": {"kapa": 1}})"),
                       doctest::Contains("potentials.kapa"), ModelError);
  CHECK_THROWS_AS(parse_config_text(R"({"gamma": [-5]})"), ModelError);
  CHECK_THROWS_AS(parse_config_text(R"({"replicates": "many"})"), ModelError);
  CHECK_THROWS_AS(parse_config_text(R"({"field_times": [3.3]})"), ModelError);
  CHECK_THROWS_AS(parse_config_text("[1, 2"), ModelError);
}

TEST_CASE("config echo round trip") {
  auto config = parse_config_text(R"({"domain": {"voxels": 32}, "seed": 17, "solver": {"convolution": "dense"}})");
  const std::string echo = echo_config(config);
  auto again = parse_config_text(echo);
  CHECK(echo_config(again) == echo);
  CHECK(config_hash(again) == config_hash(config));

  // workers and the output directory do not change results
  again.workers = 8;
  again.output_dir = "elsewhere";
  CHECK(config_hash(again) == config_hash(config));
  again.seed = 18;
  CHECK(config_hash(again) != config_hash(config));
}

TEST_CASE("csv round trip") {
  CsvTable table{{"time", "seed", "value"}, {}};
  table.rows.push_back({0.1, std::uint64_t{18446744073709551615ull}, 1.0 / 3.0});
  table.rows.push_back({2.0, std::uint64_t{0}, -1e-300});
  const std::string text = to_csv(table, provenance_line("abc"));
  CHECK(text.rfind("# pbsrdd ", 0) == 0);
  auto back = parse_csv(text);
  REQUIRE(back.columns == table.columns);
  REQUIRE(back.rows.size() == 2);
  CHECK(std::get<std::uint64_t>(back.rows[0][1]) == 18446744073709551615ull);
  CHECK(as_double(back.rows[0][2]) == 1.0 / 3.0);
  CHECK(as_double(back.rows[1][2]) == -1e-300);
  CHECK(back.values("time") == std::vector<double>{0.1, 2.0});
  CHECK(format_number(0.1) == "0.1");
  CHECK_THROWS_AS(back.column("missing"), ModelError);
  CHECK_THROWS_AS(parse_csv("a,b\n1,x\n"), ModelError);
}

TEST_CASE("series comparison") {
  const std::vector<double> t{0.0, 1.0, 2.0};
  const std::vector<double> m{0.0, 0.1, 0.2};
  auto same = compare_series(t, m, t, m);
  CHECK(same.sup_error == 0.0);
  CHECK(same.sup_index == 0);

  const std::vector<double> p{0.01, 0.13, 0.19};
  auto off = compare_series(t, p, t, m);
  CHECK(off.sup_error == doctest::Approx(0.03).epsilon(1e-12));
  CHECK(off.sup_index == 1);
  CHECK(off.sup_time == 1.0);

  const std::vector<double> shifted{0.0, 1.0, 2.5};
  CHECK_THROWS_AS(compare_series(shifted, p, t, m), ModelError);
}

TEST_CASE("svg output") {
  PlotPanel panel{"molar mass", "t", "C", {{"a & b", {0.0, 1.0, 2.0}, {0.0, 0.5, 0.4}, false},
                                          {"ref", {0.0, 2.0}, {0.1, 0.3}, true}}};
  const std::string svg = render_svg(panel);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("a &amp; b") != std::string::npos);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
}

TEST_CASE("small study is deterministic across worker counts") {
  const auto root = std::filesystem::temp_directory_path() / "pbsrdd_test_cli";
  std::filesystem::remove_all(root);
  auto config = parse_config_text(
      R"({"t_end": 0.5, "gamma": [20, 40], "replicates": 12, "free_reference": false,
          "solver": {"collocation_points": 64, "dt_max": 0.005}})");
  std::string first;
  for (int workers : {1, 3}) {
    config.workers = workers;
    config.output_dir = (root / std::to_string(workers)).string();
    auto result = run_study(config);
    REQUIRE(result.gammas.size() == 2);
    CHECK(result.gammas[0].seed != result.gammas[1].seed);
    CHECK(std::filesystem::exists(root / std::to_string(workers) / "molar_mass.svg"));
    const auto summary = read_csv((root / std::to_string(workers) / "study_summary.csv").string());
    CHECK(summary.rows.size() == 2);
    const std::string text = slurp(root / std::to_string(workers) / "crdme_gamma40_mass.csv") +
                             slurp(root / std::to_string(workers) / "error_gamma20.csv");
    if (first.empty())
      first = text;
    else
      CHECK(text == first);
  }
  std::filesystem::remove_all(root);
}

TEST_CASE("shipped configs parse") {
  for (const char* name : {"desk.json", "quick.json", "full_sweep.json"}) {
    INFO(name);
    auto config = parse_config(std::string(PBSRDD_CONFIG_DIR) + "/" + name);
    CHECK(config.record_times.back() == config.t_end);
  }
  auto full = parse_config(std::string(PBSRDD_CONFIG_DIR) + "/full_sweep.json");
  CHECK(full.replicates == 280000);
  CHECK(full.gammas.size() == 8);
}
