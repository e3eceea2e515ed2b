#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kernelskel/experiments.hpp"
#include "test_support.hpp"

using namespace kernelskel;

namespace {

std::string scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("ks_cli_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

// file body below the comment header
std::string csv_body(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::ostringstream body;
  std::string line;
  while (std::getline(f, line))
    if (line.empty() || line[0] != '#') body << line << "\n";
  return body.str();
}

std::string csv_header(const std::string& path) {
  std::ifstream f(path);
  std::string line;
  std::getline(f, line);
  return line;
}

ExperimentConfig tiny_exp1() {
  ExperimentConfig cfg;
  cfg.experiment = "exp1";
  cfg.kernel = "multiquadric";
  cfg.x0_count = 120;
  cfg.probe_count = 1500;
  cfg.random_proxy_count = 200;
  cfg.xd_count = 300;
  cfg.yd_count = 3000;
  cfg.scheme = "id";
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("config files parse and unknown keys are rejected") {
  const std::string dir = scratch_dir("config");
  const std::string path = dir + "/run.cfg";
  {
    std::ofstream f(path);
    f << "# comment line\n";
    f << "kernel = inv-dist\n";
    f << "dim=3\n";
    f << "y0_sizes = 100,200\n";
    f << "tol = 1e-5  # trailing comment\n";
  }
  ExperimentConfig cfg = config_from_file(path);
  CHECK(cfg.kernel == "inv-dist");
  CHECK(cfg.dim == 3);
  CHECK(cfg.y0_sizes == std::vector<long>{100, 200});
  CHECK(cfg.tol == doctest::Approx(1e-5));

  ExperimentConfig bad;
  CHECK_THROWS_AS(apply_config_entry(bad, "nope", "1"), std::invalid_argument);
}

TEST_CASE("scheme strings parse") {
  CHECK(std::holds_alternative<IdSelectParams>(parse_scheme("id", 1)));
  CHECK(std::get<SchemeRandom>(parse_scheme("random:123", 9)).n == 123);
  CHECK(std::get<SchemeSurface>(parse_scheme("surface:55", 1)).n == 55);
  CHECK_THROWS(parse_scheme("bogus", 1));
}

TEST_CASE("exp1 emits tagged rows and is byte-reproducible") {
  ExperimentConfig cfg = tiny_exp1();
  cfg.out_dir = scratch_dir("exp1a");
  ExperimentSummary first = run_experiment(cfg);
  REQUIRE(first.files.size() == 1);
  CHECK(csv_header(first.files[0]) == "# schema-version: 1");
  CHECK(first.metrics.count("deviation_id") == 1);
  CHECK(first.metrics.count("max_ratio_id") == 1);
  CHECK(first.metrics["rank_id"] > 0);

  // every row carries the scheme tag and the rank
  std::istringstream body(csv_body(first.files[0]));
  std::string line;
  std::getline(body, line);
  CHECK(line == "scheme,rank,sort_index,row_index,ratio_max,ratio_avg");
  long rows = 0;
  while (std::getline(body, line)) {
    CHECK((line.rfind("id,", 0) == 0 || line.rfind("random,", 0) == 0));
    ++rows;
  }
  CHECK(rows > 0);

  cfg.out_dir = scratch_dir("exp1b");
  ExperimentSummary second = run_experiment(cfg);
  CHECK(csv_body(first.files[0]) == csv_body(second.files[0]));
}

TEST_CASE("exp2 produces matched-rank baselines") {
  ExperimentConfig cfg;
  cfg.experiment = "exp2";
  cfg.xd_count = 300;
  cfg.yd_count = 3000;
  cfg.kernel = "multiquadric";
  cfg.dim = 2;
  cfg.x0_count = 150;
  cfg.y0_sizes = {500, 1500};
  cfg.heavy_baseline_max = 500;
  cfg.time_reps = 1;
  cfg.seed = 3;
  cfg.out_dir = scratch_dir("exp2");
  ExperimentSummary sum = run_experiment(cfg);
  REQUIRE(sum.files.size() == 2);
  CHECK(sum.metrics["rank"] > 0);
  // all methods report errors at both sizes; svd only at the capped size
  for (const std::string m : {"proxy-id", "proxy-rand", "id-refined", "srrqr", "aca"}) {
    CHECK(sum.metrics.count("err_" + m + "_500") == 1);
    CHECK(sum.metrics.count("err_" + m + "_1500") == 1);
  }
  CHECK(sum.metrics.count("err_svd_500") == 1);
  CHECK(sum.metrics.count("err_svd_1500") == 0);
  // the proxy construction is reused across target sizes
  CHECK(sum.metrics["sec_proxy-id_500"] == sum.metrics["sec_proxy-id_1500"]);
}

TEST_CASE("exp3 sweeps selection schemes at matched rank") {
  ExperimentConfig cfg;
  cfg.experiment = "exp3";
  cfg.xd_count = 300;
  cfg.yd_count = 3000;
  cfg.kernel = "multiquadric";
  cfg.dim = 2;
  cfg.x0_count = 120;
  cfg.y0_sizes = {600};
  cfg.seed = 5;
  cfg.out_dir = scratch_dir("exp3");
  ExperimentSummary sum = run_experiment(cfg);
  CHECK(sum.metrics["yp_id"] > 0);
  const long yp = static_cast<long>(sum.metrics["yp_id"]);
  CHECK(sum.metrics.count("err_id_600") == 1);
  CHECK(sum.metrics.count("err_random-" + std::to_string(yp) + "_600") == 1);
  CHECK(sum.metrics.count("err_surface-" + std::to_string(2 * yp) + "_600") == 1);
}

TEST_CASE("exp4 reports the error field maxima for both candidate layouts") {
  ExperimentConfig cfg;
  cfg.experiment = "exp4";
  cfg.xd_count = 300;
  cfg.yd_count = 3000;
  cfg.kernel = "inv-dist";
  cfg.pair = "near";
  cfg.dim = 2;
  cfg.x0_count = 100;
  cfg.probe_count = 2000;
  cfg.seed = 9;
  cfg.out_dir = scratch_dir("exp4");
  ExperimentSummary sum = run_experiment(cfg);
  CHECK(sum.metrics["max_field_default"] > 0);
  CHECK(sum.metrics["max_field_adaptive"] > 0);
  CHECK(sum.metrics["yp_adaptive"] > 0);
}

TEST_CASE("exp5 runs the table experiment and refuses infeasible configs") {
  ExperimentConfig cfg;
  cfg.experiment = "exp5";
  cfg.kernel = "multiquadric";
  cfg.dim = 2;
  cfg.n_list = {1200};
  cfg.leaf_cap = 150;
  cfg.adm = "strong";
  cfg.mode = "proxy";
  cfg.seed = 7;
  cfg.out_dir = scratch_dir("exp5");
  ExperimentSummary sum = run_experiment(cfg);
  CHECK(sum.metrics["E_1200"] < 1e-4);
  CHECK(sum.metrics["stotal_1200"] > 0);
  CHECK(sum.metrics["sn_1200"] == doctest::Approx(dense_storage_mb(1200)));

  cfg.kernel = "inv-dist";
  cfg.adm = "weak";
  cfg.mode = "proxy";
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

  cfg.n_list = {500000};
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);  // n_max guard
}

TEST_CASE("unknown experiment name is rejected") {
  ExperimentConfig cfg;
  cfg.experiment = "exp9";
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}
