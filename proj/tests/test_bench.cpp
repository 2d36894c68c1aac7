#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rank1part/rank1part.hpp"

using namespace rank1part;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// small planted co-clustering config, cheap enough for repeated bench runs
fs::path write_small_config(const fs::path& dir) {
  LbmConfig cfg;
  cfg.name = "small";
  cfg.m = 40;
  cfg.n = 30;
  cfg.k_r = 2;
  cfg.k_c = 2;
  cfg.row_props = {0.5, 0.5};
  cfg.col_props = {0.5, 0.5};
  cfg.block_means = Matrix(2, 2);
  cfg.block_means << 0.0, 3.0, 3.0, 6.0;
  cfg.block_std = 0.3;
  const nlohmann::json j = cfg;
  const fs::path path = dir / "small.json";
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  return path;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RANK1PART_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("run_pipeline: marginal extractor end to end on a tiny matrix") {
  Matrix a(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;
  PipelineOptions opts;
  opts.method = Method::kMarginal;
  opts.step2 = Step2::kSortedPotts;
  opts.lambda = 0.01;  // two coordinates, selection needs n >= 3
  const PipelineResult r = run_pipeline(DataMatrix(a), opts);
  REQUIRE(r.rows.cg(0) == 1.5);
  REQUIRE(r.rows.cg(1) == 3.5);
  REQUIRE(r.rows.k == 2);
  REQUIRE(r.cols.has_value());
  REQUIRE(r.shift_offset == 0.0);
}

TEST_CASE("run_pipeline: nmf on a rank-one matrix reports two row clusters") {
  Matrix a(2, 2);
  a << 4.0, 2.0, 2.0, 1.0;
  PipelineOptions opts;
  opts.method = Method::kNmf;
  opts.lambda = 1e-4;
  opts.nmf_restarts = 4;
  const PipelineResult r = run_pipeline(DataMatrix(a), opts);
  REQUIRE(r.rows.k == 2);
  REQUIRE(r.rows.denoised.size() == 2);
}

TEST_CASE("run_pipeline: threshold step2 with default gap") {
  Matrix a(6, 3);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = (i < 3 ? 1.0 : 10.0) + 0.01 * j + 0.001 * i;
  PipelineOptions opts;
  opts.method = Method::kMarginal;
  opts.step2 = Step2::kThreshold;
  const PipelineResult r = run_pipeline(DataMatrix(a), opts);
  REQUIRE(r.rows.k == 2);
  REQUIRE(r.rows.labels == std::vector<int>{0, 0, 0, 1, 1, 1});
}

TEST_CASE("run_pipeline: negative data is shifted for nonnegative extractors") {
  Matrix a(4, 3);
  a << -1.0, 2.0, 0.5,
       -0.5, 1.5, 0.25,
        5.0, 8.0, 6.0,
        5.5, 8.5, 6.5;
  PipelineOptions opts;
  opts.method = Method::kMarginal;
  opts.lambda = 0.7;  // large enough to absorb the within-group spread
  const PipelineResult r = run_pipeline(DataMatrix(a), opts);
  REQUIRE(r.shift_offset == Approx(1.01));
  REQUIRE(r.rows.k == 2);
}

TEST_CASE("cmd_generate: files, header, summary, determinism") {
  const fs::path dir = fresh_dir("r1p_generate_test");
  const fs::path matrix = dir / "d3.csv";
  std::ostringstream summary;
  LbmConfig cfg = *preset_config("D3");
  cfg.m = 30;
  cfg.n = 20;
  const nlohmann::json j = cfg;
  const fs::path config_path = dir / "d3_small.json";
  {
    std::ofstream out(config_path);
    out << j.dump() << '\n';
  }
  cmd_generate(config_path.string(), 5, matrix.string(), summary);
  REQUIRE(summary.str().find("30x20") != std::string::npos);

  const std::string matrix_bytes = slurp(matrix);
  REQUIRE(matrix_bytes.substr(0, 6) == "30,20\n");
  REQUIRE(fs::exists(dir / "d3.labels.csv"));

  cmd_generate(config_path.string(), 5, (dir / "again.csv").string(), summary);
  REQUIRE(slurp(dir / "again.csv") == matrix_bytes);
  REQUIRE(slurp(dir / "again.labels.csv") == slurp(dir / "d3.labels.csv"));
  fs::remove_all(dir);
}

TEST_CASE("cmd_run: writes vectors, labels, and a report with metrics") {
  const fs::path dir = fresh_dir("r1p_run_test");
  const fs::path matrix = dir / "data.csv";
  Matrix a(2, 2);
  a << 1.0, 2.0, 3.0, 4.0;
  write_matrix_csv(matrix.string(), DataMatrix(a));
  write_labels_csv(detail::sidecar_path(matrix.string()), {0, 1}, {0, 1});

  PipelineOptions opts;
  opts.method = Method::kMarginal;
  opts.lambda = 0.01;
  std::ostringstream os;
  cmd_run(matrix.string(), opts, (dir / "out").string(), os);

  const std::string u_txt = slurp(dir / "out" / "u.txt");
  REQUIRE(u_txt.find("1 1.5") != std::string::npos);
  REQUIRE(u_txt.find("2 3.5") != std::string::npos);
  REQUIRE(fs::exists(dir / "out" / "v.txt"));
  REQUIRE(fs::exists(dir / "out" / "u_denoised.txt"));
  REQUIRE(fs::exists(dir / "out" / "labels.csv"));

  const auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
  REQUIRE(report.at("nmi_rows").get<double>() == 1.0);
  const double er = report.at("ce_rows").get<double>();
  const double ec = report.at("ce_cols").get<double>();
  REQUIRE(report.at("cce").get<double>() == er + ec - er * ec);
  fs::remove_all(dir);
}

TEST_CASE("run_bench: smoke on a small config") {
  const fs::path dir = fresh_dir("r1p_bench_smoke");
  const fs::path config_path = write_small_config(dir);

  ExperimentSpec spec;
  spec.configs = {config_path.string()};
  spec.methods = {Method::kMarginal, Method::kNmf};
  spec.runs = 3;
  spec.base_seed = 42;
  spec.output_dir = (dir / "out").string();
  const BenchTable table = run_bench(spec);

  REQUIRE(table.config_names == std::vector<std::string>{"small"});
  REQUIRE(table.cells.size() == 2);
  for (std::size_t m = 0; m < 2; ++m) {
    const BenchCell& cell = table.cells[m][0];
    REQUIRE(cell.completed == 3);
    REQUIRE(cell.failed == 0);
    REQUIRE(cell.nmi_rows_mean >= 0.0);
    REQUIRE(cell.nmi_rows_mean <= 1.0);
  }
  REQUIRE(fs::exists(dir / "out" / "table1.csv"));
  REQUIRE(fs::exists(dir / "out" / "table1.json"));
  REQUIRE(fs::exists(dir / "out" / "figure4.txt"));
  REQUIRE(fs::exists(dir / "out" / "small" / "marginal" / "run0" / "report.json"));

  // per-run reports satisfy the cce identity
  for (int r = 0; r < 3; ++r) {
    const auto rep = nlohmann::json::parse(
        slurp(dir / "out" / "small" / "nmf" / ("run" + std::to_string(r)) / "report.json"));
    const double er = rep.at("ce_rows").get<double>();
    const double ec = rep.at("ce_cols").get<double>();
    REQUIRE(rep.at("cce").get<double>() == er + ec - er * ec);
  }
  fs::remove_all(dir);
}

TEST_CASE("run_bench: byte-identical outputs for identical specs") {
  const fs::path dir = fresh_dir("r1p_bench_determinism");
  const fs::path config_path = write_small_config(dir);

  ExperimentSpec spec;
  spec.configs = {config_path.string()};
  spec.methods = {Method::kMarginal};
  spec.runs = 3;
  spec.base_seed = 7;

  spec.output_dir = (dir / "a").string();
  run_bench(spec);
  spec.output_dir = (dir / "b").string();
  run_bench(spec);

  REQUIRE(slurp(dir / "a" / "table1.csv") == slurp(dir / "b" / "table1.csv"));
  REQUIRE(slurp(dir / "a" / "figure4.txt") == slurp(dir / "b" / "figure4.txt"));

  // table1.json is identical except for wall-clock timings
  auto ja = nlohmann::json::parse(slurp(dir / "a" / "table1.json"));
  auto jb = nlohmann::json::parse(slurp(dir / "b" / "table1.json"));
  for (auto* j : {&ja, &jb})
    for (auto& row : (*j)["table"])
      for (auto& cell : row["cells"]) cell.erase("wall_mean_seconds");
  REQUIRE(ja == jb);

  // worker count must not change the aggregates
  setenv("RANK1PART_THREADS", "3", 1);
  spec.output_dir = (dir / "c").string();
  run_bench(spec);
  unsetenv("RANK1PART_THREADS");
  REQUIRE(slurp(dir / "a" / "table1.csv") == slurp(dir / "c" / "table1.csv"));
  REQUIRE(slurp(dir / "a" / "figure4.txt") == slurp(dir / "c" / "figure4.txt"));
  fs::remove_all(dir);
}

TEST_CASE("run_bench: failures are recorded without aborting") {
  const fs::path dir = fresh_dir("r1p_bench_failures");
  const fs::path config_path = write_small_config(dir);  // 40x30, rectangular

  ExperimentSpec spec;
  spec.configs = {config_path.string()};
  spec.methods = {Method::kCcot, Method::kMarginal};  // ccot requires square input
  spec.runs = 2;
  spec.output_dir = (dir / "out").string();
  const BenchTable table = run_bench(spec);

  REQUIRE(table.cells[0][0].failed == 2);
  REQUIRE(table.cells[0][0].completed == 0);
  REQUIRE(table.cells[1][0].completed == 2);
  const auto rep = nlohmann::json::parse(
      slurp(dir / "out" / "small" / "ccot" / "run0" / "report.json"));
  REQUIRE(rep.contains("error"));
  const std::string table_csv = slurp(dir / "out" / "table1.csv");
  REQUIRE(table_csv.find("ccot,-") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("experiment spec JSON parsing") {
  const nlohmann::json j = {{"configs", {"D1"}},
                            {"methods", {"marginal", "fiedler_ds"}},
                            {"step2", "sorted_potts"},
                            {"p", 1},
                            {"runs", 5},
                            {"base_seed", 3},
                            {"output_dir", "x"}};
  const ExperimentSpec spec = j.get<ExperimentSpec>();
  REQUIRE(spec.configs == std::vector<std::string>{"D1"});
  REQUIRE(spec.methods.size() == 2);
  REQUIRE(spec.runs == 5);

  nlohmann::json bad = j;
  bad["methods"] = {"nope"};
  REQUIRE_THROWS_AS(bad.get<ExperimentSpec>(), ArgumentError);
  bad = j;
  bad["runs"] = 0;
  REQUIRE_THROWS_AS(bad.get<ExperimentSpec>(), ArgumentError);
  bad = j;
  bad.erase("configs");
  REQUIRE_THROWS_AS(bad.get<ExperimentSpec>(), ArgumentError);
}

// ---------------------------------------------------------------------------
// CLI subprocess checks (exit codes per the interface contract)
// ---------------------------------------------------------------------------

TEST_CASE("cli: generate + run + evaluate round trip") {
  const fs::path dir = fresh_dir("r1p_cli_roundtrip");
  const fs::path config_path = write_small_config(dir);
  const fs::path matrix = dir / "data.csv";

  REQUIRE(run_cli("generate --config " + config_path.string() + " --seed 1 --out " +
                  matrix.string()) == 0);
  REQUIRE(run_cli("run --matrix " + matrix.string() + " --method marginal --out " +
                  (dir / "out").string()) == 0);
  REQUIRE(fs::exists(dir / "out" / "report.json"));
  REQUIRE(run_cli("evaluate --truth " + (dir / "data.labels.csv").string() + " --pred " +
                  (dir / "out" / "labels.csv").string()) == 0);
  fs::remove_all(dir);
}

TEST_CASE("cli: exit code 2 for argument and config errors") {
  const fs::path dir = fresh_dir("r1p_cli_argerr");
  REQUIRE(run_cli("generate --config NOPE --seed 1 --out " + (dir / "x.csv").string()) == 2);

  // malformed config: proportions do not sum to 1
  const fs::path bad = dir / "bad.json";
  {
    std::ofstream out(bad);
    out << R"({"m":10,"n":8,"k_r":2,"k_c":2,"row_props":[0.9,0.2],"col_props":[0.5,0.5],)"
        << R"("block_means":[[0,1],[1,0]],"block_std":1.0,"name":"bad"})";
  }
  REQUIRE(run_cli("generate --config " + bad.string() + " --seed 1 --out " +
                  (dir / "y.csv").string()) == 2);
  fs::remove_all(dir);
}

TEST_CASE("cli: exit code 3 when selection finds no structure") {
  const fs::path dir = fresh_dir("r1p_cli_selerr");
  const fs::path matrix = dir / "const.csv";
  write_matrix_csv(matrix.string(), DataMatrix(Matrix::Constant(6, 4, 1.0)));
  REQUIRE(run_cli("run --matrix " + matrix.string() + " --method marginal --out " +
                  (dir / "out").string()) == 3);
  fs::remove_all(dir);
}

TEST_CASE("cli: exit code 4 for missing files") {
  REQUIRE(run_cli("run --matrix /nonexistent/m.csv --method marginal --out /tmp/r1p_none") == 4);
  REQUIRE(run_cli("bench /nonexistent/spec.json") == 4);
}
