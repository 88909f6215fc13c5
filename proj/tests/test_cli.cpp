#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <Eigen/Dense>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "corrchol_cli_tests";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args, const std::string& input = "") {
  static int counter = 0;
  const fs::path base = scratch_dir() / ("run" + std::to_string(counter++));
  const fs::path in_path = base.string() + ".in";
  const fs::path out_path = base.string() + ".out";
  const fs::path err_path = base.string() + ".err";
  {
    std::ofstream in(in_path, std::ios::binary);
    in << input;
  }
  const std::string cmd = std::string(CORRCHOL_CLI_PATH) + " " + args + " < " +
                          in_path.string() + " > " + out_path.string() +
                          " 2> " + err_path.string();
  const int status = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  bool first = true;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    if (first) {  // header
      first = false;
      continue;
    }
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(std::stod(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path path = scratch_dir() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("transform mode maps the origin to the identity factor") {
  const CliResult r =
      run_cli("--mode transform --dim 3 --lb -1 --ub 1", "0,0,0\n");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("l_2_1,l_3_1,l_3_2,log_jacobian") != std::string::npos);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].size() == 4);
  CHECK(rows[0][0] == 0.0);
  CHECK(rows[0][1] == 0.0);
  CHECK(rows[0][2] == 0.0);
  CHECK(rows[0][3] == doctest::Approx(-2.0794415416798357).epsilon(1e-15));
}

TEST_CASE("transform output pipes back through inverse") {
  const CliResult fwd = run_cli("--mode transform --dim 4",
                                "0.3,-0.2,0.5,1.0,-1.5,0.7\n0,0,0,0,0,0\n");
  REQUIRE(fwd.exit_code == 0);
  // header line included: the inverse reader skips it
  const CliResult inv = run_cli("--mode inverse --dim 4", fwd.out);
  REQUIRE(inv.exit_code == 0);
  const auto rows = parse_csv(inv.out);
  REQUIRE(rows.size() == 2);
  const std::vector<double> expected = {0.3, -0.2, 0.5, 1.0, -1.5, 0.7};
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(rows[0][k] == doctest::Approx(expected[k]).epsilon(1e-9));
    CHECK(rows[1][k] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("sample mode respects positivity bounds") {
  const CliResult r = run_cli(
      "--mode sample --dim 3 --eta 1 --lb 0 --ub 1 --samples 1000 --seed 7");
  CHECK(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 1000);
  for (const auto& row : rows) {
    REQUIRE(row.size() == 4);  // three correlations plus log-posterior
    Eigen::Matrix3d corr = Eigen::Matrix3d::Identity();
    corr(1, 0) = corr(0, 1) = row[0];
    corr(2, 0) = corr(0, 2) = row[1];
    corr(2, 1) = corr(1, 2) = row[2];
    for (int k = 0; k < 3; ++k) {
      CHECK(row[k] > 0.0);
      CHECK(row[k] < 1.0);
    }
    const Eigen::LLT<Eigen::Matrix3d> llt(corr);
    CHECK(llt.info() == Eigen::Success);
  }
}

TEST_CASE("identical flags and seed reproduce output bytes") {
  const std::string args =
      "--mode sample --dim 3 --samples 200 --warmup 300 --seed 99";
  CHECK(run_cli(args).out == run_cli(args).out);

  const std::string multi = args + " --chains 3";
  const CliResult a = run_cli(multi);
  const CliResult b = run_cli(multi);
  CHECK(a.out == b.out);
  CHECK(a.out.find("chain,corr_2_1") == 0);  // chain-id column when fanned out
  const auto rows = parse_csv(a.out);
  CHECK(rows.size() == 600);
  CHECK(rows.front()[0] == 0.0);
  CHECK(rows.back()[0] == 2.0);
}

TEST_CASE("check-bounds reports the worked infeasible configuration") {
  const fs::path pins = write_file(
      "golden_pins.json",
      R"({"pins": [{"i": 2, "j": 1, "value": -0.70710678},
                   {"i": 3, "j": 1, "value": -0.70710678}]})");
  const CliResult r = run_cli("--mode check-bounds --dim 3 --lb -1 --ub 0 " +
                              std::string("--pins-file ") + pins.string());
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("(3,2)") != std::string::npos);

  const CliResult ok = run_cli("--mode check-bounds --dim 3 --lb -1 --ub 0");
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.find("feasible") != std::string::npos);
}

TEST_CASE("transform propagates infeasibility as exit 2") {
  const CliResult r = run_cli("--mode transform --dim 3 --lb -1 --ub 0",
                              "-0.881374,-0.881374,0\n");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("(3,2)") != std::string::npos);
}

TEST_CASE("usage and input errors exit with code 1") {
  CHECK(run_cli("--mode transform --dim 1").exit_code == 1);
  CHECK(run_cli("--mode transform").exit_code == 1);
  CHECK(run_cli("--mode nonsense --dim 3").exit_code == 1);
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("--mode transform --dim 3", "0,0\n").exit_code == 1);
  CHECK(run_cli("--mode transform --dim 3", "a,b,c\n").exit_code == 1);
  CHECK(run_cli("--mode sample --dim 3 --bounds-file /nonexistent.json")
            .exit_code == 1);
  // an inverse row whose strict-lower entries exceed a unit row
  CHECK(run_cli("--mode inverse --dim 3", "0.9,0.9,0.9\n").exit_code == 1);
  // a value outside its declared bound is an infeasibility, not an IO error
  CHECK(run_cli("--mode inverse --dim 2 --lb -1 --ub 0", "0.5\n").exit_code ==
        2);
}

TEST_CASE("bounds file entries override the scalar default") {
  const fs::path bounds = write_file("bounds.json", R"({
    "n": 3,
    "default": [-1, 1],
    "entries": [{"i": 2, "j": 1, "lb": 0.2, "ub": 0.6}]
  })");
  const CliResult r =
      run_cli("--mode sample --dim 3 --samples 300 --seed 5 --bounds-file " +
              bounds.string());
  REQUIRE(r.exit_code == 0);
  for (const auto& row : parse_csv(r.out)) {
    CHECK(row[0] > 0.2);
    CHECK(row[0] < 0.6);
    CHECK(row[1] > -1.0);
    CHECK(row[1] < 1.0);
  }
}

TEST_CASE("jsonl format emits one object per record") {
  const CliResult r = run_cli(
      "--mode sample --dim 2 --samples 50 --seed 1 --format jsonl");
  REQUIRE(r.exit_code == 0);
  int lines = 0;
  std::istringstream ss(r.out);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    ++lines;
    CHECK(line.front() == '{');
    CHECK(line.find("\"corr\"") != std::string::npos);
    CHECK(line.find("\"log_posterior\"") != std::string::npos);
  }
  CHECK(lines == 50);

  const CliResult t = run_cli("--mode transform --dim 3 --format jsonl",
                              "0,0,0\n");
  REQUIRE(t.exit_code == 0);
  CHECK(t.out.find("\"l\":[0.0,0.0,0.0]") != std::string::npos);
  CHECK(t.out.find("\"log_jacobian\":-2.07944") != std::string::npos);
}

TEST_CASE("CORRCHOL_LOG=debug traces every iteration to stderr") {
  static int counter = 0;
  const fs::path base =
      scratch_dir() / ("trace" + std::to_string(counter++));
  const std::string cmd =
      std::string("CORRCHOL_LOG=debug ") + CORRCHOL_CLI_PATH +
      " --mode sample --dim 2 --samples 5 --warmup 5 --seed 1 > " +
      base.string() + ".out 2> " + base.string() + ".err";
  REQUIRE(std::system(cmd.c_str()) == 0);
  const std::string err = slurp(base.string() + ".err");
  int trace_lines = 0;
  std::istringstream ss(err);
  std::string line;
  while (std::getline(ss, line))
    if (line.rfind("iter=", 0) == 0) ++trace_lines;
  CHECK(trace_lines == 10);
  CHECK(err.find("accept_rate=") != std::string::npos);
}

TEST_CASE("output file receives the same bytes as stdout") {
  const fs::path out_path = scratch_dir() / "direct.csv";
  const std::string args = "--mode sample --dim 2 --samples 100 --seed 3";
  const CliResult to_stdout = run_cli(args);
  const CliResult to_file = run_cli(args + " --output " + out_path.string());
  CHECK(to_file.exit_code == 0);
  CHECK(to_file.out.empty());
  CHECK(slurp(out_path) == to_stdout.out);
}
