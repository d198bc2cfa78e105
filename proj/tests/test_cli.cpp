#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "mertens/cli.hpp"
#include "mertens/io.hpp"
#include "mertens/matrix_builder.hpp"

using namespace mertens;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mertens-cli-tests";
  fs::create_directories(dir);
  return dir / name;
}

int run_process(const std::string& command) {
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("mertens subcommand") {
  const auto r = run_cli({"mertens", "--n", "100"});
  CHECK(r.code == 0);
  CHECK(r.out == "1\n");
  CHECK(run_cli({"mertens", "--n", "0"}).out == "0\n");

  const auto table = scratch("mu.csv");
  CHECK(run_cli({"mertens", "--n", "10", "--table", table.string()}).code == 0);
  const std::string csv = slurp(table);
  CHECK(csv.rfind("# config: ", 0) == 0);
  CHECK(csv.find("n,mu,mertens\n1,1,1\n") != std::string::npos);
  CHECK(csv.find("\n4,0,-1\n") != std::string::npos);
  CHECK(csv.substr(csv.size() - 8) == "10,1,-1\n");

  CHECK(run_cli({"--sieve-limit", "50", "mertens", "--n", "100"}).code == cli::kUsageError);
}

TEST_CASE("verify subcommand") {
  const auto r = run_cli({"verify", "--n", "4"});
  CHECK(r.code == 0);
  CHECK(r.out.find("n=4 I1-exact PASS") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("verify: 1/1") != std::string::npos);

  const auto range = run_cli({"verify", "--k-min", "2", "--k-max", "40"});
  CHECK(range.code == 0);
  CHECK(range.out.find("verify: 39/39") != std::string::npos);

  CHECK(run_cli({"verify", "--n", "5"}).code == cli::kUsageError);
  CHECK(run_cli({"verify"}).code == cli::kUsageError);
  CHECK(run_cli({"verify", "--n", "4", "--k-min", "2", "--k-max", "3"}).code == cli::kUsageError);
  // a dimension cap below the problem size makes the build check fail
  CHECK(run_cli({"--max-dim", "5", "verify", "--n", "16"}).code == cli::kVerificationFailure);
}

TEST_CASE("usage errors exit 1 with a single-line diagnostic") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"spectrum", "--n", "0", "--matrix", "M"},
           {"spectrum", "--n", "4", "--matrix", "X"},
           {"matrix", "--n", "4", "--kind", "Q"},
           {"bogus"},
           {},
           {"fit-curve", "--n-min", "10", "--n-max", "100", "--points", "5", "--out",
            scratch("fit-bad.csv").string()},
           {"sweep", "--k-min", "1", "--k-max", "3", "--matrix", "M", "--out",
            scratch("bad.csv").string()}}) {
    const auto r = run_cli(args);
    CHECK(r.code == cli::kUsageError);
    CHECK(!r.err.empty());
    CHECK(r.err.find('\n') == r.err.size() - 1);
  }
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("spectrum JSON and eigenvector sidecar") {
  const auto sidecar = scratch("eig.txt");
  const auto r = run_cli({"spectrum", "--n", "4", "--matrix", "Kinv", "--top", "8", "--eigvecs",
                          "--eigvecs-out", sidecar.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("{\"n\":4,\"kind\":\"Kinv\",\"eigenvalues\":[", 0) == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["eigenvalues"].size() == 3);
  CHECK(j["eigenvalues"][0].get<double>() == doctest::Approx(2.170).epsilon(0.005));
  CHECK(j["residual_max"].get<double>() < 1e-12);

  std::istringstream lines(slurp(sidecar));
  std::string header;
  std::getline(lines, header);
  CHECK(header == "# mertens-eigvecs v1 n=4 kind=Kinv dim=3 count=3");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("matrix dump round-trips bit-exactly") {
  const auto path = scratch("m16.txt");
  REQUIRE(run_cli({"matrix", "--n", "16", "--kind", "M", "--out", path.string()}).code == 0);
  std::ifstream in(path);
  const auto dump = read_matrix_dump(in);
  CHECK(dump.kind == "M");
  CHECK(dump.n == 16);
  const auto s = divisor_value_set(16);
  const auto expected = build_m(build_u(s), build_t(s.size()));
  CHECK(dump.matrix == expected.matrix());

  for (const char* kind : {"U", "Uk", "T", "D", "K", "Kinv"}) {
    const auto r = run_cli({"matrix", "--n", "9", "--kind", kind});
    CHECK(r.code == 0);
    CHECK(r.out.rfind(std::string("# mertens-matrix v1 kind=") + kind + " n=9 dim=5\n", 0) == 0);
  }
  CHECK(run_cli({"matrix", "--n", "10", "--kind", "Uk"}).code == cli::kUsageError);
  CHECK(run_cli({"matrix", "--n", "10", "--kind", "M"}).code == 0);
}

TEST_CASE("shortest formatting parses back to the same double") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100000; ++i) {
    std::uint64_t bits = rng();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    const double back = parse_double(format_shortest(v));
    REQUIRE(std::memcmp(&back, &v, sizeof v) == 0);
  }
}

TEST_CASE("sweep CSV layout and determinism across worker counts") {
  const auto a = scratch("sweep-w1.csv");
  const auto b = scratch("sweep-w4.csv");
  REQUIRE(run_cli({"sweep", "--k-min", "2", "--k-max", "25", "--matrix", "Kinv", "--out",
                   a.string(), "--workers", "1"}).code == 0);
  REQUIRE(run_cli({"sweep", "--k-min", "2", "--k-max", "25", "--matrix", "Kinv", "--out",
                   b.string(), "--workers", "4"}).code == 0);
  const std::string csv = slurp(a);
  CHECK(csv == slurp(b));

  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  CHECK(line.rfind("# config: sweep k_min=2 k_max=25 step=1 matrix=Kinv", 0) == 0);
  std::getline(lines, line);
  CHECK(line.rfind("# version: ", 0) == 0);
  std::getline(lines, line);
  CHECK(line == kSweepHeader);
  std::getline(lines, line);
  CHECK(line.rfind("2,4,Kinv,", 0) == 0);
  CHECK(line.find(",NA,NA,NA,NA,NA,") != std::string::npos);
  CHECK(line.substr(line.size() - 3) == ",ok");

  const auto m = run_cli({"sweep", "--k-min", "2", "--k-max", "3", "--matrix", "M", "--out",
                          scratch("sweep-m.csv").string()});
  CHECK(m.code == 0);
  const std::string mcsv = slurp(scratch("sweep-m.csv"));
  CHECK(mcsv.find("\n3,9,M,") != std::string::npos);
}

TEST_CASE("sweep rows beyond the dimension cap are marked and the run reports failure") {
  const auto path = scratch("sweep-cap.csv");
  const auto r = run_cli({"--max-dim", "9", "sweep", "--k-min", "4", "--k-max", "6", "--matrix",
                          "M", "--out", path.string()});
  CHECK(r.code == cli::kUsageError);
  const std::string csv = slurp(path);
  CHECK(csv.find("\n6,36,M,NA,") != std::string::npos);
  CHECK(csv.find(",error:capacity\n") != std::string::npos);
}

TEST_CASE("fit-curve and kernel reports") {
  const auto fit = scratch("fit.csv");
  REQUIRE(run_cli({"fit-curve", "--n-min", "16", "--n-max", "1e6", "--points", "50", "--out",
                   fit.string()}).code == 0);
  const std::string csv = slurp(fit);
  CHECK(csv.find("n,overlay,reference_term\n16,") != std::string::npos);

  const auto hs = run_cli({"kernel-hs", "--epsilon", "0.25,0.4", "--cells", "64"});
  CHECK(hs.code == 0);
  CHECK(hs.out.find("epsilon,delta,hs_norm,bound,two_grid_error\n0.25,NA,") != std::string::npos);
  CHECK(run_cli({"kernel-hs", "--epsilon", "0"}).code == cli::kUsageError);

  const auto dist = scratch("dist.csv");
  REQUIRE(run_cli({"kernel-distance", "--eps-list", "0.1,0.2", "--delta-list", "0.1,0.05",
                   "--cells", "32", "--out", dist.string()}).code == 0);
  const std::string dcsv = slurp(dist);
  CHECK(dcsv.find("\n0.1,0.1,") != std::string::npos);
  CHECK(dcsv.find("\n0.2,0.05,") != std::string::npos);
}

TEST_CASE("executable honours MERTENS_SPECTRA_MAX_DIM and exit codes") {
  const std::string exe = MERTENS_CLI_PATH;
  const std::string quiet = " >/dev/null 2>&1";
  CHECK(run_process(exe + " mertens --n 100" + quiet) == 0);
  CHECK(run_process(exe + " verify --n 4" + quiet) == 0);
  CHECK(run_process(exe + " spectrum --n 0 --matrix M" + quiet) == 1);
  CHECK(run_process("MERTENS_SPECTRA_MAX_DIM=5 " + exe + " matrix --n 100 --kind U" + quiet) == 1);
  CHECK(run_process("MERTENS_SPECTRA_MAX_DIM=19 " + exe + " matrix --n 100 --kind U" + quiet) == 0);
  CHECK(run_process("MERTENS_SPECTRA_MAX_DIM=abc " + exe + " mertens --n 5" + quiet) == 1);
}
