#include "idl/cli.hpp"
#include "idl/matrix_io.hpp"

#include "temp_dir.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <sys/wait.h>

using namespace idl;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "idl");
  std::vector<const char*> argv;
  for (const auto& a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Runs the installed binary, returning its exit status.
int binary(const std::string& args) {
  const int status = std::system((std::string(IDL_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("synth, train, metrics pipeline") {
  testing::TempDir dir;
  const std::string data = (dir / "x.csv").string();
  const std::string planted = (dir / "planted.bin").string();
  Run s = cli({"synth", "--dim", "6", "--size", "10", "--sparsity", "2", "--n", "120", "--noise", "0.01", "--seed",
               "3", "--out", data, "--planted-out", planted});
  REQUIRE(s.code == 0);
  CHECK(load_matrix(data).cols() == 120);
  CHECK(load_matrix(planted).cols() == 10);
  CHECK(nlohmann::json::parse(s.out).at("planted_mu").get<double>() >= 0.0);

  const std::string dict = (dir / "d.bin").string();
  const std::string hist = (dir / "h.jsonl").string();
  Run t = cli({"train", "--data", data, "--size", "10", "--method", "inksvd", "--mu-t", "0.7", "--iters", "3",
               "--out", dict, "--history", hist});
  REQUIRE(t.code == 0);
  const auto j = nlohmann::json::parse(t.out);
  CHECK(j.at("method") == "inksvd");
  CHECK(j.at("iterations") == 3);
  std::istringstream lines(slurp(hist));
  std::string line;
  int count = 0;
  while (std::getline(lines, line))
    count += nlohmann::json::parse(line).contains("approx_error") ? 1 : 0;
  CHECK(count == 3);

  Run csvh = cli({"train", "--data", data, "--size", "10", "--iters", "2", "--coder", "omp", "--coder-param", "2",
                  "--history", (dir / "h.csv").string()});
  CHECK(csvh.code == 0);
  CHECK(slurp(dir / "h.csv").rfind("iteration,", 0) == 0);

  Run m = cli({"metrics", "--dict", dict, "--bins", "5"});
  REQUIRE(m.code == 0);
  const auto g = nlohmann::json::parse(m.out);
  CHECK(g.at("hist_counts").size() == 5);
  CHECK(g.at("mu").get<double>() <= 0.7 + 1e-9);
}

TEST_CASE("ingest from csv samples") {
  testing::TempDir dir;
  std::ofstream(dir / "s.csv") << "0.1,0.2,0.3,0.4\n0.5,0.6,0.7,0.8\n";
  const std::string out = (dir / "frames.csv").string();
  Run r = cli({"ingest", "--csv", (dir / "s.csv").string(), "--frame-len", "8", "--num-frames", "1", "--out", out});
  REQUIRE(r.code == 0);
  const Matrix f = load_matrix(out);
  CHECK(f.rows() == 8);
  CHECK(f(4, 0) == 0.5);
}

TEST_CASE("experiment subcommands") {
  testing::TempDir dir;
  std::ofstream(dir / "exp.cfg") << "dim = 5\nsize = 8\nn_train = 80\nn_test = 20\nsparsity = 2\niterations = 2\n"
                                    "idl_gammas = 0\nksvd_mu_t = 1\ninksvd_mu_t = 0.8\ncardinalities = 1,2,5\n";
  const std::string cfg = (dir / "exp.cfg").string();
  Run a = cli({"spectrum-exp", "--config", cfg});
  REQUIRE(a.code == 0);
  CHECK(nlohmann::json::parse(a.out).at("grid").size() == 3);

  Run g = cli({"gen-exp", "--config", cfg, "--out", (dir / "gen").string(), "--format", "csv"});
  REQUIRE(g.code == 0);
  CHECK(std::filesystem::exists(dir / "gen" / "manifest.csv"));
  CHECK(cli({"gen-exp", "--config", cfg, "--format", "xml"}).code == kExitValidation);
}

TEST_CASE("exit codes") {
  testing::TempDir dir;
  CHECK(cli({"train"}).code == kExitValidation);
  CHECK(cli({"frobnicate"}).code == kExitValidation);
  CHECK(cli({"train", "--data", (dir / "missing.csv").string()}).code == kExitIo);
  CHECK(cli({"metrics", "--dict", (dir / "missing.bin").string()}).code == kExitIo);

  std::ofstream(dir / "bad.csv") << "1,2\n3\n";
  Run bad = cli({"metrics", "--dict", (dir / "bad.csv").string()});
  CHECK(bad.code == kExitValidation);
  CHECK_FALSE(bad.err.empty());

  std::ofstream(dir / "x.csv") << "1,0\n0,1\n";
  CHECK(cli({"train", "--data", (dir / "x.csv").string(), "--size", "2", "--method", "lasso"}).code ==
        kExitValidation);
  CHECK(cli({"train", "--data", (dir / "x.csv").string(), "--size", "2", "--gamma", "-1"}).code == kExitValidation);
  CHECK(cli({"ingest", "--out", (dir / "o.csv").string()}).code == kExitValidation);
  std::ofstream(dir / "bad.cfg") << "colour = blue\n";
  CHECK(cli({"spectrum-exp", "--config", (dir / "bad.cfg").string()}).code == kExitValidation);
  CHECK(cli({"spectrum-exp", "--config", (dir / "none.cfg").string()}).code == kExitIo);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("installed binary reports the same exit codes") {
  testing::TempDir dir;
  std::ofstream(dir / "x.csv") << "1,0,0.5\n0,1,0.5\n";
  const std::string x = (dir / "x.csv").string();
  CHECK(binary("metrics --dict " + x) == 0);
  CHECK(binary("metrics --bins 0 --dict " + x) == 2);
  CHECK(binary("metrics --dict " + (dir / "nope.csv").string()) == 3);
  CHECK(binary("") == 2);
}
