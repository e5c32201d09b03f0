#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "cli.log";
  const std::string cmd =
      std::string(WBC_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("wbc_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("solve-contract with defaults produces a verifiable menu") {
  const fs::path dir = fresh_dir("solve");
  const auto solve = run_cli("solve-contract --out " + (dir / "out").string(), dir);
  CHECK(solve.exit_code == 0);
  CHECK(fs::exists(dir / "out" / "menu.json"));
  CHECK(fs::exists(dir / "out" / "menu.csv"));
  CHECK(fs::exists(dir / "out" / "manifest.json"));
  CHECK(solve.output.find("verification passed") != std::string::npos);

  const auto verify =
      run_cli("verify " + (dir / "out" / "menu.json").string(), dir);
  CHECK(verify.exit_code == 0);

  // The artifact embeds the hash of the configuration that produced it.
  CHECK(slurp(dir / "out" / "menu.json").find("config_hash") != std::string::npos);
}

TEST_CASE("invalid configuration exits 1 naming the field") {
  const fs::path dir = fresh_dir("badcfg");
  write_file(dir / "config.json", R"({"econ": {"theta": 1.0}})");
  const auto r = run_cli("solve-contract --config " + (dir / "config.json").string() +
                             " --out " + (dir / "out").string(),
                         dir);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("econ.theta") != std::string::npos);
}

TEST_CASE("verify on a corrupted menu exits 2 with the worst violation") {
  const fs::path dir = fresh_dir("corrupt");
  REQUIRE(run_cli("solve-contract --out " + (dir / "out").string(), dir).exit_code == 0);
  std::string text = slurp(dir / "out" / "menu.json");
  // Push the second type's salary down by one reward unit.
  const auto pos = text.find("\"s\":", text.find("\"index\": 2"));
  REQUIRE(pos != std::string::npos);
  const auto end = text.find_first_of(",\n", pos);
  text.replace(pos, end - pos, "\"s\": 1.0");
  write_file(dir / "menu_bad.json", text);

  const auto r = run_cli("verify " + (dir / "menu_bad.json").string(), dir);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("FAILED") != std::string::npos);
}

TEST_CASE("simulate-pc then fit-pc round trip with context checking") {
  const fs::path dir = fresh_dir("simfit");
  const std::string out = (dir / "out").string();
  const auto sim = run_cli("simulate-pc --trials 60 --seed 5 --out " + out, dir);
  CHECK(sim.exit_code == 0);
  REQUIRE(fs::exists(dir / "out" / "pc_samples.csv"));

  const auto fit = run_cli("fit-pc " + (dir / "out" / "pc_samples.csv").string() +
                               " --out " + out,
                           dir);
  CHECK(fit.exit_code == 0);
  CHECK(fs::exists(dir / "out" / "fit.json"));

  // A config with a different network size must refuse the samples.
  write_file(dir / "other.json", R"({"network": {"z": 50}, "typing": {"c_max": 19}})");
  const auto mismatch =
      run_cli("fit-pc " + (dir / "out" / "pc_samples.csv").string() + " --config " +
                  (dir / "other.json").string() + " --out " + out,
              dir);
  CHECK(mismatch.exit_code == 1);
  CHECK(mismatch.output.find("--force") != std::string::npos);

  const auto forced =
      run_cli("fit-pc " + (dir / "out" / "pc_samples.csv").string() + " --config " +
                  (dir / "other.json").string() + " --out " + out + " --force",
              dir);
  CHECK(forced.exit_code == 0);
}

TEST_CASE("identical config and seed reproduce byte-identical artifacts") {
  const fs::path dir = fresh_dir("determinism");
  const std::string a = (dir / "a").string();
  const std::string b = (dir / "b").string();
  REQUIRE(run_cli("simulate-pc --trials 40 --seed 9 --out " + a, dir).exit_code == 0);
  REQUIRE(run_cli("simulate-pc --trials 40 --seed 9 --out " + b, dir).exit_code == 0);
  CHECK(slurp(dir / "a" / "pc_samples.csv") == slurp(dir / "b" / "pc_samples.csv"));

  const std::string c = (dir / "c").string();
  REQUIRE(run_cli("simulate-pc --trials 40 --seed 10 --out " + c, dir).exit_code == 0);
  CHECK(slurp(dir / "a" / "pc_samples.csv") != slurp(dir / "c" / "pc_samples.csv"));

  // Sweeps are deterministic too.
  const std::string s1 = (dir / "s1").string();
  const std::string s2 = (dir / "s2").string();
  REQUIRE(run_cli("sweep --what epsilon --out " + s1, dir).exit_code == 0);
  REQUIRE(run_cli("sweep --what epsilon --out " + s2, dir).exit_code == 0);
  CHECK(slurp(dir / "s1" / "sweep_epsilon.csv") == slurp(dir / "s2" / "sweep_epsilon.csv"));
}

TEST_CASE("compare writes the mechanism table") {
  const fs::path dir = fresh_dir("compare");
  const auto r = run_cli("compare --out " + (dir / "out").string(), dir);
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(dir / "out" / "mechanisms.csv");
  CHECK(csv.rfind("mechanism,epsilon,blockchain_utility\n", 0) == 0);
  CHECK(csv.find("proposed") != std::string::npos);
  CHECK(csv.find("perfect_information") != std::string::npos);
  CHECK(csv.find("adverse_selection_only") != std::string::npos);
  CHECK(csv.find("fixed_pow") != std::string::npos);
}

TEST_CASE("environment variable overrides the output directory") {
  const fs::path dir = fresh_dir("envout");
  const fs::path envdir = dir / "env_out";
  setenv("WBC_OUT", envdir.string().c_str(), 1);
  const auto r = run_cli("sweep --what surfaces", dir);
  unsetenv("WBC_OUT");
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(envdir / "surfaces.csv"));
}

TEST_CASE("sweep rejects unknown kinds") {
  const fs::path dir = fresh_dir("badwhat");
  const auto r = run_cli("sweep --what nonsense --out " + (dir / "out").string(), dir);
  CHECK(r.exit_code == 1);
}

TEST_CASE("quantile typing mode solves from a sampled population") {
  const fs::path dir = fresh_dir("quantile");
  write_file(dir / "config.json",
             R"({"typing": {"mode": "quantile", "num_types": 16, "population_size": 2000}})");
  const auto r = run_cli("solve-contract --config " + (dir / "config.json").string() +
                             " --out " + (dir / "out").string(),
                         dir);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("solved 16 types") != std::string::npos);
  CHECK(run_cli("verify " + (dir / "out" / "menu.json").string() + " --config " +
                    (dir / "config.json").string(),
                dir)
            .exit_code == 0);
}
