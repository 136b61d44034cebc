// End-to-end checks of the swingbench binary: exit codes, JSON reports,
// CSV contracts, and byte determinism.

#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliResult {
  int exit_code = -1;
  json out;            // parsed stdout when it is JSON
  std::string out_raw;
  std::string err_raw;
};

fs::path work_dir() {
  const auto dir = fs::temp_directory_path() / "swingbench_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CliResult run_cli(const std::string& args) {
  const auto out_path = work_dir() / "stdout.txt";
  const auto err_path = work_dir() / "stderr.txt";
  const std::string cmd = std::string(SWINGBENCH_CLI_PATH) + " " + args + " > " + out_path.string() +
                          " 2> " + err_path.string();
  const int raw = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WEXITSTATUS(raw);
  result.out_raw = slurp(out_path);
  result.err_raw = slurp(err_path);
  if (!result.out_raw.empty() && result.out_raw.front() == '{') {
    result.out = json::parse(result.out_raw, nullptr, false);
  }
  return result;
}

std::string k3_file() {
  const auto path = work_dir() / "k3.json";
  std::ofstream out(path, std::ios::trunc);
  out << R"({"preset":{"kind":"complete","n":3,"weight":1.0},"inertia":1,"damping":1})";
  return path.string();
}

std::string disconnected_file() {
  const auto path = work_dir() / "disconnected.json";
  std::ofstream out(path, std::ios::trunc);
  out << R"({"n":4,"edges":[{"i":0,"j":1,"b":1.0},{"i":2,"j":3,"b":1.0}],"inertia":1,"damping":1})";
  return path.string();
}

}  // namespace

TEST_CASE("smib subcommand reports the closed-form metrics") {
  const auto r = run_cli("smib --M 1 --D 1 --B 1 --output phase");
  REQUIRE(r.exit_code == 0);
  REQUIRE(!r.out.is_discarded());
  CHECK(r.out["h2"]["value"].get<double>() == doctest::Approx(0.7071).epsilon(1e-4));
  CHECK(r.out["hinf"]["value"].get<double>() == doctest::Approx(1.1547).epsilon(1e-4));
  CHECK(r.out["omega_peak"].get<double>() == doctest::Approx(0.7071).epsilon(1e-4));
  CHECK(r.out["hinf"]["regime"] == "underdamped-branch");
  CHECK(r.out["oracle"]["hinf"].get<double>() == doctest::Approx(1.1547).epsilon(1e-4));
}

TEST_CASE("norms subcommand cross-checks oracle and closed form") {
  const auto r = run_cli("norms --net " + k3_file() + " --output frequency");
  REQUIRE(r.exit_code == 0);
  REQUIRE(!r.out.is_discarded());
  const double closed = r.out["norms"]["closed_form"]["h2"]["value"].get<double>();
  const double oracle = r.out["norms"]["oracle"]["h2"]["value"].get<double>();
  CHECK(closed == doctest::Approx(1.2247).epsilon(1e-4));
  CHECK(oracle == doctest::Approx(closed).epsilon(1e-8));
  CHECK_FALSE(r.out["discrepancies"]["any"].get<bool>());
}

TEST_CASE("strict mode turns the documented phase h2 gap into exit 3") {
  const auto strict = run_cli("norms --net " + k3_file() + " --output phase --strict");
  CHECK(strict.exit_code == 3);
  REQUIRE(!strict.out.is_discarded());
  CHECK(strict.out["norms"]["discrepancy"]["h2"].get<bool>());
  CHECK(strict.out["norms"]["discrepancy"]["h2_known"].get<bool>());
  CHECK_FALSE(strict.out["norms"]["discrepancy"]["hinf"].get<bool>());

  const auto allowed =
      run_cli("norms --net " + k3_file() + " --output phase --strict --allow-known-discrepancies");
  CHECK(allowed.exit_code == 0);

  const auto lax = run_cli("norms --net " + k3_file() + " --output phase");
  CHECK(lax.exit_code == 0);
}

TEST_CASE("input errors exit 2 with a single-line JSON error") {
  SUBCASE("missing file") {
    const auto r = run_cli("norms --net /nonexistent/net.json");
    CHECK(r.exit_code == 2);
    const json err = json::parse(r.err_raw, nullptr, false);
    REQUIRE(!err.is_discarded());
    CHECK(err["error"] == "ParseError");
  }
  SUBCASE("disconnected network is rejected uniformly") {
    for (const std::string sub : {"norms --net ", "analyze --net ", "validate --net "}) {
      const auto r = run_cli(sub + disconnected_file());
      CHECK(r.exit_code == 2);
      const json err = json::parse(r.err_raw, nullptr, false);
      REQUIRE(!err.is_discarded());
      CHECK(err["error"] == "DisconnectedGraph");
      CHECK(err["message"].get<std::string>().find("lambda_2") != std::string::npos);
    }
  }
  SUBCASE("bad flag values") {
    const auto r = run_cli("smib --M 0 --D 1 --B 1");
    CHECK(r.exit_code == 2);
  }
}

TEST_CASE("analyze emits eigenstructure and all norm blocks") {
  const auto r = run_cli("analyze --net " + k3_file());
  REQUIRE(r.exit_code == 0);
  REQUIRE(!r.out.is_discarded());
  CHECK(r.out["eigen"]["modes"].size() == 3);
  CHECK(r.out["eigen"]["modes"][0]["zeta"].is_null());
  CHECK(r.out["eigen"]["zeta_min"].get<double>() == doctest::Approx(0.2886751345948129).epsilon(1e-10));
  CHECK(r.out["norms"]["combined"]["closed_form"].is_null());
  CHECK(r.out["norms"]["phase"]["oracle"]["hinf"]["governing_mode"].get<int>() == 2);
  CHECK(r.out["input"]["hash"].is_string());
}

TEST_CASE("bode writes the contracted CSV") {
  const auto csv = (work_dir() / "bode.csv").string();
  const auto r = run_cli("bode --net " + k3_file() + " --output phase --omega-min 0.01 --omega-max 100 --points 50 --out " + csv);
  REQUIRE(r.exit_code == 0);
  const std::string content = slurp(csv);
  CHECK(content.rfind("omega,sigma_max\n", 0) == 0);
  CHECK(std::count(content.begin(), content.end(), '\n') == 51);
  CHECK(r.out["artifacts"][0] == csv);
}

TEST_CASE("rootlocus supports the SMIB form without a network") {
  const auto csv = (work_dir() / "rl.csv").string();
  const auto r = run_cli("rootlocus --D 1 --B 1 --min 0.05 --max 10 --points 40 --out " + csv);
  REQUIRE(r.exit_code == 0);
  const std::string content = slurp(csv);
  CHECK(content.rfind("M,mode,re1,im1,re2,im2\n", 0) == 0);
}

TEST_CASE("sweep and combined write their contracted CSVs") {
  const auto sweep_csv = (work_dir() / "sweep.csv").string();
  const auto r1 = run_cli("sweep --net " + k3_file() +
                          " --param M --output phase --min 0.1 --max 10 --points 20 --out " + sweep_csv);
  REQUIRE(r1.exit_code == 0);
  CHECK(slurp(sweep_csv).rfind("param,value,h2_closed,h2_oracle,hinf_closed,hinf_oracle,regime\n", 0) == 0);

  const auto combined_csv = (work_dir() / "combined.csv").string();
  const auto r2 = run_cli("combined --net " + k3_file() + " --kappa 1 --min 0.1 --max 10 --points 10 --out " +
                          combined_csv);
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp(combined_csv).rfind("M,h2_oracle,hinf_oracle\n", 0) == 0);
}

TEST_CASE("identical commands produce byte-identical CSV output") {
  const auto a = (work_dir() / "det_a.csv").string();
  const auto b = (work_dir() / "det_b.csv").string();
  const std::string args = " --net " + k3_file() + " --param M --output phase --min 0.1 --max 10 --points 25 --out ";
  REQUIRE(run_cli("sweep" + args + a).exit_code == 0);
  REQUIRE(run_cli("sweep" + args + b).exit_code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(!slurp(a).empty());
}

TEST_CASE("validate reports the canonical form and spectral summary") {
  const auto r = run_cli("validate --net " + k3_file());
  REQUIRE(r.exit_code == 0);
  REQUIRE(!r.out.is_discarded());
  CHECK(r.out["valid"].get<bool>());
  CHECK(r.out["lambda_2"].get<double>() == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(r.out["canonical"]["edges"].size() == 3);
}
