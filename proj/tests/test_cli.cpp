// Runs the opkernel-cli binary as a separate process.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "support/jobs_fixtures.hpp"

namespace fs = std::filesystem;
using namespace opk::testing;

namespace {

const fs::path kScratch = fs::path(OPK_TEST_SCRATCH) / "cli";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_job(const std::string& name, const Json& j) {
  fs::create_directories(kScratch);
  const fs::path p = kScratch / name;
  std::ofstream(p, std::ios::binary) << j.dump(2);
  return p;
}

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + OPK_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("check-pd writes a result document") {
  const fs::path job_path = write_job("check.json", job("check-pd", Json{{"kernel", fixture_a_json()}, {"points", {0.0, 1.0}}}));
  const fs::path out = kScratch / "check.result.json";
  REQUIRE(cli("--job " + quoted(job_path) + " --out " + quoted(out)) == 0);
  const Json doc = Json::parse(slurp(out));
  CHECK(doc.at("result").at("is_psd") == true);
  CHECK(doc.at("result").at("min_eigenvalue").get<double>() == doctest::Approx(0.393469).epsilon(1e-6));
}

TEST_CASE("output_path from the job and CSV artifacts") {
  const fs::path out = kScratch / "sampled.json";
  fs::remove(out);
  Json j = job("sample-gp", Json{{"kernel", fixture_a_json()}, {"points", {0.0, 1.0}}, {"n_draws", 50}, {"write_csv", true}});
  j["output_path"] = out.string();
  REQUIRE(cli("--job " + quoted(write_job("sample.json", j))) == 0);
  CHECK(fs::exists(out));
  CHECK(fs::exists(kScratch / "sampled.draws.csv"));
}

TEST_CASE("exit codes") {
  const fs::path out = kScratch / "codes.json";
  CHECK(cli("--job " + quoted(kScratch / "missing.json")) == 2);
  CHECK(cli("--bogus") == 2);
  CHECK(cli("") == 2);
  CHECK(cli("--job " + quoted(write_job("bad.json", Json{{"command", "check-pd"}, {"inputs", Json::object()}, {"junk", 1}})) + " --out " + quoted(out)) == 2);
  CHECK(Json::parse(slurp(out)).at("exit_code") == 2);
  const Json violated = job("order", Json{{"kernel_k", scaled_fixture_a_json(1.1)}, {"kernel_l", fixture_a_json()}, {"points", {0.0, 1.0}}});
  CHECK(cli("--job " + quoted(write_job("order.json", violated)) + " --out " + quoted(out)) == 3);
  CHECK(Json::parse(slurp(out)).at("reason") == "order_violated");
  // A loose tolerance override accepts the same pair.
  CHECK(cli("--job " + quoted(kScratch / "order.json") + " --tol 0.5 --out " + quoted(out)) == 0);
  CHECK(cli("--job " + quoted(kScratch / "order.json") + " --tol -1") == 2);
}

TEST_CASE("determinism and re-runs") {
  const Json j = job("sample-gp", Json{{"kernel", fixture_a_json()}, {"points", {0.0, 1.0}}, {"n_draws", 300}, {"write_csv", true}});
  const fs::path job_path = write_job("det.json", j);
  const fs::path a = kScratch / "det_a.json";
  const fs::path b = kScratch / "det_b.json";
  const fs::path c = kScratch / "det_c.json";
  REQUIRE(cli("--job " + quoted(job_path) + " --out " + quoted(a)) == 0);
  REQUIRE(cli("--job " + quoted(job_path) + " --out " + quoted(b)) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(kScratch / "det_a.draws.csv") == slurp(kScratch / "det_b.draws.csv"));
  REQUIRE(cli("--job " + quoted(job_path) + " --seed 2 --out " + quoted(c)) == 0);
  CHECK(slurp(a) != slurp(c));
  // Feeding a result document back in reproduces it.
  REQUIRE(cli("--job " + quoted(a) + " --out " + quoted(c)) == 0);
  CHECK(slurp(a) == slurp(c));
}

TEST_CASE("fit on the planted fixture") {
  const fs::path out = kScratch / "fit.result.json";
  REQUIRE(cli("--job " + quoted(write_job("fit.json", planted_fit_job())) + " --out " + quoted(out)) == 0);
  const auto trace = Json::parse(slurp(out)).at("result").at("objective_trace").get<std::vector<double>>();
  REQUIRE_FALSE(trace.empty());
  for (std::size_t k = 1; k < trace.size(); ++k) CHECK(trace[k] <= trace[k - 1]);
}
