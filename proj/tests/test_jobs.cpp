#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "opkernel/jobs.hpp"
#include "support/jobs_fixtures.hpp"

using namespace opk;
using namespace opk::testing;

namespace {

Json run(const Json& j, const JobOptions& options = {}) {
  const JobOutcome out = run_job(j.dump(), options);
  Json doc = Json::parse(out.result_json);
  CHECK(doc.at("exit_code").get<int>() == out.exit_code);
  return doc;
}

Json points_01() { return Json::array({0.0, 1.0}); }

}  // namespace

TEST_CASE("result document envelope") {
  const Json doc = run(job("check-pd", Json{{"kernel", fixture_a_json()}, {"points", points_01()}}));
  CHECK(doc.at("schema_revision") == kSchemaRevision);
  CHECK(doc.at("status") == "ok");
  CHECK(doc.at("command") == "check-pd");
  CHECK(doc.at("input_digest").get<std::string>().rfind("fnv1a64:", 0) == 0);
  CHECK(doc.at("tolerances").contains("psd"));
  CHECK(doc.at("tolerances").contains("rank"));
  CHECK(doc.at("seed") == 1);
  CHECK(doc.at("result").at("is_psd") == true);
  CHECK(doc.at("result").at("min_eigenvalue").get<double>() == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("digest") {
  CHECK(digest_hex("") == "cbf29ce484222325");
  CHECK(digest_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("schema errors exit with 2") {
  const auto code = [](const std::string& text) { return run_job(text).exit_code; };
  CHECK(code("not json") == kExitSchema);
  CHECK(code(R"({"inputs": {}})") == kExitSchema);
  CHECK(code(R"({"command": "nope", "inputs": {}})") == kExitSchema);
  CHECK(code(R"({"command": "check-pd", "inputs": {}, "extra": 1})") == kExitSchema);
  CHECK(code(R"({"command": "check-pd", "inputs": {}, "seed": -3})") == kExitSchema);
  Json j = job("check-pd", Json{{"kernel", fixture_a_json()}, {"points", points_01()}});
  j["inputs"]["unexpected"] = true;
  CHECK(run_job(j.dump()).exit_code == kExitSchema);
  j = job("check-pd", Json{{"kernel", fixture_a_json()}, {"points", points_01()}});
  j["inputs"]["kernel"]["terms"][0]["family"] = "cauchy";
  CHECK(run_job(j.dump()).exit_code == kExitSchema);
  j = job("check-pd", Json{{"kernel", fixture_a_json()}, {"points", points_01()}});
  j["inputs"]["kernel"]["terms"][0]["coefficient"].erase(0);
  const JobOutcome out = run_job(j.dump());
  CHECK(out.exit_code == kExitSchema);
  const Json doc = Json::parse(out.result_json);
  CHECK(doc.at("status") == "failed");
  CHECK(doc.contains("reason"));
  CHECK(doc.contains("message"));
}

TEST_CASE("order and rn") {
  const Json ordered = job("order", Json{{"kernel_k", scaled_fixture_a_json(0.5)}, {"kernel_l", fixture_a_json()}, {"points", points_01()}});
  CHECK(run(ordered).at("result").at("holds") == true);
  const Json violated = job("order", Json{{"kernel_k", scaled_fixture_a_json(1.1)}, {"kernel_l", fixture_a_json()}, {"points", points_01()}});
  const JobOutcome out = run_job(violated.dump());
  CHECK(out.exit_code == kExitPrecondition);
  CHECK(out.reason == "order_violated");
  CHECK(Json::parse(out.result_json).at("reason") == "order_violated");

  Json rn = ordered;
  rn["command"] = "rn";
  const Json doc = run(rn);
  REQUIRE(doc.at("status") == "ok");
  for (const Json& ev : doc.at("result").at("t_eigenvalues")) CHECK(ev.get<double>() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(doc.at("result").at("max_reconstruction_error").get<double>() < 1e-12);
  rn["inputs"]["kernel_k"] = scaled_fixture_a_json(1.1);
  CHECK(run_job(rn.dump()).exit_code == kExitPrecondition);
}

TEST_CASE("factorize and sample-gp artifacts") {
  Json f = job("factorize", Json{{"kernel", fixture_a_json()}, {"points", points_01()}, {"mode", "cholesky"}, {"write_csv", true}});
  JobOutcome out = run_job(f.dump());
  REQUIRE(out.exit_code == kExitOk);
  REQUIRE(out.artifacts.size() == 1);
  CHECK(out.artifacts[0].name == "factors.csv");
  CHECK(Json::parse(out.result_json).at("result").at("r") == 4);
  f["inputs"]["mode"] = "qr";
  CHECK(run_job(f.dump()).exit_code == kExitSchema);

  const Json s = job("sample-gp", Json{{"kernel", fixture_a_json()}, {"points", points_01()}, {"n_draws", 2000}, {"write_csv", true}});
  out = run_job(s.dump());
  REQUIRE(out.exit_code == kExitOk);
  REQUIRE(out.artifacts.size() == 1);
  // header plus draw * point * coordinate rows
  const auto rows = std::count(out.artifacts[0].content.begin(), out.artifacts[0].content.end(), '\n');
  CHECK(rows == 1 + 2000 * 2 * 2);
  CHECK(Json::parse(out.result_json).at("result").at("within_band") == true);

  JobOptions other_seed;
  other_seed.seed = 99;
  CHECK(run_job(s.dump()).result_json == run_job(s.dump()).result_json);
  CHECK(run_job(s.dump()).result_json != run_job(s.dump(), other_seed).result_json);
  CHECK(Json::parse(run_job(s.dump(), other_seed).result_json).at("seed") == 99);
}

TEST_CASE("cp commands") {
  const Json d = run(job("dilate", Json{{"cp_map", depolarizing_json()}}));
  CHECK(d.at("result").at("dim_k") == 8);
  CHECK(d.at("result").at("minimal") == true);
  CHECK(d.at("result").at("kraus_count") == 4);

  Json bad_choi = identity_channel_json();
  bad_choi["choi"][1] = Json::array({1.0, 0.0});  // transpose-like off-diagonal: not CP
  bad_choi["choi"][4] = Json::array({1.0, 0.0});
  bad_choi["choi"][0] = Json::array({0.0, 0.0});
  CHECK(run_job(job("dilate", Json{{"cp_map", bad_choi}}).dump()).exit_code == kExitPrecondition);

  const JobOutcome violated = run_job(job("cp-rn", Json{{"phi", identity_channel_json()}, {"psi", depolarizing_json()}}).dump());
  CHECK(violated.exit_code == kExitPrecondition);
  CHECK(violated.reason == "order_violated");
  const Json same = run(job("cp-rn", Json{{"phi", depolarizing_json()}, {"psi", depolarizing_json()}}));
  CHECK(same.at("result").at("commutator_defect").get<double>() <= 1e-9);

  const Json gp = run(job("gp-decompose", Json{{"cp_map", identity_channel_json()}, {"n_draws", 500}}));
  CHECK(gp.at("status") == "ok");
}

TEST_CASE("fit") {
  const Json doc = run(planted_fit_job());
  REQUIRE(doc.at("status") == "ok");
  const auto trace = doc.at("result").at("objective_trace").get<std::vector<double>>();
  for (std::size_t k = 1; k < trace.size(); ++k) CHECK(trace[k] <= trace[k - 1]);
  // rho is row-major [re, im] pairs; entry (1, 1) is the fourth.
  CHECK(doc.at("result").at("rho")[3][0].get<double>() <= 0.1);

  Json bad = planted_fit_job();
  bad["inputs"]["max_iters"] = 0;
  CHECK(run_job(bad.dump()).exit_code == kExitPrecondition);
  bad = planted_fit_job();
  bad["inputs"]["beta"] = -1.0;
  CHECK(run_job(bad.dump()).exit_code == kExitPrecondition);
}

TEST_CASE("result documents re-run to identical bytes") {
  const Json jobs[] = {
      job("check-pd", Json{{"kernel", fixture_a_json()}, {"points", points_01()}}),
      job("sample-gp", Json{{"kernel", fixture_a_json()}, {"points", points_01()}, {"n_draws", 100}}),
      planted_fit_job(),
  };
  for (const Json& j : jobs) {
    const std::string first = run_job(j.dump()).result_json;
    CHECK(run_job(first).result_json == first);
    // Numbers survive a parse/dump cycle unchanged.
    CHECK(Json::parse(first).dump(2) + "\n" == first);
  }
}

TEST_CASE("tolerance override") {
  JobOptions loose;
  loose.tol = 0.5;
  const Json j = job("order", Json{{"kernel_k", scaled_fixture_a_json(1.1)}, {"kernel_l", fixture_a_json()}, {"points", points_01()}});
  // min eigenvalue -0.1 * (1 + e^{-1/2}) is within 0.5 * (1 + max |lambda|).
  const Json doc = Json::parse(run_job(j.dump(), loose).result_json);
  CHECK(doc.at("tolerances").at("psd") == 0.5);
  CHECK(doc.at("result").at("holds") == true);
  JobOptions negative;
  negative.tol = -1.0;
  CHECK(run_job(j.dump(), negative).exit_code == kExitSchema);
}
