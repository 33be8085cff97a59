// Exercises the shared library through its C header only.

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "opkernel/opkernel.h"
#include "support/jobs_fixtures.hpp"

using opk::testing::fixture_a_json;

namespace {

struct KernelHandle {
  opk_kernel* ptr = nullptr;
  ~KernelHandle() { opk_kernel_free(ptr); }
};
struct GramHandle {
  opk_gram* ptr = nullptr;
  ~GramHandle() { opk_gram_free(ptr); }
};

}  // namespace

TEST_CASE("version and error state") {
  CHECK(std::strlen(opk_version()) > 0);
  opk_kernel* k = nullptr;
  CHECK(opk_kernel_from_json("{", &k) == OPK_ERR_SCHEMA);
  CHECK(k == nullptr);
  CHECK(std::strlen(opk_last_error()) > 0);
  CHECK(std::string(opk_last_reason()) == "schema_error");
  CHECK(opk_kernel_from_json(nullptr, &k) == OPK_ERR_INVALID_ARGUMENT);
  CHECK(opk_kernel_from_json(fixture_a_json().dump().c_str(), nullptr) == OPK_ERR_INVALID_ARGUMENT);
  // Freeing null handles is a no-op.
  opk_kernel_free(nullptr);
  opk_gram_free(nullptr);
  opk_factor_free(nullptr);
  opk_draw_free(nullptr);
  opk_cpmap_free(nullptr);
  opk_job_free(nullptr);
}

TEST_CASE("kernel evaluation and Gram pipeline") {
  KernelHandle k;
  REQUIRE(opk_kernel_from_json(fixture_a_json().dump().c_str(), &k.ptr) == OPK_OK);
  CHECK(opk_kernel_h(k.ptr) == 2);
  const double s = 0.0;
  const double t = 1.0;
  double block[8];
  REQUIRE(opk_kernel_eval(k.ptr, &s, &t, 1, block) == OPK_OK);
  CHECK(block[0] == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(block[2] == 0.0);

  const double points[] = {0.0, 1.0};
  GramHandle g;
  REQUIRE(opk_gram_assemble(k.ptr, points, 2, 1, &g.ptr) == OPK_OK);
  size_t n = 0;
  size_t h = 0;
  REQUIRE(opk_gram_shape(g.ptr, &n, &h) == OPK_OK);
  CHECK(n == 2);
  CHECK(h == 2);
  std::vector<double> dense(2 * 16);
  CHECK(opk_gram_copy(g.ptr, dense.data(), 4) == OPK_ERR_INVALID_ARGUMENT);
  REQUIRE(opk_gram_copy(g.ptr, dense.data(), dense.size()) == OPK_OK);
  CHECK(dense[0] == 1.0);
  int is_psd = 0;
  double min_ev = 0.0;
  REQUIRE(opk_gram_check_pd(g.ptr, 1e-10, &is_psd, &min_ev) == OPK_OK);
  CHECK(is_psd == 1);
  CHECK(min_ev == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-12));

  int holds = 0;
  REQUIRE(opk_check_order(g.ptr, g.ptr, 1e-10, &holds, &min_ev) == OPK_OK);
  CHECK(holds == 1);

  opk_factor* f = nullptr;
  REQUIRE(opk_factorize(g.ptr, OPK_FACTOR_CHOLESKY, &f) == OPK_OK);
  size_t r = 0;
  double err = 1.0;
  CHECK(opk_factor_rank(f, &r) == OPK_OK);
  CHECK(r == 4);
  CHECK(opk_factor_reconstruction_error(f, &err) == OPK_OK);
  CHECK(err < 1e-14);

  opk_draw* draws = nullptr;
  REQUIRE(opk_sample_gp(f, 20000, 3, OPK_ONB_STANDARD, &draws) == OPK_OK);
  double re = 0.0;
  double im = 0.0;
  REQUIRE(opk_draw_covariance(draws, 0, 0, 1, 0, &re, &im) == OPK_OK);
  CHECK(std::abs(re - std::exp(-0.5)) <= 5.0 * std::sqrt(2.0 / 20000.0));
  CHECK(opk_draw_covariance(draws, 0, 0, 2, 0, &re, &im) == OPK_ERR_INVALID_ARGUMENT);
  CHECK(opk_sample_gp(f, 0, 3, OPK_ONB_STANDARD, &draws) != OPK_OK);
  opk_draw_free(draws);
  opk_factor_free(f);
}

TEST_CASE("invalid points and non-PSD input") {
  KernelHandle k;
  REQUIRE(opk_kernel_from_json(fixture_a_json().dump().c_str(), &k.ptr) == OPK_OK);
  GramHandle g;
  CHECK(opk_gram_assemble(k.ptr, nullptr, 2, 1, &g.ptr) == OPK_ERR_INVALID_ARGUMENT);
  const double two_d[] = {0.0, 1.0, 2.0, 3.0};
  // Gaussian term accepts any dimension, so 2-D points are fine; zero points are not.
  CHECK(opk_gram_assemble(k.ptr, two_d, 2, 2, &g.ptr) == OPK_OK);
  opk_gram* empty = nullptr;
  CHECK(opk_gram_assemble(k.ptr, two_d, 0, 2, &empty) == OPK_ERR_INVALID_ARGUMENT);

  nlohmann::json bad = fixture_a_json();
  bad["terms"][0]["coefficient"][3][0] = -1.0;
  KernelHandle kb;
  REQUIRE(opk_kernel_from_json(bad.dump().c_str(), &kb.ptr) == OPK_OK);
  GramHandle gb;
  const double pts[] = {0.0, 1.0};
  REQUIRE(opk_gram_assemble(kb.ptr, pts, 2, 1, &gb.ptr) == OPK_OK);
  opk_factor* f = nullptr;
  CHECK(opk_factorize(gb.ptr, OPK_FACTOR_EIGEN, &f) == OPK_ERR_PRECONDITION);
  CHECK(std::string(opk_last_reason()) == "not_psd");
  CHECK(f == nullptr);
}

TEST_CASE("cp maps") {
  // Identity channel on M_2: Choi = |Omega><Omega| with Omega = e_0 + e_3.
  std::vector<double> choi(2 * 16, 0.0);
  for (int r : {0, 3}) {
    for (int c : {0, 3}) choi[static_cast<std::size_t>(2 * (r * 4 + c))] = 1.0;
  }
  opk_cpmap* m = nullptr;
  REQUIRE(opk_cpmap_create(2, 2, choi.data(), &m) == OPK_OK);
  int cp = 0;
  double min_ev = 0.0;
  REQUIRE(opk_cpmap_is_cp(m, 1e-10, &cp, &min_ev) == OPK_OK);
  CHECK(cp == 1);
  size_t dim_k = 0;
  double defect = 1.0;
  REQUIRE(opk_cpmap_dilate(m, &dim_k, &defect) == OPK_OK);
  CHECK(dim_k == 2);
  CHECK(defect < 1e-12);
  opk_cpmap_free(m);

  // Transpose map: Choi is the swap operator.
  std::vector<double> swap(2 * 16, 0.0);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) swap[static_cast<std::size_t>(2 * ((i * 2 + j) * 4 + (j * 2 + i)))] = 1.0;
  }
  REQUIRE(opk_cpmap_create(2, 2, swap.data(), &m) == OPK_OK);
  REQUIRE(opk_cpmap_is_cp(m, 1e-10, &cp, &min_ev) == OPK_OK);
  CHECK(cp == 0);
  CHECK(min_ev == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(opk_cpmap_dilate(m, &dim_k, &defect) == OPK_ERR_PRECONDITION);
  opk_cpmap_free(m);
}

TEST_CASE("jobs") {
  const std::string text = opk::testing::job("check-pd", nlohmann::json{{"kernel", fixture_a_json()}, {"points", {0.0, 1.0}}}).dump();
  opk_job_result* res = nullptr;
  REQUIRE(opk_job_run(text.c_str(), nullptr, nullptr, &res) == OPK_OK);
  CHECK(opk_job_exit_code(res) == 0);
  CHECK(std::string(opk_job_reason(res)).empty());
  CHECK(std::string(opk_job_output_path(res)).empty());
  CHECK(opk_job_artifact_count(res) == 0);
  CHECK(opk_job_artifact_name(res, 0) == nullptr);
  const nlohmann::json doc = nlohmann::json::parse(opk_job_json(res));
  CHECK(doc.at("result").at("is_psd") == true);
  opk_job_free(res);

  // A failing job still yields a result handle; the status code is about the call itself.
  const std::uint64_t seed = 5;
  const double tol = 1e-8;
  REQUIRE(opk_job_run("[]", &seed, &tol, &res) == OPK_OK);
  CHECK(opk_job_exit_code(res) == 2);
  opk_job_free(res);
  CHECK(opk_job_run(nullptr, nullptr, nullptr, &res) == OPK_ERR_INVALID_ARGUMENT);
}
