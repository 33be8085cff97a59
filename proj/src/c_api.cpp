#include "opkernel/opkernel.h"

#include <exception>
#include <string>

#include "opkernel/cpmaps.hpp"
#include "opkernel/errors.hpp"
#include "opkernel/gaussian.hpp"
#include "opkernel/jobs.hpp"
#include "opkernel/json_io.hpp"
#include "opkernel/kernels.hpp"
#include "opkernel/ordering.hpp"
#include "opkernel/rkhs.hpp"

struct opk_kernel {
  opk::OperatorKernelSpec spec;
};
struct opk_gram {
  opk::BlockGram gram;
};
struct opk_factor {
  opk::FactorSystem factor;
};
struct opk_draw {
  opk::GaussianDraw draw;
};
struct opk_cpmap {
  opk::CpMap map;
};
struct opk_job_result {
  opk::JobOutcome outcome;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_reason;

opk_status set_error(opk_status status, const std::string& reason, const std::string& message) {
  g_reason = reason;
  g_error = message;
  return status;
}

template <class F>
opk_status guarded(F&& body) {
  g_error.clear();
  g_reason.clear();
  try {
    body();
    return OPK_OK;
  } catch (const opk::SchemaError& e) {
    return set_error(OPK_ERR_SCHEMA, e.reason(), e.what());
  } catch (const opk::DimensionError& e) {
    return set_error(OPK_ERR_INVALID_ARGUMENT, e.reason(), e.what());
  } catch (const opk::PreconditionError& e) {
    return set_error(OPK_ERR_PRECONDITION, e.reason(), e.what());
  } catch (const opk::NumericalError& e) {
    return set_error(OPK_ERR_NUMERICAL, e.reason(), e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(OPK_ERR_SCHEMA, "schema_error", e.what());
  } catch (const std::exception& e) {
    return set_error(OPK_ERR_NUMERICAL, "internal_error", e.what());
  }
}

opk_status null_argument(const char* what) {
  return set_error(OPK_ERR_INVALID_ARGUMENT, "null_argument", std::string(what) + " is NULL");
}

opk::SamplePoint point_from(const double* coords, size_t dim) {
  opk::SamplePoint p;
  p.coordinates = Eigen::Map<const opk::RVector>(coords, static_cast<opk::Index>(dim));
  return p;
}

void write_interleaved(const opk::CMatrix& m, double* out) {
  for (opk::Index i = 0; i < m.rows(); ++i) {
    for (opk::Index j = 0; j < m.cols(); ++j) {
      *out++ = m(i, j).real();
      *out++ = m(i, j).imag();
    }
  }
}

}  // namespace

extern "C" {

const char* opk_version(void) { return opk::kSchemaRevision; }
const char* opk_last_error(void) { return g_error.c_str(); }
const char* opk_last_reason(void) { return g_reason.c_str(); }

opk_status opk_kernel_from_json(const char* json, opk_kernel** out) {
  if (json == nullptr || out == nullptr) return null_argument("json/out");
  return guarded([&] {
    auto spec = opk::json_io::kernel_from(nlohmann::json::parse(json));
    *out = new opk_kernel{std::move(spec)};
  });
}

void opk_kernel_free(opk_kernel* kernel) { delete kernel; }

size_t opk_kernel_h(const opk_kernel* kernel) {
  return kernel == nullptr ? 0 : static_cast<size_t>(kernel->spec.h());
}

opk_status opk_kernel_eval(const opk_kernel* kernel, const double* s, const double* t, size_t dim, double* out) {
  if (kernel == nullptr || s == nullptr || t == nullptr || out == nullptr) return null_argument("argument");
  return guarded([&] { write_interleaved(opk::eval_kernel(kernel->spec, point_from(s, dim), point_from(t, dim)), out); });
}

opk_status opk_gram_assemble(const opk_kernel* kernel, const double* points, size_t n, size_t dim, opk_gram** out) {
  if (kernel == nullptr || points == nullptr || out == nullptr) return null_argument("argument");
  return guarded([&] {
    std::vector<opk::SamplePoint> pts;
    for (size_t i = 0; i < n; ++i) pts.push_back(point_from(points + i * dim, dim));
    *out = new opk_gram{opk::assemble_block_gram(kernel->spec, pts)};
  });
}

void opk_gram_free(opk_gram* gram) { delete gram; }

opk_status opk_gram_shape(const opk_gram* gram, size_t* n, size_t* h) {
  if (gram == nullptr || n == nullptr || h == nullptr) return null_argument("argument");
  *n = static_cast<size_t>(gram->gram.n());
  *h = static_cast<size_t>(gram->gram.h());
  return OPK_OK;
}

opk_status opk_gram_copy(const opk_gram* gram, double* out, size_t len) {
  if (gram == nullptr || out == nullptr) return null_argument("argument");
  const auto m = static_cast<size_t>(gram->gram.size());
  if (len < 2 * m * m) return set_error(OPK_ERR_INVALID_ARGUMENT, "buffer_too_small", "opk_gram_copy: buffer too small");
  write_interleaved(gram->gram.matrix(), out);
  return OPK_OK;
}

opk_status opk_gram_check_pd(const opk_gram* gram, double tol, int* is_psd, double* min_eigenvalue) {
  if (gram == nullptr || is_psd == nullptr || min_eigenvalue == nullptr) return null_argument("argument");
  return guarded([&] {
    const opk::PsdVerdict v = opk::check_pd(gram->gram, tol);
    *is_psd = v.is_psd ? 1 : 0;
    *min_eigenvalue = v.min_eigenvalue;
  });
}

opk_status opk_check_order(const opk_gram* gk, const opk_gram* gl, double tol, int* holds, double* min_eigenvalue) {
  if (gk == nullptr || gl == nullptr || holds == nullptr || min_eigenvalue == nullptr) return null_argument("argument");
  return guarded([&] {
    const opk::OrderVerdict v = opk::check_order(gk->gram, gl->gram, tol);
    *holds = v.holds ? 1 : 0;
    *min_eigenvalue = v.min_eigenvalue;
  });
}

opk_status opk_factorize(const opk_gram* gram, opk_factor_mode mode, opk_factor** out) {
  if (gram == nullptr || out == nullptr) return null_argument("argument");
  if (mode != OPK_FACTOR_EIGEN && mode != OPK_FACTOR_CHOLESKY) {
    return set_error(OPK_ERR_INVALID_ARGUMENT, "invalid_mode", "opk_factorize: unknown mode");
  }
  return guarded([&] {
    const auto m = mode == OPK_FACTOR_EIGEN ? opk::FactorMode::eigen : opk::FactorMode::cholesky;
    *out = new opk_factor{opk::factorize(gram->gram, m)};
  });
}

void opk_factor_free(opk_factor* factor) { delete factor; }

opk_status opk_factor_rank(const opk_factor* factor, size_t* r) {
  if (factor == nullptr || r == nullptr) return null_argument("argument");
  *r = static_cast<size_t>(factor->factor.r());
  return OPK_OK;
}

opk_status opk_factor_reconstruction_error(const opk_factor* factor, double* error) {
  if (factor == nullptr || error == nullptr) return null_argument("argument");
  return guarded([&] { *error = factor->factor.reconstruction_error(); });
}

opk_status opk_sample_gp(const opk_factor* factor, size_t n_draws, uint64_t seed, opk_onb_mode onb, opk_draw** out) {
  if (factor == nullptr || out == nullptr) return null_argument("argument");
  return guarded([&] {
    const auto mode = onb == OPK_ONB_EIGEN ? opk::OnbMode::eigen : opk::OnbMode::standard;
    *out = new opk_draw{opk::sample_gp(factor->factor, static_cast<opk::Index>(n_draws), seed, mode)};
  });
}

void opk_draw_free(opk_draw* draw) { delete draw; }

opk_status opk_draw_covariance(const opk_draw* draw, size_t i, size_t a, size_t j, size_t b, double* re, double* im) {
  if (draw == nullptr || re == nullptr || im == nullptr) return null_argument("argument");
  return guarded([&] {
    const opk::Index h = draw->draw.h();
    if (a >= static_cast<size_t>(h) || b >= static_cast<size_t>(h)) throw opk::DimensionError("basis index out of range");
    const opk::CVector ea = opk::CVector::Unit(h, static_cast<opk::Index>(a));
    const opk::CVector eb = opk::CVector::Unit(h, static_cast<opk::Index>(b));
    const opk::Complex c =
        opk::empirical_covariance(draw->draw, ea, eb, static_cast<opk::Index>(i), static_cast<opk::Index>(j));
    *re = c.real();
    *im = c.imag();
  });
}

opk_status opk_cpmap_create(size_t d, size_t h, const double* choi, opk_cpmap** out) {
  if (choi == nullptr || out == nullptr) return null_argument("argument");
  return guarded([&] {
    const auto m = static_cast<opk::Index>(d * h);
    opk::CMatrix c(m, m);
    for (opk::Index i = 0; i < m; ++i) {
      for (opk::Index j = 0; j < m; ++j) c(i, j) = {choi[2 * (i * m + j)], choi[2 * (i * m + j) + 1]};
    }
    *out = new opk_cpmap{opk::CpMap::from_choi(static_cast<opk::Index>(d), static_cast<opk::Index>(h), c)};
  });
}

void opk_cpmap_free(opk_cpmap* map) { delete map; }

opk_status opk_cpmap_is_cp(const opk_cpmap* map, double tol, int* is_cp, double* min_eigenvalue) {
  if (map == nullptr || is_cp == nullptr || min_eigenvalue == nullptr) return null_argument("argument");
  return guarded([&] {
    const opk::PsdVerdict v = opk::is_cp(map->map, tol);
    *is_cp = v.is_psd ? 1 : 0;
    *min_eigenvalue = v.min_eigenvalue;
  });
}

opk_status opk_cpmap_dilate(const opk_cpmap* map, size_t* dim_k, double* exactness_defect) {
  if (map == nullptr || dim_k == nullptr || exactness_defect == nullptr) return null_argument("argument");
  return guarded([&] {
    const opk::StinespringDilation dil = opk::stinespring(map->map);
    *dim_k = static_cast<size_t>(dil.dim_k);
    *exactness_defect = dil.exactness_defect(map->map);
  });
}

opk_status opk_job_run(const char* job_json, const uint64_t* seed, const double* tol, opk_job_result** out) {
  if (job_json == nullptr || out == nullptr) return null_argument("argument");
  return guarded([&] {
    opk::JobOptions options;
    if (seed != nullptr) options.seed = *seed;
    if (tol != nullptr) options.tol = *tol;
    *out = new opk_job_result{opk::run_job(job_json, options)};
  });
}

void opk_job_free(opk_job_result* result) { delete result; }

int opk_job_exit_code(const opk_job_result* result) { return result == nullptr ? 1 : result->outcome.exit_code; }

const char* opk_job_reason(const opk_job_result* result) {
  return result == nullptr ? "" : result->outcome.reason.c_str();
}

const char* opk_job_json(const opk_job_result* result) {
  return result == nullptr ? "" : result->outcome.result_json.c_str();
}

const char* opk_job_output_path(const opk_job_result* result) {
  return result == nullptr ? "" : result->outcome.output_path.c_str();
}

size_t opk_job_artifact_count(const opk_job_result* result) {
  return result == nullptr ? 0 : result->outcome.artifacts.size();
}

const char* opk_job_artifact_name(const opk_job_result* result, size_t index) {
  if (result == nullptr || index >= result->outcome.artifacts.size()) return nullptr;
  return result->outcome.artifacts[index].name.c_str();
}

const char* opk_job_artifact_content(const opk_job_result* result, size_t index) {
  if (result == nullptr || index >= result->outcome.artifacts.size()) return nullptr;
  return result->outcome.artifacts[index].content.c_str();
}

}  // extern "C"
