/* C interface to the opkernel library.
 *
 * All objects are opaque handles created by an opk_*_create / _assemble /
 * _from_json call and released with the matching _free function. Every
 * fallible call returns an opk_status; on failure opk_last_error() and
 * opk_last_reason() describe the problem for the calling thread.
 *
 * Complex arrays are interleaved (re, im) doubles in row-major order.
 */
#ifndef OPKERNEL_H
#define OPKERNEL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(OPK_BUILDING_LIBRARY)
#define OPK_API __attribute__((visibility("default")))
#else
#define OPK_API
#endif

typedef enum opk_status {
  OPK_OK = 0,
  OPK_ERR_NUMERICAL = 1,
  OPK_ERR_SCHEMA = 2,
  OPK_ERR_PRECONDITION = 3,
  OPK_ERR_INVALID_ARGUMENT = 4
} opk_status;

typedef enum opk_factor_mode { OPK_FACTOR_EIGEN = 0, OPK_FACTOR_CHOLESKY = 1 } opk_factor_mode;
typedef enum opk_onb_mode { OPK_ONB_STANDARD = 0, OPK_ONB_EIGEN = 1 } opk_onb_mode;

typedef struct opk_kernel opk_kernel;
typedef struct opk_gram opk_gram;
typedef struct opk_factor opk_factor;
typedef struct opk_draw opk_draw;
typedef struct opk_cpmap opk_cpmap;
typedef struct opk_job_result opk_job_result;

OPK_API const char* opk_version(void);
OPK_API const char* opk_last_error(void);
/* Machine-readable reason code of the last failure, e.g. "order_violated". */
OPK_API const char* opk_last_reason(void);

/* Kernels, from the JSON kernel schema. */
OPK_API opk_status opk_kernel_from_json(const char* json, opk_kernel** out);
OPK_API void opk_kernel_free(opk_kernel* kernel);
OPK_API size_t opk_kernel_h(const opk_kernel* kernel);
/* K(s,t) into out (2*h*h doubles). s and t have `dim` coordinates each. */
OPK_API opk_status opk_kernel_eval(const opk_kernel* kernel, const double* s, const double* t, size_t dim,
                                   double* out);

/* Block Gram over n points stored row-major as n x dim coordinates. */
OPK_API opk_status opk_gram_assemble(const opk_kernel* kernel, const double* points, size_t n, size_t dim,
                                     opk_gram** out);
OPK_API void opk_gram_free(opk_gram* gram);
OPK_API opk_status opk_gram_shape(const opk_gram* gram, size_t* n, size_t* h);
/* Copies the nh x nh matrix; `len` is the capacity of out in doubles. */
OPK_API opk_status opk_gram_copy(const opk_gram* gram, double* out, size_t len);
OPK_API opk_status opk_gram_check_pd(const opk_gram* gram, double tol, int* is_psd, double* min_eigenvalue);
OPK_API opk_status opk_check_order(const opk_gram* gk, const opk_gram* gl, double tol, int* holds,
                                   double* min_eigenvalue);

OPK_API opk_status opk_factorize(const opk_gram* gram, opk_factor_mode mode, opk_factor** out);
OPK_API void opk_factor_free(opk_factor* factor);
OPK_API opk_status opk_factor_rank(const opk_factor* factor, size_t* r);
OPK_API opk_status opk_factor_reconstruction_error(const opk_factor* factor, double* error);

OPK_API opk_status opk_sample_gp(const opk_factor* factor, size_t n_draws, uint64_t seed, opk_onb_mode onb,
                                 opk_draw** out);
OPK_API void opk_draw_free(opk_draw* draw);
/* Sample mean of <e_a, W(s_i)> <W(s_j), e_b>. */
OPK_API opk_status opk_draw_covariance(const opk_draw* draw, size_t i, size_t a, size_t j, size_t b, double* re,
                                       double* im);

/* CP maps from a dh x dh Choi matrix (2*(dh)^2 doubles). */
OPK_API opk_status opk_cpmap_create(size_t d, size_t h, const double* choi, opk_cpmap** out);
OPK_API void opk_cpmap_free(opk_cpmap* map);
OPK_API opk_status opk_cpmap_is_cp(const opk_cpmap* map, double tol, int* is_cp, double* min_eigenvalue);
OPK_API opk_status opk_cpmap_dilate(const opk_cpmap* map, size_t* dim_k, double* exactness_defect);

/* Job documents. seed and tol may be NULL (no override). */
OPK_API opk_status opk_job_run(const char* job_json, const uint64_t* seed, const double* tol,
                               opk_job_result** out);
OPK_API void opk_job_free(opk_job_result* result);
OPK_API int opk_job_exit_code(const opk_job_result* result);
OPK_API const char* opk_job_reason(const opk_job_result* result);
OPK_API const char* opk_job_json(const opk_job_result* result);
OPK_API const char* opk_job_output_path(const opk_job_result* result);
OPK_API size_t opk_job_artifact_count(const opk_job_result* result);
OPK_API const char* opk_job_artifact_name(const opk_job_result* result, size_t index);
OPK_API const char* opk_job_artifact_content(const opk_job_result* result, size_t index);

#ifdef __cplusplus
}
#endif

#endif /* OPKERNEL_H */
