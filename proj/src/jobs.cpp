#include "opkernel/jobs.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>

#include "opkernel/cpmaps.hpp"
#include "opkernel/errors.hpp"
#include "opkernel/gaussian.hpp"
#include "opkernel/json_io.hpp"
#include "opkernel/optim.hpp"
#include "opkernel/ordering.hpp"
#include "opkernel/rkhs.hpp"

namespace opk {

namespace {

using json_io::Json;
using json_io::to_json;

struct Context {
  const Json& inputs;
  std::uint64_t seed;
  double tol;
};

struct CommandResult {
  Json result;
  int exit_code = kExitOk;
  std::string reason;
  std::vector<JobArtifact> artifacts;
};

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string draws_csv(const GaussianDraw& draws) {
  std::string out = "draw,point,coordinate,re,im\n";
  for (Index d = 0; d < draws.n_draws(); ++d) {
    for (Index i = 0; i < draws.n(); ++i) {
      for (Index a = 0; a < draws.h(); ++a) {
        const Complex z = draws.at(d, i, a);
        out += std::to_string(d) + ',' + std::to_string(i) + ',' + std::to_string(a) + ',' +
               format_double(z.real()) + ',' + format_double(z.imag()) + '\n';
      }
    }
  }
  return out;
}

std::string factors_csv(const FactorSystem& f) {
  std::string out = "point,row,col,re,im\n";
  for (Index i = 0; i < f.n(); ++i) {
    const CMatrix v = f.factor(i);
    for (Index row = 0; row < v.rows(); ++row) {
      for (Index col = 0; col < v.cols(); ++col) {
        out += std::to_string(i) + ',' + std::to_string(row) + ',' + std::to_string(col) + ',' +
               format_double(v(row, col).real()) + ',' + format_double(v(row, col).imag()) + '\n';
      }
    }
  }
  return out;
}

bool bool_field(const Json& obj, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) throw SchemaError(std::string("field '") + key + "' must be a boolean");
  return obj.at(key).get<bool>();
}

std::string string_field(const Json& obj, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) throw SchemaError(std::string("field '") + key + "' must be a string");
  return obj.at(key).get<std::string>();
}

Index draws_field(const Json& obj) {
  const Index n = json_io::integer_field(obj, "n_draws", "inputs");
  if (n < 1) throw SchemaError("inputs: n_draws must be >= 1");
  return n;
}

FactorMode factor_mode_from(const std::string& s) {
  if (s == "eigen") return FactorMode::eigen;
  if (s == "cholesky") return FactorMode::cholesky;
  throw SchemaError("inputs: mode must be 'eigen' or 'cholesky'");
}

OnbMode onb_from(const std::string& s) {
  if (s == "standard") return OnbMode::standard;
  if (s == "eigen") return OnbMode::eigen;
  throw SchemaError("inputs: onb must be 'standard' or 'eigen'");
}

BlockGram gram_input(const Json& inputs, const char* kernel_key) {
  const OperatorKernelSpec spec = json_io::kernel_from(json_io::field(inputs, kernel_key, "inputs"));
  return assemble_block_gram(spec, json_io::points_from(json_io::field(inputs, "points", "inputs")));
}

Json covariance_summary(const GaussianDraw& draws, const BlockGram& gram) {
  const CMatrix emp = empirical_covariance_matrix(draws);
  const double max_diag = gram.size() == 0 ? 0.0 : gram.matrix().diagonal().real().maxCoeff();
  const double band = 5.0 * std::sqrt(2.0 / static_cast<double>(draws.n_draws())) * max_diag;
  const double deviation = max_abs(emp - gram.matrix());
  return Json{{"n_draws", draws.n_draws()},
              {"n", draws.n()},
              {"h", draws.h()},
              {"empirical_covariance", to_json(emp)},
              {"true_gram", to_json(gram.matrix())},
              {"max_abs_deviation", deviation},
              {"tolerance_band", band},
              {"within_band", deviation <= band}};
}

CommandResult cmd_check_pd(const Context& ctx) {
  json_io::require_keys(ctx.inputs, {"kernel", "points"}, "check-pd inputs");
  const BlockGram gram = gram_input(ctx.inputs, "kernel");
  const PsdVerdict v = check_pd(gram, ctx.tol);
  CommandResult out;
  out.result = Json{{"n", gram.n()},
                    {"h", gram.h()},
                    {"is_psd", v.is_psd},
                    {"min_eigenvalue", v.min_eigenvalue},
                    {"hermiticity_defect", gram.hermitian().defect()},
                    {"eigenvalues", to_json(RVector(spectral(gram.hermitian()).eigenvalues))}};
  return out;
}

CommandResult cmd_factorize(const Context& ctx) {
  json_io::require_keys(ctx.inputs, {"kernel", "points", "mode", "write_csv"}, "factorize inputs");
  const BlockGram gram = gram_input(ctx.inputs, "kernel");
  const std::string mode = string_field(ctx.inputs, "mode", "eigen");
  const FactorSystem f = factorize(gram, factor_mode_from(mode), ctx.tol);
  Json factors = Json::array();
  for (Index i = 0; i < f.n(); ++i) factors.push_back(to_json(f.factor(i)));
  CommandResult out;
  out.result = Json{{"n", f.n()},
                    {"h", f.h()},
                    {"r", f.r()},
                    {"mode", mode},
                    {"max_reconstruction_error", f.reconstruction_error()},
                    {"factors", factors}};
  if (bool_field(ctx.inputs, "write_csv", false)) out.artifacts.push_back({"factors.csv", factors_csv(f)});
  return out;
}

CommandResult cmd_sample_gp(const Context& ctx) {
  json_io::require_keys(ctx.inputs, {"kernel", "points", "n_draws", "onb", "write_csv"}, "sample-gp inputs");
  const BlockGram gram = gram_input(ctx.inputs, "kernel");
  const std::string onb = string_field(ctx.inputs, "onb", "standard");
  const FactorSystem f = factorize(gram, FactorMode::eigen, ctx.tol);
  const GaussianDraw draws = sample_gp(f, draws_field(ctx.inputs), ctx.seed, onb_from(onb));
  CommandResult out;
  out.result = covariance_summary(draws, gram);
  out.result["r"] = f.r();
  out.result["onb"] = onb;
  if (bool_field(ctx.inputs, "write_csv", false)) out.artifacts.push_back({"draws.csv", draws_csv(draws)});
  return out;
}

CommandResult cmd_order(const Context& ctx) {
  json_io::require_keys(ctx.inputs, {"kernel_k", "kernel_l", "points"}, "order inputs");
  const BlockGram gk = gram_input(ctx.inputs, "kernel_k");
  const BlockGram gl = gram_input(ctx.inputs, "kernel_l");
  const OrderVerdict v = check_order(gk, gl, ctx.tol);
  CommandResult out;
  out.result = Json{{"holds", v.holds}, {"min_eigenvalue", v.min_eigenvalue}};
  if (!v.holds) {
    out.exit_code = kExitPrecondition;
    out.reason = "order_violated";
  }
  return out;
}

CommandResult cmd_rn(const Context& ctx) {
  json_io::require_keys(ctx.inputs, {"kernel_k", "kernel_l", "points"}, "rn inputs");
  const BlockGram gk = gram_input(ctx.inputs, "kernel_k");
  const BlockGram gl = gram_input(ctx.inputs, "kernel_l");
  const FactorSystem fl = factorize(gl, FactorMode::eigen, ctx.tol);
  const RnOperator rn = rn_operator(gk, fl, ctx.tol);
  double recon = 0.0;
  for (Index i = 0; i < gk.n(); ++i) {
    for (Index j = 0; j < gk.n(); ++j) recon = std::max(recon, max_abs(reconstruct_from_T(fl, rn, i, j) - gk.block(i, j)));
  }
  CommandResult out;
  out.result = Json{{"r_l", fl.r()},
                    {"T", to_json(rn.t.matrix())},
                    {"t_eigenvalues", to_json(rn.eigenvalues)},
                    {"range_projector", to_json(rn.range_projector.matrix())},
                    {"residual", rn.residual},
                    {"max_reconstruction_error", recon}};
  return out;
}

CommandResult cmd_dilate(const Context& ctx) {
  json_io::require_keys(ctx.inputs, {"cp_map"}, "dilate inputs");
  const CpMap psi = json_io::cp_map_from(json_io::field(ctx.inputs, "cp_map", "inputs"));
  const BlockGram gram = kernel_from_cp(psi, ctx.tol);
  const StinespringDilation dil = stinespring(psi, factorize(gram, FactorMode::eigen, ctx.tol));
  const StinespringDilation kd = kraus_dilation(psi);
  Json pi = Json::array();
  for (const CMatrix& u : dil.units) pi.push_back(to_json(u));
  CommandResult out;
  out.result = Json{{"d", psi.d()},
                    {"h", psi.h()},
                    {"dim_k", dil.dim_k},
                    {"minimal", dil.minimal},
                    {"V", to_json(dil.v)},
                    {"pi", pi},
                    {"exactness_defect", dil.exactness_defect(psi)},
                    {"multiplicativity_defect", dil.multiplicativity_defect()},
                    {"cyclic_span_dimension", dil.cyclic_span_dimension()},
                    {"gram_rank", spectral(gram.hermitian()).rank()},
                    {"kraus_count", static_cast<Index>(kd.dim_k / psi.d())},
                    {"kraus_dilation_dimension", kd.cyclic_span_dimension()}};
  return out;
}

CommandResult cmd_cp_rn(const Context& ctx) {
  json_io::require_keys(ctx.inputs, {"phi", "psi"}, "cp-rn inputs");
  const CpMap phi = json_io::cp_map_from(json_io::field(ctx.inputs, "phi", "inputs"));
  const CpMap psi = json_io::cp_map_from(json_io::field(ctx.inputs, "psi", "inputs"));
  if (phi.d() != psi.d() || phi.h() != psi.h()) throw SchemaError("cp-rn: phi and psi must share (d, h)");
  const CpOrderVerdict order = cp_order(phi, psi, ctx.tol);
  if (!order.holds) {
    CommandResult out;
    out.result = Json{{"order_holds", false}, {"min_eigenvalue", order.min_eigenvalue}};
    out.exit_code = kExitPrecondition;
    out.reason = "order_violated";
    return out;
  }
  const RnCommutantOperator rn = cp_rn(phi, psi, ctx.tol);
  CommandResult out;
  out.result = Json{{"order_holds", true},
                    {"dim_k", rn.dilation.dim_k},
                    {"T", to_json(rn.t.matrix())},
                    {"commutator_defect", rn.commutator_defect},
                    {"sandwich_defect", rn.sandwich_defect},
                    {"direct_defect", rn.direct_defect}};
  return out;
}

CommandResult cmd_gp_decompose(const Context& ctx) {
  json_io::require_keys(ctx.inputs, {"cp_map", "n_draws", "write_csv"}, "gp-decompose inputs");
  const CpMap psi = json_io::cp_map_from(json_io::field(ctx.inputs, "cp_map", "inputs"));
  const BlockGram gram = kernel_from_cp(psi, ctx.tol);
  const GaussianDraw draws = gp_decompose(psi, draws_field(ctx.inputs), ctx.seed, ctx.tol);
  CommandResult out;
  out.result = covariance_summary(draws, gram);
  if (bool_field(ctx.inputs, "write_csv", false)) out.artifacts.push_back({"draws.csv", draws_csv(draws)});
  return out;
}

CommandResult cmd_fit(const Context& ctx) {
  json_io::require_keys(ctx.inputs, {"kernel", "points", "data", "beta", "max_iters", "conv_tol"}, "fit inputs");
  const OperatorKernelSpec spec = json_io::kernel_from(json_io::field(ctx.inputs, "kernel", "inputs"));
  const std::vector<SamplePoint> points = json_io::points_from(json_io::field(ctx.inputs, "points", "inputs"));
  const CVector data = json_io::vector_from(json_io::field(ctx.inputs, "data", "inputs"), "data");
  if (data.size() != static_cast<Index>(points.size())) throw SchemaError("fit: one data value per point is required");
  const double beta = json_io::number_field(ctx.inputs, "beta", "inputs");
  const Index max_iters = json_io::integer_field(ctx.inputs, "max_iters", "inputs");
  const double conv_tol = json_io::number_field(ctx.inputs, "conv_tol", "inputs");
  const RegressionModel model = optimize_rho(spec, points, data, beta, max_iters, conv_tol);
  CommandResult out;
  out.result = Json{{"rho", to_json(model.rho.matrix())},
                    {"h", model.rho.dim()},
                    {"alpha", to_json(model.alpha)},
                    {"objective_trace", model.objective_trace},
                    {"gap_trace", model.gap_trace},
                    {"fw_gap", model.fw_gap()},
                    {"iterations", model.iterations},
                    {"converged", model.converged}};
  return out;
}

using Handler = CommandResult (*)(const Context&);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = {
      {"check-pd", cmd_check_pd}, {"factorize", cmd_factorize}, {"sample-gp", cmd_sample_gp},
      {"order", cmd_order},       {"rn", cmd_rn},               {"dilate", cmd_dilate},
      {"cp-rn", cmd_cp_rn},       {"gp-decompose", cmd_gp_decompose}, {"fit", cmd_fit},
  };
  return table;
}

void fail(JobOutcome& outcome, Json& doc, int code, const std::string& reason, const std::string& message) {
  outcome.exit_code = code;
  outcome.reason = reason;
  doc["status"] = "failed";
  doc["exit_code"] = code;
  doc["reason"] = reason;
  doc["message"] = message;
}

}  // namespace

std::string digest_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

JobOutcome run_job(std::string_view job_text, const JobOptions& options) {
  JobOutcome outcome;
  Json doc{{"schema_revision", kSchemaRevision}};
  try {
    Json job = Json::parse(job_text);
    if (job.is_object() && job.contains("schema_revision") && job.contains("job")) job = job.at("job");
    json_io::require_keys(job, {"command", "inputs", "output_path", "seed", "tolerance"}, "job");

    const Json& command_field = json_io::field(job, "command", "job");
    if (!command_field.is_string()) throw SchemaError("job: 'command' must be a string");
    const std::string command = command_field.get<std::string>();
    doc["command"] = command;
    const auto handler = handlers().find(command);
    if (handler == handlers().end()) throw SchemaError("job: unknown command '" + command + "'");

    if (job.contains("output_path")) {
      if (!job.at("output_path").is_string()) throw SchemaError("job: 'output_path' must be a string");
      outcome.output_path = job.at("output_path").get<std::string>();
    }
    std::uint64_t seed = 0;
    if (job.contains("seed")) {
      const Json& s = job.at("seed");
      if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
        throw SchemaError("job: 'seed' must be a nonnegative integer");
      }
      seed = s.get<std::uint64_t>();
    }
    if (options.seed) seed = *options.seed;
    double tol = kPsdTol;
    if (job.contains("tolerance")) tol = json_io::number_field(job, "tolerance", "job");
    if (options.tol) tol = *options.tol;
    if (!(tol >= 0.0) || !std::isfinite(tol)) throw SchemaError("job: tolerance must be a nonnegative number");

    job["seed"] = seed;
    job["tolerance"] = tol;
    const Json& inputs = json_io::field(job, "inputs", "job");
    if (!inputs.is_object()) throw SchemaError("job: 'inputs' must be an object");

    doc["job"] = job;
    doc["input_digest"] = "fnv1a64:" + digest_hex(job.dump());
    doc["seed"] = seed;
    doc["tolerances"] = Json{{"psd", tol}, {"rank", kRankTol}};

    CommandResult res = handler->second(Context{inputs, seed, tol});
    doc["result"] = std::move(res.result);
    if (res.exit_code == kExitOk) {
      doc["status"] = "ok";
      doc["exit_code"] = kExitOk;
    } else {
      fail(outcome, doc, res.exit_code, res.reason, "mathematical precondition violated");
    }
    Json names = Json::array();
    for (const JobArtifact& a : res.artifacts) names.push_back(a.name);
    doc["artifacts"] = names;
    outcome.artifacts = std::move(res.artifacts);
  } catch (const Json::exception& e) {
    fail(outcome, doc, kExitSchema, "schema_error", e.what());
  } catch (const SchemaError& e) {
    fail(outcome, doc, kExitSchema, e.reason(), e.what());
  } catch (const DimensionError& e) {
    fail(outcome, doc, kExitSchema, e.reason(), e.what());
  } catch (const PreconditionError& e) {
    fail(outcome, doc, kExitPrecondition, e.reason(), e.what());
  } catch (const NumericalError& e) {
    fail(outcome, doc, kExitNumerical, e.reason(), e.what());
  } catch (const std::exception& e) {
    fail(outcome, doc, kExitNumerical, "internal_error", e.what());
  }
  outcome.result_json = doc.dump(2) + "\n";
  return outcome;
}

}  // namespace opk
