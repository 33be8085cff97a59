// Batch front end: one job document in, one result document (plus optional
// CSV artifacts) out. Links only against the C API.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "opkernel/opkernel.h"

namespace {

constexpr int kExitSchema = 2;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out << content;
  return static_cast<bool>(out);
}

// result.json + "draws.csv" -> result.draws.csv
std::filesystem::path artifact_path(const std::filesystem::path& result, const std::string& name) {
  std::filesystem::path p = result;
  p.replace_filename(result.stem().string() + "." + name);
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator-valued kernel toolkit: runs one job document"};
  std::string job_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  app.add_option("--job", job_path, "Job document (JSON), or a previous result document to re-run")->required();
  app.add_option("--out", out_path, "Result JSON path (overrides output_path in the job)");
  app.add_option("--seed", seed, "Seed override for stochastic commands");
  app.add_option("--tol", tol, "PSD tolerance override")->check(CLI::NonNegativeNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitSchema;
  }

  const std::optional<std::string> text = read_file(job_path);
  if (!text) {
    std::cerr << "opkernel-cli: cannot read job file " << job_path << "\n";
    return kExitSchema;
  }

  opk_job_result* result = nullptr;
  const std::uint64_t* seed_ptr = seed ? &*seed : nullptr;
  const double* tol_ptr = tol ? &*tol : nullptr;
  if (opk_job_run(text->c_str(), seed_ptr, tol_ptr, &result) != OPK_OK) {
    std::cerr << "opkernel-cli: " << opk_last_error() << "\n";
    return 1;
  }

  const int exit_code = opk_job_exit_code(result);
  std::string target = out_path.empty() ? opk_job_output_path(result) : out_path;
  if (target.empty()) {
    std::cout << opk_job_json(result);
  } else {
    const std::filesystem::path path(target);
    if (!write_file(path, opk_job_json(result))) {
      std::cerr << "opkernel-cli: cannot write " << target << "\n";
      opk_job_free(result);
      return 1;
    }
    for (size_t k = 0; k < opk_job_artifact_count(result); ++k) {
      const auto ap = artifact_path(path, opk_job_artifact_name(result, k));
      if (!write_file(ap, opk_job_artifact_content(result, k))) {
        std::cerr << "opkernel-cli: cannot write " << ap << "\n";
        opk_job_free(result);
        return 1;
      }
    }
  }
  if (exit_code != 0) std::cerr << "opkernel-cli: " << opk_job_reason(result) << "\n";
  opk_job_free(result);
  return exit_code;
}
