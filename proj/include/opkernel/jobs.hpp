#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace opk {

/// Revision tag written into every result document.
inline constexpr const char* kSchemaRevision = "opkernel-job/1";

enum ExitCode : int {
  kExitOk = 0,
  kExitNumerical = 1,
  kExitSchema = 2,
  kExitPrecondition = 3,
};

struct JobOptions {
  std::optional<std::uint64_t> seed;  // overrides the job's seed
  std::optional<double> tol;          // overrides the PSD tolerance
};

struct JobArtifact {
  std::string name;  // e.g. "draws.csv"
  std::string content;
};

struct JobOutcome {
  int exit_code = kExitOk;
  std::string reason;       // empty on success
  std::string result_json;  // always populated
  std::string output_path;  // from the job document, may be empty
  std::vector<JobArtifact> artifacts;
};

/// Runs one job document. Accepts either a job document or a previously
/// written result document (whose embedded "job" is re-run). Never throws.
JobOutcome run_job(std::string_view job_text, const JobOptions& options = {});

/// FNV-1a 64-bit digest, hex encoded.
std::string digest_hex(std::string_view bytes);

}  // namespace opk
