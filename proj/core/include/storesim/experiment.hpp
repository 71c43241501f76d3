#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "storesim/sim_config.hpp"

namespace storesim::experiment {

using ParamValue = std::variant<long long, double, bool, std::string>;

std::string param_value_str(const ParamValue& value);

// Parsed sweep description. `grid` is kept sorted by parameter name; layout
// and sink paths are resolved against the manifest file's directory at load
// time so runs do not depend on the working directory.
struct ExperimentManifest {
  std::string experiment_id;
  std::string layout;
  std::vector<std::pair<std::string, std::vector<ParamValue>>> grid;
  int replicates = 1;
  std::uint64_t base_seed = 0;
  int parallelism = 1;
  std::string sink;
};

ExperimentManifest manifest_from_json_string(const std::string& text);
ExperimentManifest load_manifest(const std::filesystem::path& path);

struct SimRef {
  std::string sim_id;  // name-based UUID of (experiment, job, replicate)
  std::uint64_t seed = 0;
  int replicate = 0;
};

// One grid point: the fully resolved config plus the replicate list.
struct JobRecord {
  std::string experiment_id;
  std::string job_id;  // "job-0000", sequential in grid order
  SimConfig config;    // per-sim seed filled in at execution time
  std::vector<std::pair<std::string, ParamValue>> params;
  std::vector<SimRef> sims;
};

// Deterministic per-sim seed from (base_seed, job_id, replicate).
std::uint64_t derive_seed(std::uint64_t base_seed, const std::string& job_id,
                          int replicate);

// Cartesian product of the grid, ordered lexicographically by parameter name
// then value order. Throws ValidationError on unknown parameter names, type
// mismatches, or a grid entry for "seed".
std::vector<JobRecord> expand(const ExperimentManifest& manifest);

struct ExecutionReport {
  int total = 0;
  int completed = 0;
  int failed = 0;
  std::vector<std::pair<std::string, std::string>> failures;  // sim_id, error

  // 0 all-success, 2 partial failures; fatal errors throw instead.
  int exit_code() const { return failed == 0 ? 0 : 2; }
};

// Runs every sim on a bounded worker pool (`manifest.parallelism` in
// flight), streaming each sim to its own sink/<experiment>/<job>/<sim>.jsonl
// file. Writes manifest.json and jobs.json into the sink for traceability
// and failure records to failures.jsonl. A sim failure never aborts
// siblings; sink-level I/O failures throw. Progress lines go to `progress`
// at roughly one-second cadence when non-null.
ExecutionReport execute(const ExperimentManifest& manifest,
                        const std::vector<JobRecord>& jobs,
                        std::ostream* progress = nullptr);

struct JobAggregate {
  std::string job_id;
  int sims_expected = 0;
  int sims_found = 0;
  double mean_collisions = 0.0;
  double stddev_collisions = 0.0;  // sample standard deviation, n-1
  double mean_total_time_s = 0.0;  // mean over sims of mean agent total time
  double lambda_hat = 0.0;         // pooled events per second
  std::optional<double> fit_p_value;
  std::string fit_note;  // why the fit was skipped, when it was
  long long min_samples_required = 0;
  bool sample_size_ok = false;
};

struct AggregateReport {
  std::string experiment_id;
  std::vector<JobAggregate> jobs;
  std::vector<std::string> issues;  // corrupt/missing records, non-fatal
  long long total_records = 0;
  // Records whose (experiment, job, sim) does not resolve to exactly one
  // manifest grid point. Zero after a clean run.
  long long orphan_records = 0;
};

// Reads every record under the sink, groups by job, and recomputes the
// statistics catalog. `halfwidth` is the target confidence half-length for
// the replicate-count check (alpha fixed at 0.05). Throws ValidationError
// "no records" on an empty or missing sink.
AggregateReport aggregate(const std::filesystem::path& sink_dir,
                          double halfwidth);

std::string aggregate_to_json_string(const AggregateReport& report);

// Optional merged stream: every record wrapped with its provenance triple,
// written to sink/merged.jsonl. Returns the number of records merged.
long long write_merged_stream(const std::filesystem::path& sink_dir);

}  // namespace storesim::experiment
