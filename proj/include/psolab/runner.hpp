#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "psolab/engine.hpp"

namespace psolab {

struct RunTrace {
  SwarmConfig config;
  PsoParams params_initial;
  std::optional<AdaptiveConfig> adaptive;
  std::uint64_t seed = 0;
  double initial_best_fitness = 0.0;
  double initial_msd = 0.0;
  std::vector<IterationRecord> records;
  std::vector<std::string> warnings;
  /// Set when the run aborted early (records then hold the partial trace).
  std::optional<std::string> error;

  double final_best_fitness() const {
    return records.empty() ? initial_best_fitness : records.back().best_fitness;
  }
  double final_msd() const { return records.empty() ? initial_msd : records.back().msd; }
};

/// Called after every iteration with the engine and what the step reported.
using RunObserver = std::function<void(const Engine&, const StepOutcome&)>;

/// Runs config.iterations iterations of the configured variant. An
/// evaluation failure ends the run; the partial trace is returned with
/// `error` set.
RunTrace run_single(const SwarmConfig& config, const PsoParams& params,
                    const std::optional<AdaptiveConfig>& adaptive = std::nullopt,
                    const RunObserver& observer = nullptr);

/// "swarm_NNN.csv"; three digits, wider when n_runs needs it.
std::string batch_file_name(std::size_t index, std::size_t n_runs);

struct BatchResult {
  std::vector<std::filesystem::path> files;
  std::filesystem::path manifest;
  std::vector<RunTrace> traces;
};

/// n_runs independent runs with seeds config.seed + index, on up to
/// n_workers threads (0 = hardware concurrency). Output bytes do not depend
/// on the worker count. Throws IoError before running anything if out_dir
/// cannot be written.
BatchResult run_batch(const SwarmConfig& config, const PsoParams& params,
                      const std::optional<AdaptiveConfig>& adaptive, std::size_t n_runs,
                      const std::filesystem::path& out_dir, std::size_t n_workers,
                      bool keep_traces = false);

inline constexpr const char* kTraceHeader = "iteration,best_fitness,msd,alpha1,alpha2,omega";

/// Shortest decimal that parses back to exactly `value`.
std::string format_real(double value);

void write_csv(const std::vector<IterationRecord>& records, std::ostream& out);
/// Writes the trace CSV; IoError names the path on failure.
void dump_csv(const RunTrace& trace, const std::filesystem::path& path);
void dump_csv(const std::vector<IterationRecord>& records, const std::filesystem::path& path);

/// Strict parser for the trace format: exact header, six fields per line,
/// every line LF-terminated. ParseError carries `source_name` and the line.
std::vector<IterationRecord> parse_csv(std::istream& in, const std::string& source_name);
std::vector<IterationRecord> read_csv(const std::filesystem::path& path);

inline constexpr const char* kManifestHeader =
    "run,seed,file,variant,objective,particles,dims,iterations,boundary,alpha1,alpha2,omega,"
    "epsilon,metric,rule,final_best_fitness,final_msd,status";

}  // namespace psolab
