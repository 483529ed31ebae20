#include "psolab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "psolab/errors.hpp"

namespace psolab {

RunTrace run_single(const SwarmConfig& config, const PsoParams& params,
                    const std::optional<AdaptiveConfig>& adaptive, const RunObserver& observer) {
  Engine engine(config, params, adaptive);
  RunTrace trace;
  trace.config = config;
  trace.params_initial = params;
  trace.adaptive = adaptive;
  trace.seed = config.seed;
  trace.initial_best_fitness = engine.initial_best_fitness();
  trace.initial_msd = engine.initial_msd();
  trace.records.reserve(config.iterations);

  while (!engine.done()) {
    try {
      StepOutcome outcome = engine.step();
      if (outcome.eigen && outcome.eigen->warning) trace.warnings.push_back(*outcome.eigen->warning);
      trace.records.push_back(outcome.record);
      if (observer) observer(engine, outcome);
    } catch (const EvaluationError& e) {
      trace.error = "iteration " + std::to_string(engine.iteration() + 1) + ": " + e.what();
      break;
    }
  }
  return trace;
}

std::string batch_file_name(std::size_t index, std::size_t n_runs) {
  const std::size_t width =
      std::max<std::size_t>(3, std::to_string(n_runs > 0 ? n_runs - 1 : 0).size());
  std::string number = std::to_string(index);
  if (number.size() < width) number.insert(0, width - number.size(), '0');
  return "swarm_" + number + ".csv";
}

std::string format_real(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

void write_csv(const std::vector<IterationRecord>& records, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (const auto& r : records) {
    out << r.iteration << ',' << format_real(r.best_fitness) << ',' << format_real(r.msd) << ','
        << format_real(r.alpha1) << ',' << format_real(r.alpha2) << ',' << format_real(r.omega)
        << '\n';
  }
}

void dump_csv(const std::vector<IterationRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_csv(records, out);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void dump_csv(const RunTrace& trace, const std::filesystem::path& path) {
  dump_csv(trace.records, path);
}

namespace {

template <typename T>
bool parse_field(std::string_view text, T& value) {
  if (text.empty()) return false;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  return result.ec == std::errc() && result.ptr == text.data() + text.size();
}

}  // namespace

std::vector<IterationRecord> parse_csv(std::istream& in, const std::string& source_name) {
  const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<IterationRecord> records;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  if (content.empty()) throw ParseError(source_name, 1, "empty file");

  while (pos < content.size()) {
    ++line_no;
    const std::size_t end = content.find('\n', pos);
    if (end == std::string::npos) throw ParseError(source_name, line_no, "line is not LF-terminated");
    const std::string_view line(content.data() + pos, end - pos);
    pos = end + 1;

    if (line_no == 1) {
      if (line != kTraceHeader) throw ParseError(source_name, line_no, "unexpected header");
      continue;
    }
    std::string_view fields[6];
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      if (count == 6) throw ParseError(source_name, line_no, "too many fields");
      fields[count++] = line.substr(start, comma == std::string_view::npos ? comma : comma - start);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (count != 6) throw ParseError(source_name, line_no, "expected 6 fields");

    IterationRecord r;
    const bool ok = parse_field(fields[0], r.iteration) && parse_field(fields[1], r.best_fitness) &&
                    parse_field(fields[2], r.msd) && parse_field(fields[3], r.alpha1) &&
                    parse_field(fields[4], r.alpha2) && parse_field(fields[5], r.omega);
    if (!ok) throw ParseError(source_name, line_no, "malformed number");
    records.push_back(r);
  }
  return records;
}

std::vector<IterationRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_csv(in, path.string());
}

namespace {

void ensure_writable(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  const auto probe = dir / ".psolab_write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

std::string manifest_row(std::size_t index, const std::string& file, const RunTrace& trace) {
  std::ostringstream row;
  const auto& c = trace.config;
  const auto& p = trace.params_initial;
  row << index << ',' << trace.seed << ',' << file << ',' << to_string(c.variant) << ','
      << to_string(c.objective) << ',' << c.n_particles << ',' << c.dims << ',' << c.iterations
      << ',' << format_real(c.boundary_radius) << ',' << format_real(p.alpha1) << ','
      << format_real(p.alpha2) << ',' << format_real(p.omega) << ',';
  if (trace.adaptive) {
    row << format_real(trace.adaptive->epsilon) << ',' << to_string(trace.adaptive->metric) << ','
        << to_string(trace.adaptive->rule);
  } else {
    row << ",,";
  }
  row << ',' << format_real(trace.final_best_fitness()) << ',' << format_real(trace.final_msd())
      << ',' << (trace.error ? "error" : "ok");
  return row.str();
}

}  // namespace

BatchResult run_batch(const SwarmConfig& config, const PsoParams& params,
                      const std::optional<AdaptiveConfig>& adaptive, std::size_t n_runs,
                      const std::filesystem::path& out_dir, std::size_t n_workers,
                      bool keep_traces) {
  if (n_runs < 1) throw ConfigError("batch needs at least one run");
  // Fail on bad configuration before touching the filesystem.
  config.validate();
  params.validate();
  if (adaptive) adaptive->validate();
  ensure_writable(out_dir);

  if (n_workers == 0) n_workers = std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min(n_workers, n_runs);

  BatchResult result;
  result.files.resize(n_runs);
  std::vector<std::string> rows(n_runs);
  std::vector<RunTrace> traces(keep_traces ? n_runs : 0);
  std::vector<std::exception_ptr> failures(n_runs);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < n_runs; i = next.fetch_add(1)) {
      try {
        SwarmConfig run_config = config;
        run_config.seed = config.seed + i;
        RunTrace trace = run_single(run_config, params, adaptive);
        const std::string name = batch_file_name(i, n_runs);
        result.files[i] = out_dir / name;
        dump_csv(trace, result.files[i]);
        rows[i] = manifest_row(i, name, trace);
        if (keep_traces) traces[i] = std::move(trace);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& failure : failures)
    if (failure) std::rethrow_exception(failure);

  result.manifest = out_dir / "manifest.csv";
  std::ofstream manifest(result.manifest, std::ios::binary | std::ios::trunc);
  if (!manifest) throw IoError("cannot write " + result.manifest.string());
  manifest << kManifestHeader << '\n';
  for (const auto& row : rows) manifest << row << '\n';
  if (!manifest) throw IoError("failed writing " + result.manifest.string());

  result.traces = std::move(traces);
  return result;
}

}  // namespace psolab
