// psolab command-line front end: run, batch, analyze, serve.
//
// Exit codes: 0 success, 1 usage (bad flags or values), 2 runtime or I/O failure.

#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "psolab/analysis.hpp"
#include "psolab/errors.hpp"
#include "psolab/runner.hpp"
#include "psolab/service.hpp"

namespace fs = std::filesystem;
using namespace psolab;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SwarmFlags {
  std::string variant = "standard";
  std::string objective = "sphere";
  std::size_t particles = 20;
  std::size_t dims = 20;
  std::size_t iters = 1000;
  double boundary = 500.0;
  std::optional<double> alpha1, alpha2, omega;
  std::string schedule = "constant";
  double omega_top = 0.8;
  double omega_bottom = 0.4;
  std::optional<double> velocity_limit;
  std::uint64_t seed = 0;

  std::optional<double> epsilon;
  std::optional<std::string> metric, rule, delta_mode;

  CLI::Option* epsilon_opt = nullptr;
  std::vector<CLI::Option*> adaptive_opts;
};

void add_swarm_flags(CLI::App& cmd, SwarmFlags& f) {
  cmd.add_option("--variant", f.variant, "standard | eigencritical | adaptive")
      ->capture_default_str();
  cmd.add_option("--objective", f.objective, "sphere | rastrigin | griewank | schwefel")
      ->capture_default_str();
  cmd.add_option("--particles,-N", f.particles, "swarm size")->capture_default_str();
  cmd.add_option("--dims,-D", f.dims, "search-space dimension")->capture_default_str();
  cmd.add_option("--iters,-I", f.iters, "iterations per run")->capture_default_str();
  cmd.add_option("--boundary,-B", f.boundary, "radius of the initial placement ball")
      ->capture_default_str();
  cmd.add_option("--alpha1", f.alpha1, "cognitive coefficient (default 1.494; adaptive 1)");
  cmd.add_option("--alpha2", f.alpha2, "social coefficient (default 1.494; adaptive 1)");
  cmd.add_option("--omega", f.omega, "inertia weight (default 0.729; adaptive 0.815)");
  cmd.add_option("--schedule", f.schedule, "inertia schedule: constant | linear")
      ->capture_default_str();
  cmd.add_option("--omega-top", f.omega_top, "linear schedule start")->capture_default_str();
  cmd.add_option("--omega-bottom", f.omega_bottom, "linear schedule end")->capture_default_str();
  cmd.add_option("--velocity-limit", f.velocity_limit, "per-component velocity clamp (off by default)");
  cmd.add_option("--seed", f.seed, "random seed")->capture_default_str();

  f.epsilon_opt = cmd.add_option("--epsilon", f.epsilon, "adaptive epsilon in (0, 1)");
  f.adaptive_opts = {
      f.epsilon_opt,
      cmd.add_option("--metric", f.metric, "adaptive metric: particle_dist | centroid_dist | vel_norm"),
      cmd.add_option("--rule", f.rule, "adaptive rule: dependant | independent"),
      cmd.add_option("--delta-mode", f.delta_mode,
                     "adaptive delta: squash_then_diff | diff_then_squash"),
  };
}

template <typename T, typename Parse>
T parse_name(const std::string& flag, const std::string& value, Parse parse) {
  const auto parsed = parse(value);
  if (!parsed) throw UsageError("unknown " + flag + " '" + value + "'");
  return *parsed;
}

struct ResolvedSwarm {
  SwarmConfig config;
  PsoParams params;
  std::optional<AdaptiveConfig> adaptive;
};

ResolvedSwarm resolve(const SwarmFlags& f) {
  ResolvedSwarm r;
  r.config.variant = parse_name<Variant>("--variant", f.variant, parse_variant);
  r.config.objective = parse_name<ObjectiveId>("--objective", f.objective, parse_objective);
  r.config.n_particles = f.particles;
  r.config.dims = f.dims;
  r.config.iterations = f.iters;
  r.config.boundary_radius = f.boundary;
  r.config.seed = f.seed;
  r.config.velocity_limit = f.velocity_limit;

  const bool adaptive = r.config.variant == Variant::Adaptive;
  if (!adaptive) {
    for (const CLI::Option* opt : f.adaptive_opts)
      if (opt->count() > 0)
        throw UsageError(opt->get_name() + " only applies to --variant adaptive");
  }

  const PsoParams start = adaptive ? adaptive_default_params() : PsoParams{};
  r.params.alpha1 = f.alpha1.value_or(start.alpha1);
  r.params.alpha2 = f.alpha2.value_or(start.alpha2);
  r.params.omega = f.omega.value_or(start.omega);
  r.params.omega_top = f.omega_top;
  r.params.omega_bottom = f.omega_bottom;
  if (f.schedule == "constant") r.params.schedule = InertiaSchedule::Constant;
  else if (f.schedule == "linear") r.params.schedule = InertiaSchedule::Linear;
  else throw UsageError("unknown --schedule '" + f.schedule + "'");

  if (adaptive) {
    AdaptiveConfig ac;
    if (f.epsilon) {
      ac.epsilon = *f.epsilon;
    } else {
      std::cerr << "warning: --epsilon not given, using default " << format_real(ac.epsilon)
                << '\n';
    }
    if (f.metric) ac.metric = parse_name<MetricId>("--metric", *f.metric, parse_metric);
    if (f.rule) ac.rule = parse_name<RuleId>("--rule", *f.rule, parse_rule);
    if (f.delta_mode)
      ac.delta_mode = parse_name<DeltaMode>("--delta-mode", *f.delta_mode, parse_delta_mode);
    r.adaptive = ac;
  }

  try {
    r.config.validate();
    r.params.validate();
    if (r.adaptive) r.adaptive->validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  return r;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample standard deviation (n - 1); 0 for a single value.
double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

int cmd_run(const SwarmFlags& f, const std::optional<std::string>& out) {
  const ResolvedSwarm r = resolve(f);
  const RunTrace trace = run_single(r.config, r.params, r.adaptive);
  std::ostream& summary = out ? std::cout : std::cerr;
  if (out) {
    dump_csv(trace, *out);
  } else {
    write_csv(trace.records, std::cout);
    std::cout.flush();
  }
  summary << "final_best_fitness " << format_real(trace.final_best_fitness()) << '\n'
          << "final_msd " << format_real(trace.final_msd()) << '\n'
          << "initial_msd " << format_real(trace.initial_msd) << '\n';
  if (!trace.warnings.empty())
    std::cerr << "warning: " << trace.warnings.size() << " iteration(s) left positions unchanged ("
              << trace.warnings.front() << ")\n";
  if (trace.error) {
    std::cerr << "error: run stopped at " << *trace.error << '\n';
    return kExitRuntime;
  }
  return 0;
}

int cmd_batch(const SwarmFlags& f, std::size_t runs, const std::string& out_dir,
              std::size_t workers) {
  const ResolvedSwarm r = resolve(f);
  if (runs < 1) throw UsageError("--runs must be at least 1");
  const BatchResult batch =
      run_batch(r.config, r.params, r.adaptive, runs, out_dir, workers, /*keep_traces=*/true);

  std::vector<double> best, msd;
  std::size_t failed = 0;
  for (const auto& t : batch.traces) {
    best.push_back(t.final_best_fitness());
    msd.push_back(t.final_msd());
    if (t.error) ++failed;
  }
  std::cout << "runs " << runs << '\n'
            << "mean_final_best_fitness " << format_real(mean_of(best)) << '\n'
            << "sd_final_best_fitness " << format_real(sd_of(best)) << '\n'
            << "min_final_best_fitness " << format_real(*std::min_element(best.begin(), best.end()))
            << '\n'
            << "mean_final_msd " << format_real(mean_of(msd)) << '\n'
            << "manifest " << batch.manifest.string() << '\n';
  if (failed > 0) {
    std::cerr << "error: " << failed << " run(s) stopped early; see manifest status\n";
    return kExitRuntime;
  }
  return 0;
}

json fit_json(const std::vector<double>& increments) {
  try {
    const PowerLawFit fit = fit_power_law(increments);
    const ExponentialFit ex = fit_exponential_tail(increments, fit.xmin_hat);
    return json{{"alpha_hat", fit.alpha_hat},
                {"xmin_hat", fit.xmin_hat},
                {"n_tail", fit.n_tail},
                {"ks", fit.ks},
                {"low_confidence", fit.low_confidence},
                {"exponential_lambda", ex.lambda},
                {"exponential_ks", ex.ks},
                {"power_law_preferred", fit.ks < ex.ks}};
  } catch (const DegenerateSampleError& e) {
    return json{{"error", e.what()}};
  }
}

int cmd_analyze(const std::vector<std::string>& files, double bin_size,
                const std::vector<double>& range, bool log_log,
                const std::optional<std::string>& out_dir) {
  if (!(bin_size > 0.0)) throw UsageError("--bin-size must be positive");
  if (range.size() != 2 || !(range[1] > range[0])) throw UsageError("--range needs MIN MAX with MIN < MAX");

  std::vector<std::vector<IterationRecord>> traces;
  for (const auto& f : files) traces.push_back(read_csv(f));

  std::size_t length = traces.front().size();
  for (const auto& t : traces) length = std::min(length, t.size());

  std::vector<double> final_best, final_msd, increments;
  for (const auto& t : traces) {
    if (t.empty()) continue;
    final_best.push_back(t.back().best_fitness);
    final_msd.push_back(t.back().msd);
    std::vector<double> msd;
    msd.reserve(t.size());
    for (const auto& rec : t) msd.push_back(rec.msd);
    const auto inc = positive_increments(msd);
    increments.insert(increments.end(), inc.begin(), inc.end());
  }

  json summary{{"files", files.size()}, {"common_iterations", length}};
  if (!final_best.empty()) {
    summary["mean_final_best_fitness"] = mean_of(final_best);
    summary["sd_final_best_fitness"] = sd_of(final_best);
    summary["mean_final_msd"] = mean_of(final_msd);
  }
  summary["positive_increments"] = increments.size();

  const Histogram hist = build_histogram(increments, bin_size, range[0], range[1]);
  summary["histogram"] = json{{"bin_size", bin_size},
                              {"range_min", range[0]},
                              {"range_max", range[1]},
                              {"bins", hist.counts.size()},
                              {"in_range", hist.total()},
                              {"log_log", log_log}};
  if (increments.empty()) {
    summary["notice"] = "no positive increments";
    summary["power_law"] = nullptr;
    std::cerr << "notice: no positive increments\n";
  } else {
    summary["power_law"] = fit_json(increments);
  }

  if (out_dir) {
    fs::create_directories(*out_dir);
    const fs::path dir(*out_dir);
    {
      std::ofstream curves(dir / "curves.csv", std::ios::binary);
      curves << "iteration,mean_best_fitness,mean_msd\n";
      for (std::size_t i = 0; i < length; ++i) {
        double b = 0.0, m = 0.0;
        for (const auto& t : traces) {
          b += t[i].best_fitness;
          m += t[i].msd;
        }
        const auto n = static_cast<double>(traces.size());
        curves << traces.front()[i].iteration << ',' << format_real(b / n) << ','
               << format_real(m / n) << '\n';
      }
      if (!curves) throw IoError("failed writing " + (dir / "curves.csv").string());
    }
    {
      std::ofstream h(dir / "histogram.csv", std::ios::binary);
      if (log_log) {
        h << "log10_bin_center,log10_count,log10_normalized\n";
        for (std::size_t i = 0; i < hist.counts.size(); ++i) {
          if (hist.counts[i] == 0) continue;
          const double centre = hist.bin_low(i) + bin_size / 2.0;
          h << format_real(std::log10(centre)) << ','
            << format_real(std::log10(static_cast<double>(hist.counts[i]))) << ','
            << (hist.normalized[i] > 0.0 ? format_real(std::log10(hist.normalized[i])) : "") << '\n';
        }
      } else {
        h << "bin_low,bin_high,count,normalized\n";
        for (std::size_t i = 0; i < hist.counts.size(); ++i)
          h << format_real(hist.bin_low(i)) << ',' << format_real(hist.bin_low(i) + bin_size) << ','
            << hist.counts[i] << ',' << format_real(hist.normalized[i]) << '\n';
      }
      if (!h) throw IoError("failed writing " + (dir / "histogram.csv").string());
    }
    std::ofstream s(dir / "summary.json", std::ios::binary);
    s << summary.dump(2) << '\n';
    if (!s) throw IoError("failed writing " + (dir / "summary.json").string());
  }
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_serve(const std::string& host, std::uint16_t port, double sample_ms,
              std::int64_t step_delay_us) {
  if (!(sample_ms > 0.0)) throw UsageError("--sample-interval-ms must be positive");
  if (step_delay_us < 0) throw UsageError("--step-delay-us must be non-negative");

  // Route SIGINT/SIGTERM to a waiter thread so shutdown is orderly.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  ServeOptions options;
  options.host = host;
  options.port = port;
  options.sample_interval = std::chrono::microseconds(
      std::max<std::int64_t>(1, std::llround(sample_ms * 1000.0)));
  options.session.step_delay = std::chrono::microseconds(step_delay_us);
  Server server(options);
  std::cout << "listening on " << host << ':' << server.port() << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  server.run();
  // run() also returns if accept fails; wake the waiter either way.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle swarm optimization laboratory"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read flags from a TOML/INI file ([run], [batch], ... sections)");

  SwarmFlags run_flags;
  std::optional<std::string> run_out;
  auto* run = app.add_subcommand("run", "run one swarm and write its trace CSV");
  add_swarm_flags(*run, run_flags);
  run->add_option("--out,-o", run_out, "trace CSV path (default: stdout)");

  SwarmFlags batch_flags;
  std::size_t runs = 10;
  std::string out_dir = "batch_out";
  std::size_t workers = 0;
  auto* batch = app.add_subcommand("batch", "run seeded repetitions in parallel");
  add_swarm_flags(*batch, batch_flags);
  batch->add_option("--runs", runs, "number of runs (seeds seed..seed+runs-1)")->capture_default_str();
  batch->add_option("--out-dir", out_dir, "directory for swarm_NNN.csv and manifest.csv")
      ->capture_default_str();
  batch->add_option("--workers", workers, "worker threads (0 = hardware concurrency)")
      ->capture_default_str();

  std::vector<std::string> files;
  double bin_size = kDefaultBinSize;
  std::vector<double> range{kDefaultRangeMin, kDefaultRangeMax};
  bool log_log = false;
  std::optional<std::string> analyze_out;
  auto* analyze = app.add_subcommand("analyze", "summarize trace CSVs and fit the increment tail");
  analyze->add_option("files", files, "trace CSV files")->required();
  analyze->add_option("--bin-size", bin_size, "histogram bin width")->capture_default_str();
  analyze->add_option("--range", range, "histogram range MIN MAX")->expected(2)->capture_default_str();
  analyze->add_flag("--log-log", log_log, "emit the histogram in log10 coordinates");
  analyze->add_option("--out-dir", analyze_out, "write curves.csv, histogram.csv, summary.json");

  std::string host = "127.0.0.1";
  std::uint16_t port = 7878;
  double sample_ms = 2.0;
  std::int64_t step_delay_us = 0;
  auto* serve = app.add_subcommand("serve", "live-control service (newline-delimited JSON over TCP)");
  serve->add_option("--host", host, "bind address")->capture_default_str();
  serve->add_option("--port", port, "TCP port (0 = any free port)")->capture_default_str();
  serve->add_option("--sample-interval-ms", sample_ms, "telemetry sample interval")
      ->capture_default_str();
  serve->add_option("--step-delay-us", step_delay_us, "pause between iterations")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_flags, run_out);
    if (*batch) return cmd_batch(batch_flags, runs, out_dir, workers);
    if (*analyze) return cmd_analyze(files, bin_size, range, log_log, analyze_out);
    if (*serve) return cmd_serve(host, port, sample_ms, step_delay_us);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
