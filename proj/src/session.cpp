#include <cmath>

#include "psolab/errors.hpp"
#include "psolab/runner.hpp"
#include "psolab/service.hpp"

namespace psolab {

namespace {

// Keeps a per-iteration histogram copy cheap.
constexpr std::size_t kMaxHistogramBins = 10000;

template <typename... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <typename... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

}  // namespace

std::string_view to_string(SessionState s) {
  switch (s) {
    case SessionState::Idle: return "idle";
    case SessionState::Ready: return "ready";
    case SessionState::Running: return "running";
    case SessionState::Paused: return "paused";
    case SessionState::Finished: return "finished";
  }
  return "idle";
}

std::string_view command_name(const Command& cmd) {
  return std::visit(overloaded{
                        [](const command::Configure&) { return "configure"; },
                        [](const command::Start&) { return "start"; },
                        [](const command::Pause&) { return "pause"; },
                        [](const command::Resume&) { return "resume"; },
                        [](const command::Reset&) { return "reset"; },
                        [](const command::SetParam&) { return "set_param"; },
                        [](const command::SetHistogram&) { return "set_histogram"; },
                        [](const command::DumpStats&) { return "dump_stats"; },
                    },
                    cmd);
}

Session::Session(SessionOptions options) : options_(options) {
  histogram_ = build_histogram({}, kDefaultBinSize);
  thread_ = std::thread([this] { loop(); });
}

Session::~Session() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  changed_.notify_all();
  thread_.join();
}

Reply Session::ok(const Command& cmd) const {
  Reply r;
  r.command = command_name(cmd);
  r.state = state_;
  return r;
}

Reply Session::fail(const Command& cmd, std::string code, std::string message) const {
  Reply r = ok(cmd);
  r.ok = false;
  r.code = std::move(code);
  r.message = std::move(message);
  return r;
}

Reply Session::apply(const Command& cmd) {
  std::unique_lock lock(mutex_);
  auto illegal = [&] {
    return fail(cmd, "state",
                std::string(command_name(cmd)) + " is not allowed while " +
                    std::string(to_string(state_)));
  };

  Reply reply = std::visit(
      overloaded{
          [&](const command::Configure& c) -> Reply {
            if (state_ == SessionState::Running) return illegal();
            std::shared_ptr<Engine> engine;
            try {
              engine = std::make_shared<Engine>(c.config, c.params, c.adaptive);
            } catch (const ConfigError& e) {
              return fail(cmd, "config", e.what());
            } catch (const EvaluationError& e) {
              return fail(cmd, "config", std::string("initial swarm: ") + e.what());
            }
            configured_ = c;
            records_.clear();
            snapshot_.reset();
            state_ = SessionState::Ready;
            mailbox_.push_back(Effect{++generation_, std::move(engine), {}, {}});
            return ok(cmd);
          },
          [&](const command::Start&) -> Reply {
            if (state_ != SessionState::Ready) return illegal();
            state_ = SessionState::Running;
            return ok(cmd);
          },
          [&](const command::Pause&) -> Reply {
            if (state_ != SessionState::Running) return illegal();
            state_ = SessionState::Paused;
            return ok(cmd);
          },
          [&](const command::Resume&) -> Reply {
            if (state_ != SessionState::Paused) return illegal();
            state_ = SessionState::Running;
            return ok(cmd);
          },
          [&](const command::Reset&) -> Reply {
            if (!configured_) return illegal();
            // Construction already succeeded once with this configuration.
            auto engine = std::make_shared<Engine>(configured_->config, configured_->params,
                                                   configured_->adaptive);
            records_.clear();
            snapshot_.reset();
            state_ = SessionState::Ready;
            mailbox_.push_back(Effect{++generation_, std::move(engine), {}, {}});
            return ok(cmd);
          },
          [&](const command::SetParam& p) -> Reply {
            if (!configured_) return illegal();
            if (configured_->config.variant == Variant::Adaptive)
              return fail(cmd, "locked", "adaptive variant parameters are locked");
            const double max = p.name == "omega" ? kOmegaUiMax : kAlphaUiMax;
            if (p.name != "alpha1" && p.name != "alpha2" && p.name != "omega")
              return fail(cmd, "bad_request", "unknown parameter '" + p.name + "'");
            if (!(p.value >= 0.0 && p.value <= max))
              return fail(cmd, "config", p.name + " must lie in [0, " + format_real(max) + "]");
            mailbox_.push_back(Effect{generation_, nullptr, p, {}});
            return ok(cmd);
          },
          [&](const command::SetHistogram& h) -> Reply {
            if (!(h.bin_size > 0.0) || !std::isfinite(h.bin_size) ||
                bin_count(h.bin_size, kDefaultRangeMin, kDefaultRangeMax) > kMaxHistogramBins)
              return fail(cmd, "config", "bin_size must be positive and give at most " +
                                             std::to_string(kMaxHistogramBins) + " bins");
            mailbox_.push_back(Effect{generation_, nullptr, {}, h});
            return ok(cmd);
          },
          [&](const command::DumpStats& d) -> Reply {
            if (!configured_) return illegal();
            const auto records = records_;
            lock.unlock();
            try {
              dump_csv(records, d.path);
            } catch (const IoError& e) {
              lock.lock();
              return fail(cmd, "io", e.what());
            }
            lock.lock();
            return ok(cmd);
          },
      },
      cmd);
  lock.unlock();
  changed_.notify_all();
  return reply;
}

void Session::loop() {
  std::unique_lock lock(mutex_);
  while (true) {
    changed_.wait(lock, [&] {
      return stop_ || !mailbox_.empty() || (state_ == SessionState::Running && engine_);
    });
    if (stop_) return;

    std::deque<Effect> effects;
    effects.swap(mailbox_);
    const std::uint64_t generation = generation_;
    const bool run = state_ == SessionState::Running;
    lock.unlock();

    bool dirty = false;
    for (auto& e : effects) {
      if (e.engine) {
        engine_ = std::move(e.engine);
        increments_.clear();
        last_msd_ = engine_->initial_msd();
        histogram_ = build_histogram({}, histogram_.bin_size);
        error_.reset();
      }
      if (e.param && engine_) {
        PsoParams p = engine_->params();
        if (e.param->name == "alpha1") p.alpha1 = e.param->value;
        if (e.param->name == "alpha2") p.alpha2 = e.param->value;
        if (e.param->name == "omega") p.omega = e.param->value;
        engine_->set_params(p);
      }
      if (e.histogram) {
        histogram_ = build_histogram(increments_, e.histogram->bin_size);
        log_scale_ = e.histogram->log_scale;
      }
      dirty = true;
    }

    std::optional<IterationRecord> record;
    bool finished = false;
    if (run && engine_ && !engine_->done()) {
      try {
        record = engine_->step().record;
        if (record->msd > last_msd_) {
          increments_.push_back(record->msd - last_msd_);
          histogram_add(histogram_, increments_.back());
        }
        last_msd_ = record->msd;
        finished = engine_->done();
      } catch (const EvaluationError& e) {
        error_ = "iteration " + std::to_string(engine_->iteration() + 1) + ": " + e.what();
        finished = true;
      }
    } else if (run && engine_) {
      finished = true;
    }

    lock.lock();
    if (generation != generation_) continue;  // reset or reconfigured mid-step
    if (record) records_.push_back(*record);
    if (finished && state_ == SessionState::Running) state_ = SessionState::Finished;
    if (dirty || record || finished) publish();
    if (record && options_.step_delay.count() > 0)
      changed_.wait_for(lock, options_.step_delay, [&] { return stop_ || !mailbox_.empty(); });
  }
}

void Session::publish() {
  if (!engine_) return;
  auto s = std::make_shared<Snapshot>();
  const SwarmState& st = engine_->state();
  s->iteration = st.iteration;
  s->best_fitness = st.global_best_fitness;
  s->msd = last_msd_;
  const PsoParams next =
      scheduled_params(engine_->params(), engine_->iteration(), engine_->config().iterations);
  s->alpha1 = next.alpha1;
  s->alpha2 = next.alpha2;
  s->omega = next.omega;
  s->histogram = histogram_;
  normalize(*s->histogram);
  s->log_scale = log_scale_;
  s->error = error_;
  snapshot_ = std::move(s);
  ++snapshot_version_;
  changed_.notify_all();
}

SessionState Session::state() const {
  std::lock_guard lock(mutex_);
  return state_;
}

std::optional<Snapshot> Session::snapshot() const {
  std::lock_guard lock(mutex_);
  if (!snapshot_) return std::nullopt;
  Snapshot s = *snapshot_;
  s.state = state_;
  s.running = state_ == SessionState::Running;
  return s;
}

std::uint64_t Session::snapshot_version() const {
  std::lock_guard lock(mutex_);
  return snapshot_version_;
}

std::vector<IterationRecord> Session::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

bool Session::wait_until(const std::function<bool(const Snapshot&)>& pred,
                         std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mutex_);
  return changed_.wait_for(lock, timeout, [&] {
    if (!snapshot_) return false;
    Snapshot s = *snapshot_;
    s.state = state_;
    s.running = state_ == SessionState::Running;
    return pred(s);
  });
}

}  // namespace psolab
