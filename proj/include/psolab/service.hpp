#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "psolab/analysis.hpp"
#include "psolab/engine.hpp"

namespace psolab {

enum class SessionState { Idle, Ready, Running, Paused, Finished };

std::string_view to_string(SessionState s);

struct Snapshot {
  std::uint64_t iteration = 0;
  double best_fitness = 0.0;
  double msd = 0.0;
  /// Coefficients the next iteration runs under.
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double omega = 0.0;
  bool running = false;
  SessionState state = SessionState::Idle;
  std::optional<Histogram> histogram;
  bool log_scale = false;
  /// Why the run stopped early, if it did.
  std::optional<std::string> error;
};

/// A protocol line that is not a well-formed command.
class ProtocolError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace command {
struct Configure {
  SwarmConfig config;
  PsoParams params;
  std::optional<AdaptiveConfig> adaptive;
};
struct Start {};
struct Pause {};
struct Resume {};
struct Reset {};
struct SetParam {
  std::string name;
  double value = 0.0;
};
struct SetHistogram {
  double bin_size = kDefaultBinSize;
  bool log_scale = false;
};
struct DumpStats {
  std::string path;
};
}  // namespace command

using Command = std::variant<command::Configure, command::Start, command::Pause, command::Resume,
                             command::Reset, command::SetParam, command::SetHistogram,
                             command::DumpStats>;

std::string_view command_name(const Command& cmd);

struct Reply {
  bool ok = true;
  std::string command;
  SessionState state = SessionState::Idle;
  /// "bad_request", "state", "config", "locked" or "io" when !ok; the
  /// server adds "internal" for unexpected failures.
  std::string code;
  std::string message;
};

struct SessionOptions {
  /// Pause between iterations; zero runs flat out.
  std::chrono::microseconds step_delay{0};
};

/// One live swarm driven by its own engine thread.
///
/// apply() validates a command against the lifecycle and answers at once;
/// anything touching the engine goes through a mailbox the engine thread
/// drains between iterations, so a step never sees a half-applied change.
class Session {
 public:
  explicit Session(SessionOptions options = {});
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  Reply apply(const Command& cmd);

  SessionState state() const;
  /// Latest published snapshot with the current lifecycle state filled in;
  /// empty until a swarm is configured.
  std::optional<Snapshot> snapshot() const;
  /// Bumped on every publish.
  std::uint64_t snapshot_version() const;
  std::vector<IterationRecord> records() const;

  /// Blocks until `pred` holds for the latest snapshot or the timeout passes.
  bool wait_until(const std::function<bool(const Snapshot&)>& pred,
                  std::chrono::milliseconds timeout) const;

 private:
  struct Effect {
    std::uint64_t generation = 0;
    std::shared_ptr<Engine> engine;  // replaces the swarm when set
    std::optional<command::SetParam> param;
    std::optional<command::SetHistogram> histogram;
  };

  void loop();
  void publish();
  Reply fail(const Command& cmd, std::string code, std::string message) const;
  Reply ok(const Command& cmd) const;

  SessionOptions options_;

  mutable std::mutex mutex_;
  mutable std::condition_variable changed_;
  SessionState state_ = SessionState::Idle;
  std::uint64_t generation_ = 0;
  std::deque<Effect> mailbox_;
  std::optional<command::Configure> configured_;
  bool stop_ = false;
  std::shared_ptr<const Snapshot> snapshot_;
  std::uint64_t snapshot_version_ = 0;
  std::vector<IterationRecord> records_;

  // Engine-thread only.
  std::shared_ptr<Engine> engine_;
  std::vector<double> increments_;
  double last_msd_ = 0.0;
  Histogram histogram_;
  bool log_scale_ = false;
  std::optional<std::string> error_;

  std::thread thread_;
};

/// Wire codec for the newline-delimited JSON protocol (docs/protocol.md).
/// parse_command throws ProtocolError for malformed lines and ConfigError for
/// well-formed commands with invalid values.
Command parse_command(std::string_view line);
/// The request's "id" as JSON text, if the line is an object carrying one.
std::optional<std::string> extract_id(std::string_view line);
std::string encode_reply(const Reply& reply, const std::optional<std::string>& id = {});
std::string encode_snapshot(const Snapshot& snapshot);
std::string encode_error(std::string_view code, std::string_view message,
                         std::optional<SessionState> state = {},
                         const std::optional<std::string>& id = {});

struct ServeOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 7878;
  std::chrono::microseconds sample_interval{2000};
  SessionOptions session;
};

/// TCP listener; every connection gets its own Session.
class Server {
 public:
  explicit Server(ServeOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Actual bound port (useful with port 0).
  std::uint16_t port() const noexcept { return port_; }
  /// Accepts until stop(); returns afterwards.
  void run();
  void stop();

 private:
  struct Connection;
  void handle(const std::shared_ptr<Connection>& conn);

  ServeOptions options_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::mutex connections_mutex_;
  std::vector<std::shared_ptr<Connection>> connections_;
};

}  // namespace psolab
