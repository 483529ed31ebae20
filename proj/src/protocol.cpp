#include <set>

#include "json.hpp"
#include "psolab/errors.hpp"
#include "psolab/service.hpp"

namespace psolab {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const char* where) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      throw ProtocolError(std::string("unknown field '") + item.key() + "' in " + where);
}

const json& object_field(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_object()) throw ProtocolError(std::string("'") + key + "' must be an object");
  return v;
}

double number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj[key];
  if (!v.is_number()) throw ProtocolError(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::size_t count(const json& obj, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj[key];
  if (!v.is_number_unsigned())
    throw ProtocolError(std::string("'") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

std::string text(const json& obj, const char* key, std::string fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj[key];
  if (!v.is_string()) throw ProtocolError(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

template <typename T, typename Parse>
T named(const json& obj, const char* key, T fallback, Parse parse) {
  if (!obj.contains(key)) return fallback;
  const std::string name = text(obj, key, "");
  const auto value = parse(name);
  if (!value) throw ConfigError(std::string("unknown ") + key + " '" + name + "'");
  return *value;
}

std::optional<InertiaSchedule> parse_schedule(std::string_view name) {
  if (name == "constant") return InertiaSchedule::Constant;
  if (name == "linear") return InertiaSchedule::Linear;
  return std::nullopt;
}

command::Configure parse_configure(const json& j) {
  reject_unknown(j, {"type", "id", "config", "params", "adaptive"}, "configure");
  command::Configure c;
  if (j.contains("config")) {
    const json& cfg = object_field(j, "config");
    reject_unknown(cfg,
                   {"variant", "objective", "particles", "dims", "iterations", "boundary", "seed",
                    "velocity_limit"},
                   "config");
    c.config.variant = named(cfg, "variant", c.config.variant, parse_variant);
    c.config.objective = named(cfg, "objective", c.config.objective, parse_objective);
    c.config.n_particles = count(cfg, "particles", c.config.n_particles);
    c.config.dims = count(cfg, "dims", c.config.dims);
    c.config.iterations = count(cfg, "iterations", c.config.iterations);
    c.config.boundary_radius = number(cfg, "boundary", c.config.boundary_radius);
    if (cfg.contains("seed")) {
      if (!cfg["seed"].is_number_unsigned()) throw ProtocolError("'seed' must be an unsigned integer");
      c.config.seed = cfg["seed"].get<std::uint64_t>();
    }
    if (cfg.contains("velocity_limit") && !cfg["velocity_limit"].is_null())
      c.config.velocity_limit = number(cfg, "velocity_limit", 0.0);
  }
  if (j.contains("params")) {
    const json& p = object_field(j, "params");
    reject_unknown(p, {"alpha1", "alpha2", "omega", "omega_top", "omega_bottom", "schedule"},
                   "params");
    c.params.alpha1 = number(p, "alpha1", c.params.alpha1);
    c.params.alpha2 = number(p, "alpha2", c.params.alpha2);
    c.params.omega = number(p, "omega", c.params.omega);
    c.params.omega_top = number(p, "omega_top", c.params.omega_top);
    c.params.omega_bottom = number(p, "omega_bottom", c.params.omega_bottom);
    c.params.schedule = named(p, "schedule", c.params.schedule, parse_schedule);
  }
  if (j.contains("adaptive") && !j["adaptive"].is_null()) {
    const json& a = object_field(j, "adaptive");
    reject_unknown(a, {"epsilon", "metric", "rule", "delta_mode"}, "adaptive");
    AdaptiveConfig ac;
    ac.epsilon = number(a, "epsilon", ac.epsilon);
    ac.metric = named(a, "metric", ac.metric, parse_metric);
    ac.rule = named(a, "rule", ac.rule, parse_rule);
    ac.delta_mode = named(a, "delta_mode", ac.delta_mode, parse_delta_mode);
    c.adaptive = ac;
  } else if (c.config.variant == Variant::Adaptive) {
    c.adaptive = AdaptiveConfig{};
  }
  // Adaptive runs start from their own defaults unless params say otherwise.
  if (c.config.variant == Variant::Adaptive && !j.contains("params")) {
    const PsoParams start = adaptive_default_params();
    c.params.alpha1 = start.alpha1;
    c.params.alpha2 = start.alpha2;
    c.params.omega = start.omega;
  }
  return c;
}

json params_json(const Snapshot& s) {
  return json{{"alpha1", s.alpha1}, {"alpha2", s.alpha2}, {"omega", s.omega}};
}

}  // namespace

Command parse_command(std::string_view line) {
  json j;
  try {
    j = json::parse(line.begin(), line.end());
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("message must be a JSON object");
  if (!j.contains("type") || !j["type"].is_string())
    throw ProtocolError("message needs a string 'type'");
  if (j.contains("id") && !j["id"].is_string() && !j["id"].is_number_integer())
    throw ProtocolError("'id' must be a string or an integer");
  const std::string type = j["type"].get<std::string>();

  if (type == "configure") return parse_configure(j);

  auto bare = [&](auto cmd) -> Command {
    reject_unknown(j, {"type", "id"}, type.c_str());
    return cmd;
  };
  if (type == "start") return bare(command::Start{});
  if (type == "pause") return bare(command::Pause{});
  if (type == "resume") return bare(command::Resume{});
  if (type == "reset") return bare(command::Reset{});
  if (type == "set_param") {
    reject_unknown(j, {"type", "id", "name", "value"}, "set_param");
    if (!j.contains("name") || !j.contains("value"))
      throw ProtocolError("set_param needs 'name' and 'value'");
    return command::SetParam{text(j, "name", ""), number(j, "value", 0.0)};
  }
  if (type == "set_histogram") {
    reject_unknown(j, {"type", "id", "bin_size", "log_scale"}, "set_histogram");
    command::SetHistogram h;
    h.bin_size = number(j, "bin_size", h.bin_size);
    if (j.contains("log_scale")) {
      if (!j["log_scale"].is_boolean()) throw ProtocolError("'log_scale' must be a boolean");
      h.log_scale = j["log_scale"].get<bool>();
    }
    return h;
  }
  if (type == "dump_stats") {
    reject_unknown(j, {"type", "id", "path"}, "dump_stats");
    const std::string path = text(j, "path", "");
    if (path.empty()) throw ProtocolError("dump_stats needs a non-empty 'path'");
    return command::DumpStats{path};
  }
  throw ProtocolError("unknown message type '" + type + "'");
}

std::optional<std::string> extract_id(std::string_view line) {
  const json j = json::parse(line.begin(), line.end(), nullptr, false);
  if (!j.is_object() || !j.contains("id")) return std::nullopt;
  const json& id = j["id"];
  if (!id.is_string() && !id.is_number_integer()) return std::nullopt;
  return id.dump();
}

std::string encode_reply(const Reply& reply, const std::optional<std::string>& id) {
  if (!reply.ok) return encode_error(reply.code, reply.message, reply.state, id);
  json j{{"type", "ack"}, {"command", reply.command}, {"state", to_string(reply.state)}};
  if (id) j["id"] = json::parse(*id);
  return j.dump();
}

std::string encode_error(std::string_view code, std::string_view message,
                         std::optional<SessionState> state, const std::optional<std::string>& id) {
  json j{{"type", "error"}, {"code", code}, {"message", message}};
  if (state) j["state"] = to_string(*state);
  if (id) j["id"] = json::parse(*id);
  return j.dump();
}

std::string encode_snapshot(const Snapshot& s) {
  json j{{"type", "snapshot"},
         {"iteration", s.iteration},
         {"best_fitness", s.best_fitness},
         {"msd", s.msd},
         {"params", params_json(s)},
         {"running", s.running},
         {"state", to_string(s.state)}};
  if (s.histogram) {
    j["histogram"] = json{{"bin_size", s.histogram->bin_size},
                          {"range_min", s.histogram->range_min},
                          {"range_max", s.histogram->range_max},
                          {"log_scale", s.log_scale},
                          {"counts", s.histogram->counts},
                          {"normalized", s.histogram->normalized}};
  }
  if (s.error) j["error"] = *s.error;
  return j.dump();
}

}  // namespace psolab
