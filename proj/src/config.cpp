#include "suslab/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "suslab/errors.hpp"

namespace suslab {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

double get_number(const json& j, const std::string& key, const std::string& where) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

std::uint64_t get_unsigned(const json& j, const std::string& key, const std::string& where) {
  const auto& v = j.at(key);
  if (!v.is_number_unsigned()) throw ConfigError(where + "." + key + ": expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& key, const std::string& where) {
  const auto& v = j.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::string family_key(Family f) {
  switch (f) {
    case Family::BlockRotation: return "block_rotation";
    case Family::BlockSwap: return "block_swap";
    case Family::VonNeumannKakutani: return "von_neumann_kakutani";
    case Family::ExplicitTable: return "explicit_table";
  }
  return "?";
}

Family parse_family(const std::string& s) {
  if (s == "block_rotation") return Family::BlockRotation;
  if (s == "block_swap") return Family::BlockSwap;
  if (s == "von_neumann_kakutani") return Family::VonNeumannKakutani;
  if (s == "explicit_table") return Family::ExplicitTable;
  throw ConfigError("iet.family: unknown family \"" + s + "\"");
}

IETConfig parse_iet(const json& j) {
  require_object(j, "iet");
  only_keys(j, "iet", {"family", "theta", "truncation", "table"});
  IETConfig c;
  c.family = parse_family(get_string(j, "family", "iet"));
  if (j.contains("truncation")) c.truncation = get_unsigned(j, "truncation", "iet");
  if (c.truncation < 2) throw ConfigError("iet.truncation: must be at least 2");
  if (j.contains("theta")) {
    if (c.family != Family::BlockRotation) throw ConfigError("iet.theta: only valid for block_rotation");
    c.theta = get_number(j, "theta", "iet");
    if (!(c.theta > 0.0 && c.theta < 1.0)) throw ConfigError("iet.theta: must lie in (0,1)");
  }
  if (c.family == Family::ExplicitTable) {
    if (!j.contains("table")) throw ConfigError("iet.table: required for explicit_table");
    const auto& t = j.at("table");
    require_object(t, "iet.table");
    only_keys(t, "iet.table", {"intervals", "tail"});
    const auto& list = t.at("intervals");
    if (!list.is_array() || list.empty()) throw ConfigError("iet.table.intervals: expected a nonempty array");
    for (const auto& e : list) {
      require_object(e, "iet.table.intervals[]");
      only_keys(e, "iet.table.intervals[]", {"x", "a"});
      c.table.push_back({get_number(e, "x", "iet.table.intervals[]"), get_number(e, "a", "iet.table.intervals[]")});
    }
    const std::string tail = t.contains("tail") ? get_string(t, "tail", "iet.table") : "identity";
    if (tail == "identity") c.tail = TailKind::Identity;
    else if (tail == "none") c.tail = TailKind::None;
    else throw ConfigError("iet.table.tail: expected \"identity\" or \"none\"");
  } else if (j.contains("table")) {
    throw ConfigError("iet.table: only valid for explicit_table");
  }
  return c;
}

BPolicy parse_policy(const json& j) {
  require_object(j, "b_policy");
  const std::string kind = get_string(j, "kind", "b_policy");
  if (kind == "default") {
    only_keys(j, "b_policy", {"kind", "c", "rho"});
    BPolicy p = BPolicy::default_policy();
    if (j.contains("c")) p.c = get_number(j, "c", "b_policy");
    if (j.contains("rho")) p.rho = get_number(j, "rho", "b_policy");
    if (!(p.c > 0.0)) throw ConfigError("b_policy.c: must be positive");
    if (!(p.rho > 0.0 && p.rho < 1.0)) throw ConfigError("b_policy.rho: must lie in (0,1)");
    return p;
  }
  if (kind == "proportional") {
    only_keys(j, "b_policy", {"kind", "kappa"});
    BPolicy p = BPolicy::proportional(get_number(j, "kappa", "b_policy"));
    if (!(p.kappa > 0.0)) throw ConfigError("b_policy.kappa: must be positive");
    return p;
  }
  if (kind == "explicit") {
    only_keys(j, "b_policy", {"kind", "b"});
    const auto& list = j.at("b");
    if (!list.is_array()) throw ConfigError("b_policy.b: expected an array");
    std::vector<double> b;
    for (const auto& v : list) {
      if (!v.is_number()) throw ConfigError("b_policy.b: expected numbers");
      b.push_back(v.get<double>());
    }
    return BPolicy::explicit_list(std::move(b));
  }
  throw ConfigError("b_policy.kind: unknown kind \"" + kind + "\"");
}

StreamConfig parse_stream(const json& j) {
  require_object(j, "streams[]");
  StreamConfig s;
  const std::string source = get_string(j, "source", "streams[]");
  if (source == "bernoulli") {
    only_keys(j, "streams[]", {"source", "p"});
    s.source = StreamConfig::Source::Bernoulli;
    s.p = get_number(j, "p", "streams[]");
    if (!(s.p >= 0.0 && s.p <= 1.0)) throw ConfigError("streams[].p: must lie in [0,1]");
  } else if (source == "iet_orbit") {
    only_keys(j, "streams[]", {"source", "alphabet"});
    s.source = StreamConfig::Source::IETOrbit;
    if (j.contains("alphabet")) s.alphabet = get_unsigned(j, "alphabet", "streams[]");
    if (s.alphabet < 2) throw ConfigError("streams[].alphabet: must be at least 2");
  } else if (source == "file") {
    only_keys(j, "streams[]", {"source", "path", "alphabet"});
    s.source = StreamConfig::Source::File;
    s.path = get_string(j, "path", "streams[]");
    s.alphabet = j.contains("alphabet") ? get_unsigned(j, "alphabet", "streams[]") : 0;
  } else {
    throw ConfigError("streams[].source: unknown source \"" + source + "\"");
  }
  return s;
}

ExperimentSpec parse_experiment(const json& j) {
  require_object(j, "experiments[]");
  only_keys(j, "experiments[]",
            {"kind", "n", "samples", "seed", "output_path", "checkpoints", "streams", "block_length", "h_base"});
  ExperimentSpec e = default_experiment(parse_experiment_kind(get_string(j, "kind", "experiments[]")));
  const std::string where = "experiments[" + to_string(e.kind) + "]";
  if (j.contains("n")) e.n = get_unsigned(j, "n", where);
  if (j.contains("samples")) e.samples = get_unsigned(j, "samples", where);
  if (j.contains("seed")) e.seed = get_unsigned(j, "seed", where);
  if (j.contains("output_path")) e.output_path = get_string(j, "output_path", where);
  if (e.n < 1) throw ConfigError(where + ".n: must be at least 1");
  if (e.samples < 1) throw ConfigError(where + ".samples: must be at least 1");
  const bool walks = e.kind == ExperimentKind::Lyapunov || e.kind == ExperimentKind::Aaronson;
  if (j.contains("checkpoints")) {
    if (!walks) throw ConfigError(where + ".checkpoints: only valid for lyapunov and aaronson");
    const auto& list = j.at("checkpoints");
    if (!list.is_array()) throw ConfigError(where + ".checkpoints: expected an array");
    for (const auto& v : list) {
      if (!v.is_number_unsigned() || v.get<std::uint64_t>() < 1) throw ConfigError(where + ".checkpoints: expected positive integers");
      const auto c = static_cast<std::size_t>(v.get<std::uint64_t>());
      if (!e.checkpoints.empty() && c <= e.checkpoints.back()) throw ConfigError(where + ".checkpoints: must increase");
      if (c > e.n) throw ConfigError(where + ".checkpoints: must not exceed n");
      e.checkpoints.push_back(c);
    }
  }
  const bool entropy = e.kind == ExperimentKind::Entropy;
  for (const char* key : {"streams", "block_length", "h_base"}) {
    if (j.contains(key) && !entropy) throw ConfigError(where + "." + key + ": only valid for entropy");
  }
  if (j.contains("streams")) {
    const auto& list = j.at("streams");
    if (!list.is_array()) throw ConfigError(where + ".streams: expected an array");
    e.streams.clear();
    for (const auto& s : list) e.streams.push_back(parse_stream(s));
  }
  if (j.contains("block_length")) {
    e.block_length = get_unsigned(j, "block_length", where);
    if (e.block_length < 1) throw ConfigError(where + ".block_length: must be at least 1");
  }
  if (j.contains("h_base")) {
    const auto& list = j.at("h_base");
    if (!list.is_array()) throw ConfigError(where + ".h_base: expected an array");
    e.h_base.clear();
    for (const auto& v : list) {
      if (v.is_string() && v.get<std::string>() == "inf") {
        e.h_base.push_back(std::numeric_limits<double>::infinity());
      } else if (v.is_number() && v.get<double>() >= 0.0) {
        e.h_base.push_back(v.get<double>());
      } else {
        throw ConfigError(where + ".h_base: expected nonnegative numbers or \"inf\"");
      }
    }
  }
  return e;
}

json stream_json(const StreamConfig& s) {
  switch (s.source) {
    case StreamConfig::Source::Bernoulli: return {{"source", "bernoulli"}, {"p", s.p}};
    case StreamConfig::Source::IETOrbit: return {{"source", "iet_orbit"}, {"alphabet", s.alphabet}};
    case StreamConfig::Source::File: {
      json j = {{"source", "file"}, {"path", s.path}};
      if (s.alphabet) j["alphabet"] = s.alphabet;
      return j;
    }
  }
  return {};
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Check: return "check";
    case ExperimentKind::Lyapunov: return "lyapunov";
    case ExperimentKind::Aaronson: return "aaronson";
    case ExperimentKind::Measure: return "measure";
    case ExperimentKind::Entropy: return "entropy";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (auto k : {ExperimentKind::Check, ExperimentKind::Lyapunov, ExperimentKind::Aaronson, ExperimentKind::Measure,
                 ExperimentKind::Entropy}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown experiment kind \"" + name + "\"");
}

ExperimentSpec default_experiment(ExperimentKind kind) {
  ExperimentSpec e;
  e.kind = kind;
  switch (kind) {
    case ExperimentKind::Check:
      e.n = 100000;
      break;
    case ExperimentKind::Lyapunov:
      e.n = 100000;
      e.samples = 200;
      break;
    case ExperimentKind::Aaronson:
      e.n = 1000000;
      e.samples = 200;
      break;
    case ExperimentKind::Measure:
      e.n = 1000000;
      break;
    case ExperimentKind::Entropy:
      e.n = 1000000;
      e.streams = {{StreamConfig::Source::Bernoulli, 0.1, 16, ""},
                   {StreamConfig::Source::Bernoulli, 0.3, 16, ""},
                   {StreamConfig::Source::Bernoulli, 0.5, 16, ""},
                   {StreamConfig::Source::IETOrbit, 0.5, 16, ""}};
      e.h_base = {std::numbers::ln2, std::numeric_limits<double>::infinity()};
      break;
  }
  return e;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
  }
  try {
    require_object(j, "config");
    only_keys(j, "config", {"iet", "b_policy", "delta", "experiments", "plot"});
    ExperimentConfig c;
    if (j.contains("iet")) c.iet = parse_iet(j.at("iet"));
    if (j.contains("b_policy")) c.b_policy = parse_policy(j.at("b_policy"));
    if (j.contains("delta")) c.delta = get_number(j, "delta", "config");
    if (!(c.delta > 0.0 && c.delta < 0.5)) throw ConfigError("delta: must lie in (0, 1/2)");
    if (j.contains("experiments")) {
      const auto& list = j.at("experiments");
      if (!list.is_array()) throw ConfigError("experiments: expected an array");
      for (const auto& e : list) c.experiments.push_back(parse_experiment(e));
    }
    if (j.contains("plot")) {
      if (!j.at("plot").is_boolean()) throw ConfigError("plot: expected a boolean");
      c.plot = j.at("plot").get<bool>();
    }
    return c;
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config: ") + ex.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  json iet = {{"family", family_key(c.iet.family)}, {"truncation", c.iet.truncation}};
  if (c.iet.family == Family::BlockRotation) iet["theta"] = c.iet.theta;
  if (c.iet.family == Family::ExplicitTable) {
    json list = json::array();
    for (const auto& e : c.iet.table) list.push_back({{"x", e.x}, {"a", e.a}});
    iet["table"] = {{"intervals", list}, {"tail", c.iet.tail == TailKind::Identity ? "identity" : "none"}};
  }
  json policy;
  switch (c.b_policy.kind) {
    case BPolicy::Kind::Default: policy = {{"kind", "default"}, {"c", c.b_policy.c}, {"rho", c.b_policy.rho}}; break;
    case BPolicy::Kind::Proportional: policy = {{"kind", "proportional"}, {"kappa", c.b_policy.kappa}}; break;
    case BPolicy::Kind::Explicit: policy = {{"kind", "explicit"}, {"b", c.b_policy.b}}; break;
  }
  json experiments = json::array();
  for (const auto& e : c.experiments) {
    json x = {{"kind", to_string(e.kind)}, {"n", e.n}, {"samples", e.samples}, {"seed", e.seed}};
    if (!e.output_path.empty()) x["output_path"] = e.output_path;
    if (!e.checkpoints.empty()) x["checkpoints"] = e.checkpoints;
    if (e.kind == ExperimentKind::Entropy) {
      json streams = json::array();
      for (const auto& s : e.streams) streams.push_back(stream_json(s));
      x["streams"] = streams;
      x["block_length"] = e.block_length;
      json h = json::array();
      for (double v : e.h_base) {
        if (std::isinf(v)) h.push_back("inf");
        else h.push_back(v);
      }
      x["h_base"] = h;
    }
    experiments.push_back(x);
  }
  json out = {{"iet", iet}, {"b_policy", policy}, {"delta", c.delta}, {"experiments", experiments}, {"plot", c.plot}};
  return out.dump(2) + "\n";
}

CountableIET build_iet(const IETConfig& c) {
  switch (c.family) {
    case Family::BlockRotation: return CountableIET::block_rotation(c.theta, c.truncation);
    case Family::BlockSwap: return CountableIET::block_swap(c.truncation);
    case Family::VonNeumannKakutani: return CountableIET::von_neumann_kakutani(c.truncation);
    case Family::ExplicitTable: {
      try {
        return CountableIET::explicit_table(c.table, c.tail, c.truncation);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("iet.table: ") + e.what());
      }
    }
  }
  throw ConfigError("iet: unknown family");
}

}  // namespace suslab
