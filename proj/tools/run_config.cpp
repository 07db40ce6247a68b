#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "permqfi/error.hpp"

namespace permqfi::cli {

namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

double to_number(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw InvalidArgument("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::vector<double> rate_values(const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>()};
  if (v.is_string()) return parse_values(v.get<std::string>());
  if (v.is_array()) {
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw InvalidArgument(key + " entries must be numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  throw InvalidArgument(key + " must be a number, a list or an \"a:b:count\" grid");
}

std::vector<int> int_values(const json& v, const std::string& key) {
  if (v.is_number_integer()) return {v.get<int>()};
  if (v.is_string()) return parse_ints(v.get<std::string>());
  if (v.is_array()) {
    std::vector<int> out;
    for (const auto& x : v) {
      if (!x.is_number_integer()) throw InvalidArgument(key + " entries must be integers");
      out.push_back(x.get<int>());
    }
    return out;
  }
  throw InvalidArgument(key + " must be an integer or a list of integers");
}

template <typename T>
T get(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument("config key '" + key + "' has the wrong type");
  }
}

void reject_unknown(const json& section, const std::string& name, std::initializer_list<const char*> keys) {
  if (!section.is_object()) throw InvalidArgument("config section '" + name + "' must be an object");
  for (const auto& [k, _] : section.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw InvalidArgument("unknown config key '" + name + "." + k + "'");
  }
}

}  // namespace

PipelineOptions RunConfig::pipeline() const {
  PipelineOptions o;
  o.times = times();
  o.qfi = qfi;
  o.integrator = integrator;
  o.refine = refine;
  o.refine_tolerance = refine_tolerance;
  o.workers = workers;
  return o;
}

SimParams RunConfig::params(int num_qubits, double kappa_ratio, double gamma_ratio) const {
  SimParams p;
  p.num_qubits = num_qubits;
  p.g = 1.0;
  p.kappa = kappa_ratio;
  p.gamma = gamma_ratio;
  p.omega_q = omega_q;
  p.omega_c = omega_c;
  return p;
}

void RunConfig::validate() const {
  ProbeSpec::parse(probe);
  if (!(g > 0.0) || !std::isfinite(g)) throw InvalidArgument("--g must be positive");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InvalidArgument("t_max must be positive");
  if (intervals == 0) throw InvalidArgument("intervals must be at least 1");
  if (!(refine_tolerance > 0.0)) throw InvalidArgument("refine tolerance must be positive");
  for (int v : n) {
    if (v < 1) throw InvalidArgument("qubit numbers must be >= 1");
  }
  for (double v : kappa) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("kappa/g values must be finite and >= 0");
  }
  for (double v : gamma) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("gamma/g values must be finite and >= 0");
  }
  qfi.validate();
  integrator.validate();
}

std::vector<double> parse_grid(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw InvalidArgument("grid must look like a:b:count, got '" + spec + "'");
  const double a = to_number(parts[0]);
  const double b = to_number(parts[1]);
  int count = 0;
  const char* end = parts[2].data() + parts[2].size();
  auto [p, ec] = std::from_chars(parts[2].data(), end, count);
  if (ec != std::errc() || p != end || count < 1) throw InvalidArgument("grid count must be a positive integer");
  if (count == 1) {
    if (a != b) throw InvalidArgument("a one-point grid needs a == b");
    return {a};
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (count - 1);
  out.back() = b;
  return out;
}

std::vector<double> parse_values(const std::string& spec) {
  if (spec.find(':') != std::string::npos) return parse_grid(spec);
  std::vector<double> out;
  for (const std::string& item : split(spec, ',')) {
    if (item.empty()) throw InvalidArgument("empty entry in list '" + spec + "'");
    out.push_back(to_number(item));
  }
  if (out.empty()) throw InvalidArgument("empty list");
  return out;
}

std::vector<int> parse_ints(const std::string& spec) {
  std::vector<int> out;
  for (const std::string& item : split(spec, ',')) {
    const auto dash = item.find('-', 1);
    auto parse_one = [&](const std::string& s) {
      int v = 0;
      const char* end = s.data() + s.size();
      auto [p, ec] = std::from_chars(s.data(), end, v);
      if (s.empty() || ec != std::errc() || p != end) throw InvalidArgument("not an integer: '" + s + "'");
      return v;
    };
    if (dash != std::string::npos) {
      // inclusive range "lo-hi"
      const int lo = parse_one(item.substr(0, dash));
      const int hi = parse_one(item.substr(dash + 1));
      if (hi < lo) throw InvalidArgument("empty range '" + item + "'");
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(parse_one(item));
    }
  }
  if (out.empty()) throw InvalidArgument("empty list");
  return out;
}

std::string rate_label(double value) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, 2);
  if (ec != std::errc()) throw InvalidArgument("cannot format rate");
  return std::string(buf, p);
}

void apply_config_json(const std::string& text, RunConfig& cfg) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(root, "config",
                 {"command", "probe", "system", "time_grid", "peak", "qfi", "integrator", "run"});

  if (root.contains("command")) cfg.command = get<std::string>(root["command"], "command");
  if (root.contains("probe")) cfg.probe = get<std::string>(root["probe"], "probe");

  if (root.contains("system")) {
    const json& s = root["system"];
    reject_unknown(s, "system", {"n", "excitations", "kappa", "gamma", "g", "omega_q", "omega_c"});
    if (s.contains("n")) cfg.n = int_values(s["n"], "system.n");
    if (s.contains("excitations")) cfg.excitations = int_values(s["excitations"], "system.excitations");
    if (s.contains("kappa")) cfg.kappa = rate_values(s["kappa"], "system.kappa");
    if (s.contains("gamma")) cfg.gamma = rate_values(s["gamma"], "system.gamma");
    if (s.contains("g")) cfg.g = get<double>(s["g"], "system.g");
    if (s.contains("omega_q")) cfg.omega_q = get<double>(s["omega_q"], "system.omega_q");
    if (s.contains("omega_c")) cfg.omega_c = get<double>(s["omega_c"], "system.omega_c");
  }
  if (root.contains("time_grid")) {
    const json& s = root["time_grid"];
    reject_unknown(s, "time_grid", {"t_max", "intervals"});
    if (s.contains("t_max")) cfg.t_max = get<double>(s["t_max"], "time_grid.t_max");
    if (s.contains("intervals")) cfg.intervals = get<std::size_t>(s["intervals"], "time_grid.intervals");
  }
  if (root.contains("peak")) {
    const json& s = root["peak"];
    reject_unknown(s, "peak", {"per_time", "refine", "tolerance"});
    if (s.contains("per_time")) cfg.per_time = get<bool>(s["per_time"], "peak.per_time");
    if (s.contains("refine")) cfg.refine = get<bool>(s["refine"], "peak.refine");
    if (s.contains("tolerance")) cfg.refine_tolerance = get<double>(s["tolerance"], "peak.tolerance");
  }
  if (root.contains("qfi")) {
    const json& s = root["qfi"];
    reject_unknown(s, "qfi", {"delta", "err_multiplier", "pair_floor"});
    if (s.contains("delta")) cfg.qfi.delta = get<double>(s["delta"], "qfi.delta");
    if (s.contains("err_multiplier")) cfg.qfi.err_multiplier = get<double>(s["err_multiplier"], "qfi.err_multiplier");
    if (s.contains("pair_floor")) cfg.qfi.pair_floor = get<double>(s["pair_floor"], "qfi.pair_floor");
  }
  if (root.contains("integrator")) {
    const json& s = root["integrator"];
    reject_unknown(s, "integrator", {"rtol", "atol", "first_step", "max_step", "max_steps"});
    if (s.contains("rtol")) cfg.integrator.rtol = get<double>(s["rtol"], "integrator.rtol");
    if (s.contains("atol")) cfg.integrator.atol = get<double>(s["atol"], "integrator.atol");
    if (s.contains("first_step")) cfg.integrator.first_step = get<double>(s["first_step"], "integrator.first_step");
    if (s.contains("max_step")) cfg.integrator.max_step = get<double>(s["max_step"], "integrator.max_step");
    if (s.contains("max_steps")) cfg.integrator.max_steps = get<std::size_t>(s["max_steps"], "integrator.max_steps");
  }
  if (root.contains("run")) {
    const json& s = root["run"];
    reject_unknown(s, "run", {"workers", "out", "cache_dir", "cache_limit_mb"});
    if (s.contains("workers")) cfg.workers = get<std::size_t>(s["workers"], "run.workers");
    if (s.contains("out")) cfg.out_dir = get<std::string>(s["out"], "run.out");
    if (s.contains("cache_dir")) cfg.cache_dir = get<std::string>(s["cache_dir"], "run.cache_dir");
    if (s.contains("cache_limit_mb")) cfg.cache_limit_mb = get<std::uint64_t>(s["cache_limit_mb"], "run.cache_limit_mb");
  }
}

void load_config(const std::filesystem::path& path, RunConfig& cfg) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  apply_config_json(ss.str(), cfg);
}

std::string config_to_json(const RunConfig& cfg) {
  ojson j;
  j["command"] = cfg.command;
  j["probe"] = cfg.probe;
  j["system"] = {{"n", cfg.n},          {"excitations", cfg.excitations}, {"kappa", cfg.kappa},
                 {"gamma", cfg.gamma},  {"g", cfg.g},                     {"omega_q", cfg.omega_q},
                 {"omega_c", cfg.omega_c}};
  j["time_grid"] = {{"t_max", cfg.t_max}, {"intervals", cfg.intervals}};
  j["peak"] = {{"per_time", cfg.per_time}, {"refine", cfg.refine}, {"tolerance", cfg.refine_tolerance}};
  j["qfi"] = {{"delta", cfg.qfi.delta}, {"err_multiplier", cfg.qfi.err_multiplier}, {"pair_floor", cfg.qfi.pair_floor}};
  ojson integ = {{"rtol", cfg.integrator.rtol},
                 {"atol", cfg.integrator.atol},
                 {"first_step", cfg.integrator.first_step},
                 {"max_steps", cfg.integrator.max_steps}};
  if (std::isfinite(cfg.integrator.max_step)) integ["max_step"] = cfg.integrator.max_step;
  j["integrator"] = integ;
  j["run"] = {{"workers", cfg.workers},
              {"out", cfg.out_dir.string()},
              {"cache_dir", cfg.cache_dir.string()},
              {"cache_limit_mb", cfg.cache_limit_mb}};
  return j.dump(2);
}

}  // namespace permqfi::cli
