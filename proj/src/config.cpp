#include "hedgeff/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hedgeff {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

bool known_key(const std::string& key) {
  const auto& keys = config_keys();
  return std::any_of(keys.begin(), keys.end(), [&](const auto& kv) { return kv.first == key; });
}

class Reader {
 public:
  explicit Reader(const KeyValues& values) : values_(values) {}

  const std::string& text(const std::string& key) const { return values_.at(key); }

  real number(const std::string& key) const {
    const std::string& s = text(key);
    real v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw ConfigError(key, "not a finite number: '" + s + "'");
    }
    return v;
  }

  std::uint64_t integer(const std::string& key) const {
    const std::string& s = text(key);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw ConfigError(key, "not a non-negative integer: '" + s + "'");
    }
    return v;
  }

  std::vector<real> list(const std::string& key) const {
    std::vector<real> out;
    std::stringstream ss(text(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      real v = 0.0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc{} || ptr != item.data() + item.size() || !std::isfinite(v)) {
        throw ConfigError(key, "not a list of numbers: '" + text(key) + "'");
      }
      out.push_back(v);
    }
    return out;
  }

 private:
  const KeyValues& values_;
};

// Re-labels a module validation error ("key: message") as a ConfigError.
template <class F>
void checked(F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    const auto colon = what.find(':');
    const std::string key = colon == std::string::npos ? "config" : what.substr(0, colon);
    const std::string msg = colon == std::string::npos ? what : trim(what.substr(colon + 1));
    throw ConfigError(key, msg);
  }
}

}  // namespace

std::string_view command_name(Command c) {
  switch (c) {
    case Command::Moments:
      return "moments";
    case Command::Simulate:
      return "simulate";
    case Command::Sweep:
      return "sweep";
    case Command::Utility:
      return "utility";
  }
  return "simulate";
}

const std::vector<std::pair<std::string, std::string>>& config_keys() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"command", ""},
      // model
      {"model", "bm"},
      {"drift", "0"},
      {"spot", "1"},
      {"strike", "1"},
      {"vol", "0.2"},
      {"rate", "0"},
      {"maturity", "2"},
      {"s_mode", "unit"},
      {"T", "1"},
      {"dt", "0.0001"},
      {"k_cap", "1e8"},
      // scheme
      {"scheme", "hitting"},
      {"n", "100"},
      {"eps", "0.05"},
      {"shat", "const"},
      {"shat_c", "1"},
      {"gamma", "0"},
      // run
      {"beta", "0"},
      {"n_paths", "10000"},
      {"seed", "1"},
      {"threads", "0"},
      {"output", ""},
      {"per_path_output", ""},
      {"path_dump", ""},
      {"schedule_dump", ""},
      {"sweep", ""},
      // utility
      {"mu", "12"},
      {"alpha", "50"},
      {"eps_multipliers", "1,0.5,2"},
      // moments
      {"x_min", "-5"},
      {"x_max", "5"},
      {"x_step", "0.1"},
      {"ks_alpha", "0.6666666666666666"},
  };
  return keys;
}

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config", "line " + std::to_string(line_no) + " is not key = value");
    }
    out[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
  }
  return out;
}

KeyValues parse_json_config(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config", "JSON config must be an object");
  KeyValues out;
  for (const auto& [key, value] : j.items()) {
    if (value.is_string()) {
      out[key] = value.get<std::string>();
    } else if (value.is_number_integer() || value.is_number_unsigned()) {
      out[key] = value.dump();
    } else if (value.is_number_float()) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", value.get<double>());
      out[key] = buf;
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& item : value) {
        if (!item.is_number()) throw ConfigError(key, "list items must be numbers");
        if (!joined.empty()) joined += ',';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", item.get<double>());
        joined += buf;
      }
      out[key] = joined;
    } else {
      throw ConfigError(key, "unsupported JSON value");
    }
  }
  return out;
}

KeyValues load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_json_config(text);
  return parse_key_values(text);
}

ExperimentConfig parse_config(const KeyValues& file, const KeyValues& flags) {
  KeyValues merged;
  for (const auto& [key, def] : config_keys()) merged[key] = def;
  for (const auto* source : {&file, &flags}) {
    for (const auto& [key, value] : *source) {
      if (!known_key(key)) throw ConfigError(key, "unknown key");
      merged[key] = value;
    }
  }
  const Reader r(merged);
  ExperimentConfig cfg;

  const std::string& command = r.text("command");
  if (command == "moments") {
    cfg.command = Command::Moments;
  } else if (command == "simulate") {
    cfg.command = Command::Simulate;
  } else if (command == "sweep") {
    cfg.command = Command::Sweep;
  } else if (command == "utility") {
    cfg.command = Command::Utility;
  } else if (command.empty()) {
    throw ConfigError("command", "missing required field");
  } else {
    throw ConfigError("command", "unknown command '" + command + "'");
  }

  cfg.beta = r.number("beta");
  if (!(cfg.beta >= 0.0 && cfg.beta < 2.0)) throw ConfigError("beta", "must lie in [0, 2)");
  cfg.seed = r.integer("seed");
  cfg.threads = static_cast<unsigned>(r.integer("threads"));
  cfg.output = r.text("output");
  cfg.per_path_output = r.text("per_path_output");
  cfg.path_dump = r.text("path_dump");
  cfg.schedule_dump = r.text("schedule_dump");

  if (cfg.command == Command::Moments) {
    cfg.x_min = r.number("x_min");
    cfg.x_max = r.number("x_max");
    cfg.x_step = r.number("x_step");
    cfg.ks_alpha = r.number("ks_alpha");
    if (!(cfg.x_step > 0.0)) throw ConfigError("x_step", "must be positive");
    if (!(cfg.x_max >= cfg.x_min)) throw ConfigError("x_max", "must not be below x_min");
    if ((cfg.x_max - cfg.x_min) / cfg.x_step > 1e7) throw ConfigError("x_step", "grid too large");
    if (!(cfg.ks_alpha > 0.0 && cfg.ks_alpha <= 1.0)) {
      throw ConfigError("ks_alpha", "must lie in (0, 1]");
    }
    cfg.effective = merged;
    return cfg;
  }

  // model
  const std::string& model = r.text("model");
  if (model == "bm") {
    cfg.model.kind = BrownianMartingale{};
  } else if (model == "drifted") {
    cfg.model.kind = DriftedBrownian{r.number("drift")};
  } else if (model == "bs") {
    cfg.model.kind = BlackScholesDelta{r.number("spot"), r.number("strike"), r.number("vol"),
                                       r.number("rate"), r.number("maturity")};
  } else {
    throw ConfigError("model", "unknown model '" + model + "' (bm, drifted, bs)");
  }
  const std::string& s_mode = r.text("s_mode");
  if (s_mode == "unit") {
    cfg.model.s_mode = CostWeight::Unit;
  } else if (s_mode == "linear") {
    cfg.model.s_mode = CostWeight::LinearCost;
  } else {
    throw ConfigError("s_mode", "unknown cost weight '" + s_mode + "' (unit, linear)");
  }
  cfg.model.horizon = r.number("T");
  cfg.model.dt = r.number("dt");
  cfg.model.k_cap = r.number("k_cap");
  checked([&] { validate(cfg.model); });

  cfg.n_paths = r.integer("n_paths");
  if (cfg.n_paths < 2) throw ConfigError("n_paths", "need at least 2 paths");

  // scheme
  const std::string& scheme = r.text("scheme");
  if (scheme == "equidistant") {
    cfg.scheme = Equidistant{r.integer("n")};
  } else if (scheme == "hitting") {
    const std::string& shat = r.text("shat");
    ShatMode mode;
    if (shat == "const") {
      mode = ShatMode::constant(r.number("shat_c"));
    } else if (shat == "power_s") {
      mode = ShatMode::power_s(cfg.beta);
    } else if (shat == "power_k") {
      mode = ShatMode::power_k();
    } else {
      throw ConfigError("shat", "unknown mode '" + shat + "' (const, power_s, power_k)");
    }
    cfg.scheme = HittingUnbiased{r.number("eps"), mode};
  } else if (scheme == "biased") {
    cfg.scheme = HittingBiased{r.number("eps"), r.number("gamma"), cfg.beta};
  } else {
    throw ConfigError("scheme", "unknown scheme '" + scheme + "' (equidistant, hitting, biased)");
  }
  checked([&] { validate(cfg.scheme); });
  if (const auto* e = std::get_if<Equidistant>(&cfg.scheme); e && e->n > cfg.model.grid_size() - 1) {
    throw ConfigError("n", "exceeds the grid resolution");
  }

  if (cfg.command == Command::Sweep) {
    cfg.sweep_values = r.list("sweep");
    if (cfg.sweep_values.empty()) throw ConfigError("sweep", "missing required field");
    checked([&] {
      for (const real v : cfg.sweep_values) {
        const SchemeSpec point = with_scale(cfg.scheme, v);
        validate(point);
        if (const auto* e = std::get_if<Equidistant>(&point); e && e->n > cfg.model.grid_size() - 1) {
          throw std::invalid_argument("sweep: n exceeds the grid resolution");
        }
      }
    });
  }

  if (cfg.command == Command::Utility) {
    cfg.utility = UtilityParams{r.number("mu"), cfg.beta, r.number("alpha"), r.number("gamma")};
    checked([&] { validate(cfg.utility); });
    if (!cfg.model.is_brownian_family()) {
      throw ConfigError("model", "the utility command needs model bm or drifted");
    }
    cfg.eps_multipliers = r.list("eps_multipliers");
    if (cfg.eps_multipliers.empty()) throw ConfigError("eps_multipliers", "missing required field");
    for (const real m : cfg.eps_multipliers) {
      if (!(m > 0.0)) throw ConfigError("eps_multipliers", "must be positive");
    }
  }

  cfg.effective = merged;
  return cfg;
}

}  // namespace hedgeff
