#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hedgeff/models.hpp"
#include "hedgeff/schemes.hpp"
#include "hedgeff/utility.hpp"

namespace hedgeff {

enum class Command { Moments, Simulate, Sweep, Utility };

std::string_view command_name(Command c);

/// A configuration problem attributable to one key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

using KeyValues = std::map<std::string, std::string>;

/// Every accepted key with its default ("" for no default).
const std::vector<std::pair<std::string, std::string>>& config_keys();

/// Plain-text format: one `key = value` per line, '#' starts a comment.
KeyValues parse_key_values(std::string_view text);
/// JSON alternative: a flat object of scalars.
KeyValues parse_json_config(std::string_view text);
/// Reads either format (JSON when the first non-blank character is '{').
KeyValues load_config_file(const std::string& path);

struct ExperimentConfig {
  Command command = Command::Simulate;
  ModelSpec model;
  SchemeSpec scheme;
  real beta = 0.0;
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;

  std::string output;
  std::string per_path_output;
  std::string path_dump;
  std::string schedule_dump;

  std::vector<real> sweep_values;

  UtilityParams utility;
  std::vector<real> eps_multipliers;

  real x_min = -5.0;
  real x_max = 5.0;
  real x_step = 0.1;
  real ks_alpha = 2.0 / 3.0;

  /// Full effective configuration (defaults, then file, then flags).
  KeyValues effective;
};

/// Merges defaults, file values and flag values (flags win), rejects unknown
/// keys and validates every module precondition. Throws ConfigError.
ExperimentConfig parse_config(const KeyValues& file, const KeyValues& flags);

}  // namespace hedgeff
