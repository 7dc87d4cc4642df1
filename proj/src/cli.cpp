#include "hedgeff/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "hedgeff/csv.hpp"
#include "hedgeff/metrics.hpp"
#include "hedgeff/moments.hpp"
#include "hedgeff/montecarlo.hpp"
#include "hedgeff/schemes.hpp"
#include "hedgeff/utility.hpp"

namespace hedgeff {

namespace fs = std::filesystem;

std::atomic<bool>& interrupt_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

namespace {

struct Rendered {
  std::string body;
  std::vector<std::string> notes;
};

RunOptions run_options(const ExperimentConfig& cfg) {
  RunOptions o;
  o.threads = cfg.threads;
  o.cancel = &interrupt_flag();
  return o;
}

// Writes through `<path>.partial` and renames on success.
void write_atomically(const std::string& path, const std::function<void(std::ostream&)>& fill) {
  const std::string partial = path + ".partial";
  try {
    {
      std::ofstream out(partial, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot open '" + partial + "' for writing");
      fill(out);
      out.flush();
      if (!out) throw std::runtime_error("write to '" + partial + "' failed");
    }
    fs::rename(partial, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(partial, ec);
    throw;
  }
}

std::string render_moments(const ExperimentConfig& cfg) {
  std::ostringstream out;
  CsvWriter csv(out, {"x", "beta", "ks_alpha", "m3", "m4", "pearson_gap", "fukasawa_gap",
                      "ks1_margin", "ks20_margin", "bernoulli_ratio", "g", "efficiency_factor"});
  const auto steps = static_cast<long long>(std::floor((cfg.x_max - cfg.x_min) / cfg.x_step + 1e-9));
  for (long long i = 0; i <= steps; ++i) {
    const real x = cfg.x_min + static_cast<real>(i) * cfg.x_step;
    const auto m = exact_moments(bernoulli_distribution(x), cfg.beta);
    const std::optional<real> ks1 = cfg.beta < 1.0 ? std::optional<real>(ks1_margin(m)) : std::nullopt;
    csv.row(x, cfg.beta, cfg.ks_alpha, m.m3, m.m4, pearson_gap(m), fukasawa_gap(m), ks1,
            ks20_margin(m, cfg.ks_alpha), bernoulli_ratio(x, cfg.ks_alpha, cfg.beta), g(x, cfg.beta),
            efficiency_factor(x, cfg.beta));
  }
  return out.str();
}

void warn_resolution(const ExperimentConfig& cfg, const SchemeSpec& scheme, std::ostream& log) {
  if (std::holds_alternative<Equidistant>(scheme)) return;
  const PathGrid probe = simulate(cfg.model, StreamId{cfg.seed, 0});
  const real barrier = smallest_barrier(probe, scheme);
  if (!barrier_resolved(barrier, cfg.model.step())) {
    log << "warning: smallest barrier " << barrier << " is not resolved by dt = " << cfg.model.step()
        << " (want barrier^2 >= 25 dt); grid overshoot will bias the results\n";
  }
}

void warn_biased_beta(const SchemeSpec& scheme, real beta, std::ostream& log) {
  if (std::holds_alternative<HittingBiased>(scheme) && !(beta > 1.0 && beta < 2.0)) {
    log << "warning: the biased scheme is meant for beta in (1, 2); got beta = " << beta << "\n";
  }
}

Rendered render(const ExperimentConfig& cfg, std::ostream& log) {
  Rendered r;
  std::ostringstream out;
  if (cfg.command != Command::Moments && cfg.n_paths < 100) {
    log << "warning: n_paths = " << cfg.n_paths << " is below 100; standard errors are unreliable\n";
  }
  switch (cfg.command) {
    case Command::Moments:
      r.body = render_moments(cfg);
      return r;
    case Command::Simulate: {
      warn_resolution(cfg, cfg.scheme, log);
      warn_biased_beta(cfg.scheme, cfg.beta, log);
      std::vector<std::vector<ErrorReport>> per_path;
      RunOptions options = run_options(cfg);
      if (!cfg.per_path_output.empty()) options.per_path = &per_path;
      const auto result = run_experiment(cfg.model, cfg.scheme, cfg.beta, cfg.n_paths, cfg.seed, options);
      write_experiment_csv(out, std::span<const EfficiencyProduct>(&result, 1));
      if (!cfg.per_path_output.empty()) {
        write_atomically(cfg.per_path_output,
                         [&](std::ostream& o) { write_report_csv(o, per_path.front()); });
      }
      if (!cfg.path_dump.empty() || !cfg.schedule_dump.empty()) {
        const PathGrid path = simulate(cfg.model, StreamId{cfg.seed, 0});
        if (path.k_capped) r.notes.push_back("path 0: K reached k_cap");
        if (!cfg.path_dump.empty()) {
          write_atomically(cfg.path_dump, [&](std::ostream& o) { write_path_csv(o, path); });
        }
        if (!cfg.schedule_dump.empty()) {
          const RebalanceSchedule sched = build_schedule(path, cfg.scheme);
          write_atomically(cfg.schedule_dump,
                           [&](std::ostream& o) { write_schedule_csv(o, path, sched); });
        }
      }
      break;
    }
    case Command::Sweep: {
      warn_biased_beta(cfg.scheme, cfg.beta, log);
      for (const real v : cfg.sweep_values) warn_resolution(cfg, with_scale(cfg.scheme, v), log);
      const auto rows =
          sweep(cfg.model, cfg.scheme, cfg.beta, cfg.n_paths, cfg.seed, cfg.sweep_values, run_options(cfg));
      write_experiment_csv(out, rows);
      break;
    }
    case Command::Utility: {
      const auto report = scaled_utility_experiment(cfg.model, cfg.utility, cfg.n_paths, cfg.seed,
                                                    cfg.eps_multipliers, run_options(cfg));
      write_utility_csv(out, report);
      r.notes.push_back("limit_target=" + format_real(report.limit_target, "limit_target"));
      r.notes.push_back("utility_limit_as_printed=" +
                        format_real(report.utility_limit_as_printed, "utility_limit_as_printed"));
      if (report.utility_overflow) {
        r.notes.push_back("utility_overflow=1 (exponential utility omitted; surrogate only)");
        log << "warning: exp overflow in the utility estimate; reporting the surrogate only\n";
      }
      break;
    }
  }
  r.body = out.str();
  return r;
}

}  // namespace

std::string resolve_output_path(const ExperimentConfig& config) {
  fs::path p = config.output.empty() ? fs::path(std::string(command_name(config.command)) + ".csv")
                                     : fs::path(config.output);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
      p = fs::path(dir) / p;
    }
  }
  return p.string();
}

std::string render_body(const ExperimentConfig& config, std::ostream& log) {
  return render(config, log).body;
}

int dispatch(const ExperimentConfig& config, std::ostream& log) {
  const std::string path = resolve_output_path(config);
  try {
    const auto start = std::chrono::steady_clock::now();
    const Rendered r = render(config, log);
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
    write_atomically(path, [&](std::ostream& out) {
      out << "# hedgeff " << kVersion << '\n';
      for (const auto& [key, value] : config.effective) out << "# " << key << '=' << value << '\n';
      for (const auto& note : r.notes) out << "# " << note << '\n';
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3f", wall.count());
      out << "# wall_time_s=" << buf << '\n';
      out << r.body;
    });
    log << "wrote " << path << '\n';
    return 0;
  } catch (const Cancelled&) {
    log << "error: interrupted; no output written\n";
    return 1;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discretization error and transaction cost of hitting-time hedging schemes"};
  app.set_version_flag("--version", std::string(kVersion));
  std::string config_path;
  app.add_option("--config", config_path, "Config file (key = value lines, or JSON)");

  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  for (const auto& [key, def] : config_keys()) {
    if (key == "command") continue;
    std::string help = def.empty() ? std::string() : "default " + def;
    options[key] = app.add_option("--" + key, values[key], help);
  }
  std::vector<CLI::App*> subcommands;
  for (const char* name : {"moments", "simulate", "sweep", "utility"}) {
    auto* sub = app.add_subcommand(name);
    sub->fallthrough();
    subcommands.push_back(sub);
  }
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }

  KeyValues flags;
  for (const auto& [key, opt] : options) {
    if (opt->count() > 0) flags[key] = values[key];
  }
  for (const auto* sub : subcommands) {
    if (sub->parsed()) flags["command"] = sub->get_name();
  }

  ExperimentConfig config;
  try {
    const KeyValues file = config_path.empty() ? KeyValues{} : load_config_file(config_path);
    config = parse_config(file, flags);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  }
  return dispatch(config, err);
}

}  // namespace hedgeff
