#include "hedgeff/utility.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "hedgeff/csv.hpp"
#include "hedgeff/moments.hpp"

namespace hedgeff {

namespace {

void require_mu(real mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu: must be positive");
}

bool biased_regime(real beta) { return beta > 1.0; }

}  // namespace

void validate(const UtilityParams& params) {
  require_mu(params.mu);
  if (!(params.beta >= 0.0 && params.beta < 2.0)) {
    throw std::invalid_argument("beta: must lie in [0, 2)");
  }
  if (!(params.alpha > 0.0) || !std::isfinite(params.alpha)) {
    throw std::invalid_argument("alpha: must be positive");
  }
  if (!std::isfinite(params.gamma)) throw std::invalid_argument("gamma: must be finite");
}

real kappa(const UtilityParams& params) {
  validate(params);
  return std::pow(params.mu, (2.0 - params.beta) / 2.0) *
         std::pow(params.alpha, -(3.0 - params.beta));
}

real minimized_loss_constant(real mu, real beta, real bound_constant) {
  const real q = std::abs(mu / (bound_constant * (2.0 - beta)));
  return std::pow(q, (2.0 - beta) / (4.0 - beta)) +
         mu / (2.0 * bound_constant) * std::pow(q, -2.0 / (4.0 - beta));
}

real mu_hat(real mu, real beta) {
  require_mu(mu);
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("beta: mu_hat needs beta in [0, 1]");
  return minimized_loss_constant(mu, beta, 6.0);
}

real mu_check(real mu, real beta) {
  require_mu(mu);
  if (!(beta > 1.0 && beta < 2.0)) throw std::invalid_argument("beta: mu_check needs beta in (1, 2)");
  return minimized_loss_constant(mu, beta, 18.0);
}

real mu_check_finite(real mu, real beta, real gamma) {
  require_mu(mu);
  if (!(beta > 1.0 && beta < 2.0)) throw std::invalid_argument("beta: needs beta in (1, 2)");
  const real q = mu / (18.0 * (2.0 - beta));
  return std::pow(q, (2.0 - beta) / (4.0 - beta)) +
         mu / 12.0 * std::pow(q, -2.0 / (4.0 - beta)) * efficiency_factor(std::abs(gamma), beta);
}

real nu(real mu, real beta) {
  require_mu(mu);
  if (!(beta >= 0.0 && beta < 2.0)) throw std::invalid_argument("beta: must lie in [0, 2)");
  return std::sqrt(mu) * std::pow(std::abs(mu / (6.0 * (2.0 - beta))), -1.0 / (4.0 - beta));
}

real nu_check(real mu, real beta, real gamma) {
  require_mu(mu);
  if (!(beta > 1.0 && beta < 2.0)) throw std::invalid_argument("beta: nu_check needs beta in (1, 2)");
  const real cosh_ratio = std::exp(detail::log_cosh((beta - 1.0) * gamma) - detail::log_cosh(gamma));
  return std::sqrt(mu) * std::pow(std::abs(mu / (18.0 * (2.0 - beta))), -1.0 / (4.0 - beta)) *
         std::pow(cosh_ratio, 1.0 / (2.0 - beta));
}

UtilityReport scaled_utility_experiment(const ModelSpec& model, const UtilityParams& params,
                                        std::size_t n_paths, std::uint64_t seed,
                                        std::span<const real> eps_multipliers,
                                        const RunOptions& options) {
  validate(params);
  validate(model);
  if (!model.is_brownian_family()) {
    throw std::invalid_argument("model: the utility experiment needs a Brownian-family model");
  }
  if (eps_multipliers.empty()) throw std::invalid_argument("eps_multipliers: empty");

  const real beta = params.beta;
  const bool biased = biased_regime(beta);
  const real base_eps = (biased ? nu_check(params.mu, beta, params.gamma) : nu(params.mu, beta)) /
                        params.alpha;
  std::vector<SchemeSpec> schemes;
  for (const real m : eps_multipliers) {
    if (!(m > 0.0)) throw std::invalid_argument("eps_multipliers: must be positive");
    const real eps = m * base_eps;
    if (biased) {
      schemes.emplace_back(HittingBiased{eps, params.gamma, beta});
    } else {
      schemes.emplace_back(HittingUnbiased{eps, ShatMode::power_s(beta)});
    }
  }

  std::vector<std::vector<ErrorReport>> per_path;
  RunOptions run_options = options;
  run_options.per_path = &per_path;
  const auto products = run_paired(model, schemes, beta, n_paths, seed, run_options);

  UtilityReport report;
  report.inner = inner_expectation(model, beta, seed).value;
  const real constant = biased ? mu_check_finite(params.mu, beta, params.gamma)
                               : mu_hat(params.mu, beta);
  report.limit_target = (biased ? mu_check(params.mu, beta) : constant) * report.inner;
  report.utility_limit_as_printed = 1.0 - std::exp(report.limit_target);

  const real k = kappa(params);
  const real a = params.alpha;
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    UtilityRow row;
    row.beta = beta;
    row.mu = params.mu;
    row.alpha = a;
    row.gamma = biased ? params.gamma : 0.0;
    row.eps = scale_of(schemes[s]);
    RunningStats surrogate;
    RunningStats exp_utility;
    bool overflow = false;
    for (const auto& r : per_path[s]) {
      surrogate.add(a * k * r.cost + 0.5 * a * a * r.qv_z);
      const real exponent = a * (r.z_terminal + k * r.cost);
      if (exponent > 700.0) overflow = true;
      exp_utility.add(std::exp(std::min(exponent, 700.0)));
    }
    row.surrogate = a * k * products[s].cost.mean + 0.5 * a * a * products[s].qv.mean;
    row.surrogate_std_error = surrogate.estimate().std_error;
    row.target = constant * report.inner;
    row.ratio = row.surrogate / row.target;
    if (!overflow) {
      row.utility_estimate = 1.0 - exp_utility.mean();
    } else {
      report.utility_overflow = true;
    }
    report.rows.push_back(row);
  }
  return report;
}

void write_utility_csv(std::ostream& out, const UtilityReport& report) {
  CsvWriter csv(out, {"beta", "mu", "alpha", "gamma", "eps", "surrogate", "target", "ratio",
                      "utility_estimate"});
  for (const auto& r : report.rows) {
    csv.row(r.beta, r.mu, r.alpha, r.gamma, r.eps, r.surrogate, r.target, r.ratio,
            r.utility_estimate);
  }
}

}  // namespace hedgeff
