#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "hedgeff/models.hpp"
#include "hedgeff/montecarlo.hpp"

// Exponential-utility scaling limit: with risk aversion alpha and cost
// coefficient kappa tied by alpha^{(6-2b)/(2-b)} kappa^{2/(2-b)} = mu, the
// certainty-equivalent loss converges to C + V/2, minimized by hitting
// schemes with eps = nu / alpha.

namespace hedgeff {

struct UtilityParams {
  real mu = 1.0;
  real beta = 0.0;
  real alpha = 1.0;
  /// Barrier asymmetry of the biased scheme (beta in (1, 2) only).
  real gamma = 0.0;
};

void validate(const UtilityParams& params);

/// kappa = mu^{(2-beta)/2} alpha^{-(3-beta)}.
real kappa(const UtilityParams& params);

/// min_{x>0} { x + (mu / (2c)) x^{-2/(2-beta)} } in closed form, where c is
/// the efficiency bound constant (6 unbiased, 18 biased). No range checks.
real minimized_loss_constant(real mu, real beta, real bound_constant);

/// Loss constant for beta in [0, 1] (bound constant 6).
real mu_hat(real mu, real beta);
/// Loss constant for beta in (1, 2) (bound constant 18), the |gamma| -> inf limit.
real mu_check(real mu, real beta);
/// Loss constant reached by the biased scheme at finite gamma:
/// q^{(2-b)/(4-b)} + (mu/12) q^{-2/(4-b)} F(|gamma|, b), q = mu/(18(2-b)).
real mu_check_finite(real mu, real beta, real gamma);

/// Optimal barrier scale, eps = nu / alpha.
real nu(real mu, real beta);
real nu_check(real mu, real beta, real gamma);

struct UtilityRow {
  real beta = 0.0;
  real mu = 0.0;
  real alpha = 0.0;
  real gamma = 0.0;
  real eps = 0.0;
  /// alpha kappa E[C] + (alpha^2 / 2) E[<Z>].
  real surrogate = 0.0;
  real surrogate_std_error = 0.0;
  real target = 0.0;
  real ratio = 0.0;
  /// 1 - mean(exp(alpha (Z + kappa C))); empty when the exponent overflows.
  std::optional<real> utility_estimate;
};

struct UtilityReport {
  std::vector<UtilityRow> rows;
  /// E[S^{2/(4-beta)} . <Y>_T].
  real inner = 0.0;
  /// mu_hat or mu_check (|gamma| -> inf) times inner.
  real limit_target = 0.0;
  /// 1 - E[exp{limit_target}], with the exponent sign as printed in the
  /// source derivation (see README).
  real utility_limit_as_printed = 0.0;
  bool utility_overflow = false;
};

/// Runs the efficient scheme at eps = m * nu / alpha for each multiplier m,
/// all on the same paths. Brownian-family models only.
UtilityReport scaled_utility_experiment(const ModelSpec& model, const UtilityParams& params,
                                        std::size_t n_paths, std::uint64_t seed,
                                        std::span<const real> eps_multipliers,
                                        const RunOptions& options = {});

/// CSV with header beta,mu,alpha,gamma,eps,surrogate,target,ratio,utility_estimate.
void write_utility_csv(std::ostream& out, const UtilityReport& report);

}  // namespace hedgeff
