#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "hedgeff/metrics.hpp"
#include "hedgeff/models.hpp"
#include "hedgeff/schemes.hpp"

namespace hedgeff {

/// Sample mean with its standard error.
struct Estimate {
  real mean = 0.0;
  real std_error = 0.0;
  std::size_t count = 0;
};

/// Welford accumulator with Chan's pairwise merge.
class RunningStats {
 public:
  void add(real value) noexcept;
  void merge(const RunningStats& other) noexcept;

  std::size_t count() const noexcept { return count_; }
  real mean() const noexcept { return mean_; }
  /// Unbiased sample variance; 0 for fewer than two values.
  real variance() const noexcept;
  Estimate estimate() const noexcept;

 private:
  std::size_t count_ = 0;
  real mean_ = 0.0;
  real m2_ = 0.0;
};

enum class BoundKind { Unbiased, Biased };

/// A model constant with its Monte Carlo standard error (0 when exact).
struct Bound {
  real value = 0.0;
  real std_error = 0.0;
};

/// E[C]^{2/(2-beta)} E[<Z>] for one scheme, against its lower bound.
struct EfficiencyProduct {
  SchemeSpec scheme;
  std::size_t n_paths = 0;
  real beta = 0.0;
  Estimate cost;
  Estimate qv;
  real product = 0.0;
  real product_std_error = 0.0;
  Bound bound;
  real ratio = 0.0;
};

/// Thrown by the Monte Carlo drivers when RunOptions::cancel is raised.
class Cancelled : public std::runtime_error {
 public:
  Cancelled() : std::runtime_error("run cancelled") {}
};

struct RunOptions {
  /// Worker threads; 0 means one per hardware thread.
  unsigned threads = 0;
  /// Paths per work unit. Results never depend on this or on `threads`.
  std::size_t block_size = 64;
  const std::atomic<bool>* cancel = nullptr;
  /// When set, receives one ErrorReport per scheme per path ([scheme][path]).
  std::vector<std::vector<ErrorReport>>* per_path = nullptr;
};

/// E[(S^{2/(4-beta)} K) . <X>_T]: exact (= T) for Brownian models with unit
/// S, otherwise by auxiliary Monte Carlo over `aux_paths` paths.
Bound inner_expectation(const ModelSpec& model, real beta, std::uint64_t seed = 0,
                        std::size_t aux_paths = 10000);

/// Lower bound of E[C]^{2/(2-beta)} E[<Z>]:
/// (1/6) inner^{(4-beta)/(2-beta)} for unbiased schemes, one third of that
/// for arbitrary schemes when beta is in (1, 2).
Bound theoretical_bound(const ModelSpec& model, real beta, BoundKind kind,
                        std::uint64_t seed = 0, std::size_t aux_paths = 10000);

/// Small-eps asymptotics of the unbiased hitting scheme, already scaled by eps:
/// E[C] ~ eps^{beta-2} E[(S Shat^{beta-2}) . <Y>] and
/// E[<Z>] ~ eps^2 (1/6) E[Shat^2 . <Y>].
struct SchemeLimits {
  real cost = 0.0;
  real qv = 0.0;
  real cost_std_error = 0.0;
  real qv_std_error = 0.0;
};
SchemeLimits scheme_limits(const ModelSpec& model, real eps, ShatMode shat, real beta,
                           std::uint64_t seed = 0, std::size_t aux_paths = 10000);

/// Runs every scheme on the same n_paths paths (paired seeds) in one pass.
std::vector<EfficiencyProduct> run_paired(const ModelSpec& model,
                                          std::span<const SchemeSpec> schemes, real beta,
                                          std::size_t n_paths, std::uint64_t seed,
                                          const RunOptions& options = {});

EfficiencyProduct run_experiment(const ModelSpec& model, const SchemeSpec& scheme, real beta,
                                 std::size_t n_paths, std::uint64_t seed,
                                 const RunOptions& options = {});

/// One experiment per value of eps (hitting schemes) or n (equidistant).
/// Point 0 uses `seed`; later points use fresh seeds derived from it.
std::vector<EfficiencyProduct> sweep(const ModelSpec& model, const SchemeSpec& base, real beta,
                                     std::size_t n_paths, std::uint64_t seed,
                                     std::span<const real> values, const RunOptions& options = {});

/// The scheme with its eps (or n) replaced by `value`.
SchemeSpec with_scale(const SchemeSpec& scheme, real value);
/// eps for hitting schemes, n for equidistant.
real scale_of(const SchemeSpec& scheme);

/// Statistics of completed barrier exits of the biased hitting scheme
/// (gamma = 0 gives the symmetric scheme).
struct ExitStatistics {
  std::size_t n_exits = 0;
  std::size_t n_upper = 0;
  Estimate increment;  // E[dX]
  Estimate m2;         // E[dX^2]
  Estimate m3;         // E[dX^3]

  real upper_fraction() const noexcept {
    return n_exits == 0 ? 0.0 : static_cast<real>(n_upper) / static_cast<real>(n_exits);
  }
};
ExitStatistics exit_statistics(const ModelSpec& model, const HittingBiased& scheme,
                               std::size_t n_paths, std::uint64_t seed,
                               const RunOptions& options = {});

/// CSV with header
/// scheme,beta,eps_or_n,gamma,n_paths,cost_mean,cost_stderr,qv_mean,qv_stderr,product,bound,ratio
void write_experiment_csv(std::ostream& out, std::span<const EfficiencyProduct> rows);

}  // namespace hedgeff
