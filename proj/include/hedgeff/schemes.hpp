#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "hedgeff/models.hpp"
#include "hedgeff/types.hpp"

namespace hedgeff {

/// Local barrier scale Shat used by the unbiased hitting scheme.
struct ShatMode {
  enum class Kind { Const, PowerS, PowerK };
  Kind kind = Kind::Const;
  /// Const: the constant. PowerS: the cost exponent beta (Shat = S^{1/(4-beta)}).
  real param = 1.0;

  static ShatMode constant(real c) { return {Kind::Const, c}; }
  static ShatMode power_s(real beta) { return {Kind::PowerS, beta}; }
  /// Shat = K^{-1/4}.
  static ShatMode power_k() { return {Kind::PowerK, 0.0}; }

  real operator()(const Sample& s) const;
};

/// Rebalance at t = jT/n, j = 0..n-1 (snapped to the nearest grid index).
struct Equidistant {
  std::size_t n = 1;
};

/// Rebalance when |X - X_last| reaches eps * Shat(last stop); hold X_last.
struct HittingUnbiased {
  real eps = 0.1;
  ShatMode shat{};
};

/// Asymmetric barriers eps e^{+gamma} S^{1/(4-beta)} above and
/// eps e^{-gamma} S^{1/(4-beta)} below; the held position is shifted by
/// (2/3) eps sinh(gamma) S^{1/(4-beta)}.
struct HittingBiased {
  real eps = 0.1;
  real gamma = 0.0;
  real beta = 1.5;
};

using SchemeSpec = std::variant<Equidistant, HittingUnbiased, HittingBiased>;

/// Throws std::invalid_argument naming the offending field.
void validate(const SchemeSpec& scheme);
std::string scheme_name(const SchemeSpec& scheme);
bool is_unbiased(const SchemeSpec& scheme) noexcept;

/// Stops and the position held on [t[stop_idx[j]], t[stop_idx[j+1]]).
struct RebalanceSchedule {
  std::vector<std::size_t> stop_idx;
  std::vector<real> positions;

  std::size_t size() const noexcept { return stop_idx.size(); }
};

/// Incremental form of the schemes: feed grid points in order, learn whether
/// each one is a stop. Lets Monte Carlo runs avoid storing fine paths; the
/// schedule_* functions below run this same state machine over a PathGrid.
class ScheduleBuilder {
 public:
  ScheduleBuilder(const SchemeSpec& scheme, std::size_t path_size);

  /// Consumes grid point 0 (always a stop).
  void start(const Sample& s0);
  /// Consumes grid point i >= 1; true if i is a stop.
  bool observe(std::size_t i, const Sample& s);

  real position() const noexcept { return position_; }
  real anchor() const noexcept { return anchor_x_; }
  /// For the biased scheme: whether the latest stop was an upper-barrier exit.
  bool last_exit_upper() const noexcept { return last_upper_; }

 private:
  void reset_anchor(const Sample& s);

  SchemeSpec scheme_;
  std::size_t path_size_;
  std::size_t next_equidistant_ = 0;
  std::size_t equidistant_j_ = 0;
  real anchor_x_ = 0.0;
  real upper_ = 0.0;
  real lower_ = 0.0;
  real position_ = 0.0;
  bool last_upper_ = false;
};

RebalanceSchedule build_schedule(const PathGrid& path, const SchemeSpec& scheme);

RebalanceSchedule schedule_equidistant(const PathGrid& path, std::size_t n);
RebalanceSchedule schedule_hitting_unbiased(const PathGrid& path, real eps, ShatMode shat);
RebalanceSchedule schedule_hitting_biased(const PathGrid& path, real eps, real gamma, real beta);

/// Smallest barrier half-width the scheme can use at the start of the path,
/// for the dt resolution check eps^2 min(Shat)^2 >= 25 dt.
real smallest_barrier(const PathGrid& path, const SchemeSpec& scheme);
bool barrier_resolved(real barrier, real dt) noexcept;

/// Writes the schedule as CSV with header stop_index,time,x,position.
void write_schedule_csv(std::ostream& out, const PathGrid& path, const RebalanceSchedule& sched);

}  // namespace hedgeff
