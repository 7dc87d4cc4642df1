#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>

#include "hedgeff/models.hpp"
#include "hedgeff/schemes.hpp"

namespace hedgeff {

/// Discretization error and cost of one (path, schedule) pair.
struct ErrorReport {
  /// <Z>_T = int (X - X^n)^2 d<Y>, left-endpoint rule on the grid.
  real qv_z = 0.0;
  /// Z_T = int X dY - sum_j X^n_j (Y_{tau_{j+1}} - Y_{tau_j}).
  real z_terminal = 0.0;
  /// sum over trades of S K |dX^n|^beta.
  real cost = 0.0;
  std::size_t n_trades = 0;
};

/// Streaming evaluation of ErrorReport. Feed the grid in order; report
/// stops as they happen. All public metric functions replay a stored
/// schedule through this class, so streamed and stored results agree bit
/// for bit.
class MetricsAccumulator {
 public:
  explicit MetricsAccumulator(real beta);

  void begin(const Sample& s0, real position0);
  /// Accounts for [prev.t, next.t) using the position in force at prev.
  void advance(const Sample& prev, const Sample& next);
  /// A stop at `s` (already advanced to) with new position `position`.
  void trade(const Sample& s, real position);
  /// Closes the final interval at the last grid point.
  ErrorReport finish(const Sample& last) const;

  real position() const noexcept { return position_; }

 private:
  real beta_;
  real position_ = 0.0;
  real anchor_y_ = 0.0;
  real qv_ = 0.0;
  real ito_ = 0.0;
  real riemann_ = 0.0;
  real cost_ = 0.0;
  std::size_t trades_ = 0;
};

/// One trade's cost S K |dX^n|^beta; beta = 0 counts 1 per nonzero jump.
real trade_cost(real s, real k, real jump, real beta);

ErrorReport evaluate(const PathGrid& path, const RebalanceSchedule& sched, real beta);

real error_qv(const PathGrid& path, const RebalanceSchedule& sched);
real terminal_error(const PathGrid& path, const RebalanceSchedule& sched);
real cost(const PathGrid& path, const RebalanceSchedule& sched, real beta);
std::size_t trade_count(const RebalanceSchedule& sched);

/// Per-path report CSV with header seed,qv_z,z_terminal,cost,n_trades, where
/// seed is the path's stream index within the run.
void write_report_csv(std::ostream& out, std::span<const ErrorReport> reports,
                      std::uint64_t first_stream = 0);

}  // namespace hedgeff
