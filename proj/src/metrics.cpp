#include "hedgeff/metrics.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "hedgeff/csv.hpp"

namespace hedgeff {

real trade_cost(real s, real k, real jump, real beta) {
  if (jump == 0.0) return 0.0;
  const real size = beta == 0.0 ? 1.0 : std::pow(std::abs(jump), beta);
  return s * k * size;
}

MetricsAccumulator::MetricsAccumulator(real beta) : beta_(beta) {
  if (!(beta >= 0.0 && beta < 2.0)) throw std::invalid_argument("beta: must lie in [0, 2)");
}

void MetricsAccumulator::begin(const Sample& s0, real position0) {
  position_ = position0;
  anchor_y_ = s0.y;
  qv_ = ito_ = riemann_ = cost_ = 0.0;
  trades_ = 0;
}

void MetricsAccumulator::advance(const Sample& prev, const Sample& next) {
  const real gap = prev.x - position_;
  qv_ += gap * gap * prev.k * (next.qv_x - prev.qv_x);
  ito_ += prev.x * (next.y - prev.y);
}

void MetricsAccumulator::trade(const Sample& s, real position) {
  const real jump = position - position_;
  if (jump != 0.0) {
    cost_ += trade_cost(s.s, s.k, jump, beta_);
    ++trades_;
  }
  riemann_ += position_ * (s.y - anchor_y_);
  anchor_y_ = s.y;
  position_ = position;
}

ErrorReport MetricsAccumulator::finish(const Sample& last) const {
  ErrorReport r;
  r.qv_z = qv_;
  r.z_terminal = ito_ - (riemann_ + position_ * (last.y - anchor_y_));
  r.cost = cost_;
  r.n_trades = trades_;
  return r;
}

namespace {

void check_schedule(const PathGrid& path, const RebalanceSchedule& sched) {
  if (sched.stop_idx.size() != sched.positions.size()) {
    throw std::invalid_argument("schedule: stop_idx and positions differ in length");
  }
  if (sched.stop_idx.empty() || sched.stop_idx.front() != 0) {
    throw std::invalid_argument("schedule: must start at grid index 0");
  }
  for (std::size_t j = 1; j < sched.size(); ++j) {
    if (sched.stop_idx[j] <= sched.stop_idx[j - 1]) {
      throw std::invalid_argument("schedule: stop indices must increase");
    }
  }
  if (sched.stop_idx.back() >= path.size()) {
    throw std::invalid_argument("schedule: stop index beyond the path length");
  }
}

}  // namespace

ErrorReport evaluate(const PathGrid& path, const RebalanceSchedule& sched, real beta) {
  check_schedule(path, sched);
  MetricsAccumulator acc(beta);
  Sample prev = path.sample(0);
  acc.begin(prev, sched.positions[0]);
  std::size_t j = 1;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Sample cur = path.sample(i);
    acc.advance(prev, cur);
    if (j < sched.size() && sched.stop_idx[j] == i) {
      acc.trade(cur, sched.positions[j]);
      ++j;
    }
    prev = cur;
  }
  return acc.finish(prev);
}

real error_qv(const PathGrid& path, const RebalanceSchedule& sched) {
  return evaluate(path, sched, 0.0).qv_z;
}

real terminal_error(const PathGrid& path, const RebalanceSchedule& sched) {
  return evaluate(path, sched, 0.0).z_terminal;
}

real cost(const PathGrid& path, const RebalanceSchedule& sched, real beta) {
  return evaluate(path, sched, beta).cost;
}

std::size_t trade_count(const RebalanceSchedule& sched) {
  std::size_t n = 0;
  for (std::size_t j = 1; j < sched.positions.size(); ++j) {
    if (sched.positions[j] != sched.positions[j - 1]) ++n;
  }
  return n;
}

void write_report_csv(std::ostream& out, std::span<const ErrorReport> reports,
                      std::uint64_t first_stream) {
  CsvWriter csv(out, {"seed", "qv_z", "z_terminal", "cost", "n_trades"});
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    csv.row(first_stream + i, r.qv_z, r.z_terminal, r.cost, r.n_trades);
  }
}

}  // namespace hedgeff
