#include "hedgeff/schemes.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "hedgeff/csv.hpp"

namespace hedgeff {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t equidistant_index(std::size_t j, std::size_t n, std::size_t path_size) {
  // nearest grid index to j (L - 1) / n
  const std::size_t last = path_size - 1;
  return (j * last + n / 2) / n;
}

real biased_scale(const Sample& s, real beta) { return std::pow(s.s, 1.0 / (4.0 - beta)); }

}  // namespace

real ShatMode::operator()(const Sample& s) const {
  switch (kind) {
    case Kind::Const:
      return param;
    case Kind::PowerS:
      return std::pow(s.s, 1.0 / (4.0 - param));
    case Kind::PowerK:
      return std::pow(s.k, -0.25);
  }
  return param;
}

void validate(const SchemeSpec& scheme) {
  std::visit(overloaded{
                 [](const Equidistant& e) {
                   if (e.n < 1) throw std::invalid_argument("n: must be at least 1");
                 },
                 [](const HittingUnbiased& h) {
                   if (!(h.eps > 0.0)) throw std::invalid_argument("eps: must be positive");
                   if (h.shat.kind == ShatMode::Kind::Const && !(h.shat.param > 0.0)) {
                     throw std::invalid_argument("shat_c: must be positive");
                   }
                   if (h.shat.kind == ShatMode::Kind::PowerS &&
                       !(h.shat.param >= 0.0 && h.shat.param < 2.0)) {
                     throw std::invalid_argument("beta: must lie in [0, 2)");
                   }
                 },
                 [](const HittingBiased& h) {
                   if (!(h.eps > 0.0)) throw std::invalid_argument("eps: must be positive");
                   if (!std::isfinite(h.gamma)) throw std::invalid_argument("gamma: must be finite");
                   if (!(h.beta >= 0.0 && h.beta < 2.0)) {
                     throw std::invalid_argument("beta: must lie in [0, 2)");
                   }
                 },
             },
             scheme);
}

std::string scheme_name(const SchemeSpec& scheme) {
  return std::visit(overloaded{
                        [](const Equidistant&) { return std::string("equidistant"); },
                        [](const HittingUnbiased&) { return std::string("hitting"); },
                        [](const HittingBiased&) { return std::string("biased"); },
                    },
                    scheme);
}

bool is_unbiased(const SchemeSpec& scheme) noexcept {
  return !std::holds_alternative<HittingBiased>(scheme);
}

ScheduleBuilder::ScheduleBuilder(const SchemeSpec& scheme, std::size_t path_size)
    : scheme_(scheme), path_size_(path_size) {
  validate(scheme_);
  if (path_size_ < 2) throw std::invalid_argument("path: need at least two grid points");
  if (const auto* e = std::get_if<Equidistant>(&scheme_); e && e->n > path_size_ - 1) {
    throw std::invalid_argument("n: exceeds the grid resolution");
  }
}

void ScheduleBuilder::reset_anchor(const Sample& s) {
  anchor_x_ = s.x;
  std::visit(overloaded{
                 [&](const Equidistant&) { position_ = s.x; },
                 [&](const HittingUnbiased& h) {
                   const real barrier = h.eps * h.shat(s);
                   upper_ = barrier;
                   lower_ = barrier;
                   position_ = s.x;
                 },
                 [&](const HittingBiased& h) {
                   const real scale = biased_scale(s, h.beta);
                   upper_ = h.eps * std::exp(h.gamma) * scale;
                   lower_ = h.eps * std::exp(-h.gamma) * scale;
                   position_ = s.x + (2.0 / 3.0) * h.eps * std::sinh(h.gamma) * scale;
                 },
             },
             scheme_);
}

void ScheduleBuilder::start(const Sample& s0) {
  if (const auto* e = std::get_if<Equidistant>(&scheme_)) {
    equidistant_j_ = 1;
    next_equidistant_ = e->n > 1 ? equidistant_index(1, e->n, path_size_)
                                 : std::numeric_limits<std::size_t>::max();
  }
  last_upper_ = false;
  reset_anchor(s0);
}

bool ScheduleBuilder::observe(std::size_t i, const Sample& s) {
  bool stop = false;
  if (const auto* e = std::get_if<Equidistant>(&scheme_)) {
    if (i == next_equidistant_) {
      stop = true;
      ++equidistant_j_;
      next_equidistant_ = equidistant_j_ < e->n ? equidistant_index(equidistant_j_, e->n, path_size_)
                                                : std::numeric_limits<std::size_t>::max();
    }
  } else if (std::holds_alternative<HittingUnbiased>(scheme_)) {
    stop = std::abs(s.x - anchor_x_) >= upper_;
  } else {
    const real move = s.x - anchor_x_;
    if (move >= upper_) {
      stop = true;
      last_upper_ = true;
    } else if (move <= -lower_) {
      stop = true;
      last_upper_ = false;
    }
  }
  if (stop) reset_anchor(s);
  return stop;
}

RebalanceSchedule build_schedule(const PathGrid& path, const SchemeSpec& scheme) {
  ScheduleBuilder builder(scheme, path.size());
  RebalanceSchedule sched;
  builder.start(path.sample(0));
  sched.stop_idx.push_back(0);
  sched.positions.push_back(builder.position());
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (builder.observe(i, path.sample(i))) {
      sched.stop_idx.push_back(i);
      sched.positions.push_back(builder.position());
    }
  }
  return sched;
}

RebalanceSchedule schedule_equidistant(const PathGrid& path, std::size_t n) {
  return build_schedule(path, Equidistant{n});
}

RebalanceSchedule schedule_hitting_unbiased(const PathGrid& path, real eps, ShatMode shat) {
  return build_schedule(path, HittingUnbiased{eps, shat});
}

RebalanceSchedule schedule_hitting_biased(const PathGrid& path, real eps, real gamma, real beta) {
  return build_schedule(path, HittingBiased{eps, gamma, beta});
}

real smallest_barrier(const PathGrid& path, const SchemeSpec& scheme) {
  real scale = std::numeric_limits<real>::infinity();
  return std::visit(
      overloaded{
          [&](const Equidistant&) { return scale; },
          [&](const HittingUnbiased& h) {
            for (std::size_t i = 0; i < path.size(); ++i) scale = std::min(scale, h.shat(path.sample(i)));
            return h.eps * scale;
          },
          [&](const HittingBiased& h) {
            for (std::size_t i = 0; i < path.size(); ++i) {
              scale = std::min(scale, biased_scale(path.sample(i), h.beta));
            }
            return h.eps * std::exp(-std::abs(h.gamma)) * scale;
          },
      },
      scheme);
}

bool barrier_resolved(real barrier, real dt) noexcept { return barrier * barrier >= 25.0 * dt; }

void write_schedule_csv(std::ostream& out, const PathGrid& path, const RebalanceSchedule& sched) {
  CsvWriter csv(out, {"stop_index", "time", "x", "position"});
  for (std::size_t j = 0; j < sched.size(); ++j) {
    const auto i = static_cast<Eigen::Index>(sched.stop_idx[j]);
    csv.row(sched.stop_idx[j], path.t(i), path.x(i), sched.positions[j]);
  }
}

}  // namespace hedgeff
