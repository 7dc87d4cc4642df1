#include "hedgeff/models.hpp"

#include <cmath>
#include <numbers>
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

real normal_cdf(real x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

real normal_pdf(real x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

std::size_t ModelSpec::grid_size() const {
  return static_cast<std::size_t>(std::llround(horizon / dt)) + 1;
}

real ModelSpec::step() const { return horizon / static_cast<real>(grid_size() - 1); }

bool ModelSpec::is_brownian_family() const noexcept {
  return !std::holds_alternative<BlackScholesDelta>(kind);
}

void validate(const ModelSpec& spec) {
  if (!(spec.horizon > 0.0) || !std::isfinite(spec.horizon)) {
    throw std::invalid_argument("T: horizon must be positive");
  }
  if (!(spec.dt > 0.0)) throw std::invalid_argument("dt: step must be positive");
  if (spec.dt > spec.horizon / 100.0 * (1.0 + 1e-12)) {
    throw std::invalid_argument("dt: grid too coarse, need dt <= T/100");
  }
  if (!(spec.k_cap > 1.0)) throw std::invalid_argument("k_cap: must exceed 1");
  if (const auto* bs = std::get_if<BlackScholesDelta>(&spec.kind)) {
    if (!(bs->spot > 0.0)) throw std::invalid_argument("spot: must be positive");
    if (!(bs->strike > 0.0)) throw std::invalid_argument("strike: must be positive");
    if (!(bs->vol > 0.0)) throw std::invalid_argument("vol: must be positive");
    if (!(bs->maturity > spec.horizon)) {
      throw std::invalid_argument("maturity: must exceed the horizon T");
    }
  } else if (spec.s_mode == CostWeight::LinearCost) {
    // S = Y/K would change sign with a Brownian Y.
    throw std::invalid_argument("s_mode: linear cost weight needs a positive price model (bs)");
  }
}

Sample PathGrid::sample(std::size_t i) const {
  const auto j = static_cast<Eigen::Index>(i);
  return {t(j), x(j), y(j), qv_x(j), k(j), s(j), h(j)};
}

void PathGrid::resize(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  for (VectorXr* v : {&t, &x, &y, &qv_x, &k, &s, &h}) v->resize(m);
}

void PathGrid::set(std::size_t i, const Sample& smp) {
  const auto j = static_cast<Eigen::Index>(i);
  t(j) = smp.t;
  x(j) = smp.x;
  y(j) = smp.y;
  qv_x(j) = smp.qv_x;
  k(j) = smp.k;
  s(j) = smp.s;
  h(j) = smp.h;
}

CallGreeks call_greeks(real spot, real strike, real vol, real rate, real tau) {
  const real vs = vol * std::sqrt(tau);
  const real d1 = (std::log(spot / strike) + (rate + 0.5 * vol * vol) * tau) / vs;
  return {normal_cdf(d1), normal_pdf(d1) / (spot * vs)};
}

PathGenerator::PathGenerator(const ModelSpec& spec, StreamId id)
    : spec_(spec),
      rng_(id),
      size_(spec.grid_size()),
      step_(spec.step()),
      sqrt_step_(std::sqrt(step_)) {
  validate(spec_);
  std::visit(overloaded{
                 [&](const BrownianMartingale&) { kind_ = Kind::Brownian; },
                 [&](const DriftedBrownian& m) {
                   kind_ = Kind::Drifted;
                   current_.h = m.drift;
                   drift_step_ = m.drift * step_;
                 },
                 [&](const BlackScholesDelta& m) {
                   kind_ = Kind::Delta;
                   current_.y = m.spot;
                   fill_delta_state();
                 },
             },
             spec_.kind);
}

void PathGenerator::fill_delta_state() {
  const auto& m = std::get<BlackScholesDelta>(spec_.kind);
  const auto greeks = call_greeks(current_.y, m.strike, m.vol, m.rate, m.maturity - current_.t);
  const real min_gamma = 1.0 / std::sqrt(spec_.k_cap);
  real gamma = greeks.gamma;
  if (!(gamma > min_gamma)) {
    gamma = min_gamma;
    k_capped_ = true;
  }
  current_.x = greeks.delta;
  current_.k = 1.0 / (gamma * gamma);
  // Under the pricing measure the delta has drift -vol^2 y gamma dt and
  // d<X> = (vol y gamma)^2 dt, so H = drift / (d<X>/dt) = -1 / (y gamma).
  current_.h = -1.0 / (current_.y * gamma);
  current_.s = spec_.s_mode == CostWeight::LinearCost ? current_.y / current_.k : 1.0;
  qv_rate_ = m.vol * current_.y * gamma;
}

bool PathGenerator::advance() {
  if (index_ + 1 >= size_) return false;
  ++index_;
  const real z = rng_.normal();
  const real t = static_cast<real>(index_) * step_;
  switch (kind_) {
    case Kind::Brownian:
    case Kind::Drifted:
      current_.x += drift_step_ + sqrt_step_ * z;
      current_.y = current_.x;
      current_.qv_x = t;
      current_.t = t;
      break;
    case Kind::Delta: {
      const auto& m = std::get<BlackScholesDelta>(spec_.kind);
      current_.qv_x += qv_rate_ * qv_rate_ * step_;
      current_.y *= std::exp((m.rate - 0.5 * m.vol * m.vol) * step_ + m.vol * sqrt_step_ * z);
      current_.t = t;
      fill_delta_state();
      break;
    }
  }
  return true;
}

PathGrid simulate(const ModelSpec& spec, StreamId id) {
  PathGenerator gen(spec, id);
  PathGrid path;
  path.resize(gen.size());
  path.set(0, gen.current());
  while (gen.advance()) path.set(gen.index(), gen.current());
  path.k_capped = gen.k_capped();
  return path;
}

PathGrid refine_bridge(const PathGrid& path, const ModelSpec& spec, StreamId id) {
  if (!spec.is_brownian_family()) {
    throw std::invalid_argument("refine_bridge: only Brownian-family models are supported");
  }
  const std::size_t n = path.size();
  if (n < 2) throw std::invalid_argument("refine_bridge: path too short");
  RandomStream rng(id);
  const real half = (path.t(1) - path.t(0)) / 2.0;
  // Midpoint of a Brownian bridge (with any drift) given both ends: mean of
  // the ends, variance dt/4.
  const real sd = std::sqrt(half / 2.0);
  PathGrid fine;
  fine.resize(2 * n - 1);
  fine.set(0, path.sample(0));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Sample a = path.sample(i);
    const Sample b = path.sample(i + 1);
    Sample mid = a;
    mid.t = a.t + half;
    mid.x = 0.5 * (a.x + b.x) + sd * rng.normal();
    mid.y = mid.x;
    mid.qv_x = mid.t;
    fine.set(2 * i + 1, mid);
    fine.set(2 * i + 2, b);
  }
  return fine;
}

void write_path_csv(std::ostream& out, const PathGrid& path) {
  CsvWriter csv(out, {"t", "x", "y", "qv_x", "k", "s", "h"});
  for (std::size_t i = 0; i < path.size(); ++i) {
    const Sample s = path.sample(i);
    csv.row(s.t, s.x, s.y, s.qv_x, s.k, s.s, s.h);
  }
}

std::string model_name(const ModelSpec& spec) {
  return std::visit(overloaded{
                        [](const BrownianMartingale&) { return std::string("bm"); },
                        [](const DriftedBrownian&) { return std::string("drifted"); },
                        [](const BlackScholesDelta&) { return std::string("bs"); },
                    },
                    spec.kind);
}

}  // namespace hedgeff
