#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <variant>

#include "hedgeff/rng.hpp"
#include "hedgeff/types.hpp"

namespace hedgeff {

/// X = Y = W, a standard Brownian motion.
struct BrownianMartingale {};

/// X = Y = drift * t + W.
struct DriftedBrownian {
  real drift = 0.0;
};

/// Y is a geometric Brownian motion under the pricing measure and X is the
/// Black-Scholes call delta of Y. Requires maturity > horizon.
struct BlackScholesDelta {
  real spot = 1.0;
  real strike = 1.0;
  real vol = 0.2;
  real rate = 0.0;
  real maturity = 1.0;
};

using ModelKind = std::variant<BrownianMartingale, DriftedBrownian, BlackScholesDelta>;

/// Weight process S in the cost functional: S = 1, or S = Y/K so that the
/// cost with beta = 1 is the linear transaction cost.
enum class CostWeight { Unit, LinearCost };

struct ModelSpec {
  ModelKind kind = BrownianMartingale{};
  CostWeight s_mode = CostWeight::Unit;
  real horizon = 1.0;
  real dt = 1e-3;
  real k_cap = 1e8;

  /// Number of grid points, horizon / dt rounded, plus one.
  std::size_t grid_size() const;
  /// Actual uniform step, horizon / (grid_size() - 1).
  real step() const;
  bool is_brownian_family() const noexcept;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const ModelSpec& spec);

/// One grid point of the driving processes.
struct Sample {
  real t = 0.0;
  real x = 0.0;
  real y = 0.0;
  real qv_x = 0.0;
  real k = 1.0;
  real s = 1.0;
  real h = 0.0;
};

/// One simulated fine-grid realization of (X, Y, <X>, K, S, H) on [0, T].
struct PathGrid {
  VectorXr t, x, y, qv_x, k, s, h;
  /// True when K hit the configured cap somewhere on the path.
  bool k_capped = false;

  std::size_t size() const noexcept { return static_cast<std::size_t>(t.size()); }
  Sample sample(std::size_t i) const;
  void resize(std::size_t n);
  void set(std::size_t i, const Sample& s);
};

/// Streams the grid of one path point by point without storing it. simulate()
/// is this generator run to completion, so both routes are bit-identical.
class PathGenerator {
 public:
  PathGenerator(const ModelSpec& spec, StreamId id);

  std::size_t size() const noexcept { return size_; }
  std::size_t index() const noexcept { return index_; }
  const Sample& current() const noexcept { return current_; }
  bool k_capped() const noexcept { return k_capped_; }

  /// Moves to the next grid point; false once the last point is current.
  bool advance();

 private:
  void fill_delta_state();

  enum class Kind { Brownian, Drifted, Delta };

  ModelSpec spec_;
  Kind kind_;
  real drift_step_ = 0.0;
  RandomStream rng_;
  std::size_t size_;
  std::size_t index_ = 0;
  real step_;
  real sqrt_step_;
  Sample current_;
  bool k_capped_ = false;
  // Black-Scholes only: sigma * y * gamma at the current point.
  real qv_rate_ = 0.0;
};

/// Simulates one path on the uniform grid of `spec`. Deterministic in (spec, id).
PathGrid simulate(const ModelSpec& spec, StreamId id);

/// Halves the step of a Brownian-family path by inserting Brownian-bridge
/// midpoints; shared grid points are unchanged. The midpoint draws come from
/// stream `id`.
PathGrid refine_bridge(const PathGrid& path, const ModelSpec& spec, StreamId id);

/// Writes the path as CSV with header t,x,y,qv_x,k,s,h.
void write_path_csv(std::ostream& out, const PathGrid& path);

std::string model_name(const ModelSpec& spec);

/// Black-Scholes call delta and gamma at time-to-maturity `tau`.
struct CallGreeks {
  real delta;
  real gamma;
};
CallGreeks call_greeks(real spot, real strike, real vol, real rate, real tau);

}  // namespace hedgeff
