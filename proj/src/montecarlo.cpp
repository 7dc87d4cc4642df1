#include "hedgeff/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "hedgeff/csv.hpp"

namespace hedgeff {

void RunningStats::add(real value) noexcept {
  ++count_;
  const real delta = value - mean_;
  mean_ += delta / static_cast<real>(count_);
  m2_ += delta * (value - mean_);
}

void RunningStats::merge(const RunningStats& other) noexcept {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const real na = static_cast<real>(count_);
  const real nb = static_cast<real>(other.count_);
  const real n = na + nb;
  const real delta = other.mean_ - mean_;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  count_ += other.count_;
}

real RunningStats::variance() const noexcept {
  return count_ < 2 ? 0.0 : m2_ / static_cast<real>(count_ - 1);
}

Estimate RunningStats::estimate() const noexcept {
  const real se = count_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<real>(count_));
  return {mean_, se, count_};
}

namespace {

// Runs `body(path_index, local)` for every path, one Local per block of
// paths, and returns the block-local states in block order. Merging them in
// that order makes results independent of the thread count.
template <class Local, class MakeLocal, class Body>
std::vector<Local> for_each_path(std::size_t n_paths, const RunOptions& options,
                                 MakeLocal make_local, Body body) {
  const std::size_t block = std::max<std::size_t>(1, options.block_size);
  const std::size_t n_blocks = (n_paths + block - 1) / block;
  std::vector<Local> locals;
  locals.reserve(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) locals.push_back(make_local());

  unsigned threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  threads = static_cast<unsigned>(std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, n_blocks)));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> cancelled{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    try {
      for (;;) {
        if (options.cancel && options.cancel->load()) {
          cancelled = true;
          return;
        }
        const std::size_t b = next.fetch_add(1);
        if (b >= n_blocks || cancelled) return;
        const std::size_t end = std::min(n_paths, (b + 1) * block);
        for (std::size_t p = b * block; p < end; ++p) body(p, locals[b]);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      cancelled = true;
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  if (cancelled) throw Cancelled();
  return locals;
}

struct SchemeStats {
  RunningStats cost;
  RunningStats qv;
};

real product_of(real cost_mean, real qv_mean, real beta) {
  return std::pow(cost_mean, 2.0 / (2.0 - beta)) * qv_mean;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::uint64_t kAuxSeedSalt = 0xa0c5u;

// Pathwise integral int f(sample) K d<X> by the left-endpoint rule.
template <class F>
Estimate integrate_aux(const ModelSpec& model, std::uint64_t seed, std::size_t n_paths, F f) {
  RunOptions options;
  auto locals = for_each_path<RunningStats>(
      n_paths, options, [] { return RunningStats{}; },
      [&](std::size_t p, RunningStats& stats) {
        PathGenerator gen(model, StreamId{derive_seed(seed, kAuxSeedSalt), p});
        real total = 0.0;
        Sample prev = gen.current();
        while (gen.advance()) {
          const Sample& cur = gen.current();
          total += f(prev) * prev.k * (cur.qv_x - prev.qv_x);
          prev = cur;
        }
        stats.add(total);
      });
  RunningStats all;
  for (const auto& l : locals) all.merge(l);
  return all.estimate();
}

bool unit_brownian(const ModelSpec& model) {
  return model.is_brownian_family() && model.s_mode == CostWeight::Unit;
}

}  // namespace

Bound inner_expectation(const ModelSpec& model, real beta, std::uint64_t seed,
                        std::size_t aux_paths) {
  validate(model);
  if (!(beta >= 0.0 && beta < 2.0)) throw std::invalid_argument("beta: must lie in [0, 2)");
  if (unit_brownian(model)) return {model.horizon, 0.0};
  const real p = 2.0 / (4.0 - beta);
  const Estimate e =
      integrate_aux(model, seed, aux_paths, [p](const Sample& s) { return std::pow(s.s, p); });
  return {e.mean, e.std_error};
}

Bound theoretical_bound(const ModelSpec& model, real beta, BoundKind kind, std::uint64_t seed,
                        std::size_t aux_paths) {
  const Bound inner = inner_expectation(model, beta, seed, aux_paths);
  const real constant = kind == BoundKind::Unbiased ? 1.0 / 6.0 : 1.0 / 18.0;
  const real power = (4.0 - beta) / (2.0 - beta);
  const real value = constant * std::pow(inner.value, power);
  const real se = constant * power * std::pow(inner.value, power - 1.0) * inner.std_error;
  return {value, se};
}

SchemeLimits scheme_limits(const ModelSpec& model, real eps, ShatMode shat, real beta,
                           std::uint64_t seed, std::size_t aux_paths) {
  validate(model);
  validate(SchemeSpec{HittingUnbiased{eps, shat}});
  if (!(beta >= 0.0 && beta < 2.0)) throw std::invalid_argument("beta: must lie in [0, 2)");
  SchemeLimits out;
  const real cost_scale = std::pow(eps, beta - 2.0);
  const real qv_scale = eps * eps / 6.0;
  if (unit_brownian(model)) {
    // S = K = 1, so every Shat mode is a constant.
    const real c = shat.kind == ShatMode::Kind::Const ? shat.param : 1.0;
    out.cost = cost_scale * std::pow(c, beta - 2.0) * model.horizon;
    out.qv = qv_scale * c * c * model.horizon;
    return out;
  }
  const Estimate cost = integrate_aux(model, seed, aux_paths, [&](const Sample& s) {
    return s.s * std::pow(shat(s), beta - 2.0);
  });
  const Estimate qv = integrate_aux(model, seed, aux_paths, [&](const Sample& s) {
    const real v = shat(s);
    return v * v;
  });
  out.cost = cost_scale * cost.mean;
  out.cost_std_error = cost_scale * cost.std_error;
  out.qv = qv_scale * qv.mean;
  out.qv_std_error = qv_scale * qv.std_error;
  return out;
}

std::vector<EfficiencyProduct> run_paired(const ModelSpec& model,
                                          std::span<const SchemeSpec> schemes, real beta,
                                          std::size_t n_paths, std::uint64_t seed,
                                          const RunOptions& options) {
  validate(model);
  for (const auto& s : schemes) validate(s);
  if (schemes.empty()) throw std::invalid_argument("scheme: at least one scheme required");
  if (n_paths < 2) throw std::invalid_argument("n_paths: need at least 2 paths");
  if (!(beta >= 0.0 && beta < 2.0)) throw std::invalid_argument("beta: must lie in [0, 2)");

  const std::size_t n_schemes = schemes.size();
  const std::size_t grid = model.grid_size();
  if (options.per_path) {
    options.per_path->assign(n_schemes, std::vector<ErrorReport>(n_paths));
  }

  auto locals = for_each_path<std::vector<SchemeStats>>(
      n_paths, options, [&] { return std::vector<SchemeStats>(n_schemes); },
      [&](std::size_t p, std::vector<SchemeStats>& stats) {
        PathGenerator gen(model, StreamId{seed, p});
        std::vector<ScheduleBuilder> builders;
        std::vector<MetricsAccumulator> accs;
        builders.reserve(n_schemes);
        accs.reserve(n_schemes);
        Sample prev = gen.current();
        for (const auto& s : schemes) {
          builders.emplace_back(s, grid);
          builders.back().start(prev);
          accs.emplace_back(beta);
          accs.back().begin(prev, builders.back().position());
        }
        while (gen.advance()) {
          const Sample& cur = gen.current();
          const std::size_t i = gen.index();
          for (std::size_t k = 0; k < n_schemes; ++k) {
            accs[k].advance(prev, cur);
            if (builders[k].observe(i, cur)) accs[k].trade(cur, builders[k].position());
          }
          prev = cur;
        }
        for (std::size_t k = 0; k < n_schemes; ++k) {
          const ErrorReport r = accs[k].finish(prev);
          stats[k].cost.add(r.cost);
          stats[k].qv.add(r.qv_z);
          if (options.per_path) (*options.per_path)[k][p] = r;
        }
      });

  std::vector<EfficiencyProduct> out(n_schemes);
  for (std::size_t k = 0; k < n_schemes; ++k) {
    SchemeStats all;
    for (const auto& l : locals) {
      all.cost.merge(l[k].cost);
      all.qv.merge(l[k].qv);
    }
    auto& e = out[k];
    e.scheme = schemes[k];
    e.n_paths = n_paths;
    e.beta = beta;
    e.cost = all.cost.estimate();
    e.qv = all.qv.estimate();
    e.product = product_of(e.cost.mean, e.qv.mean, beta);
    // First-order delta method, ignoring the cost/qv covariance.
    const real q = 2.0 / (2.0 - beta);
    const real rc = e.cost.mean > 0.0 ? e.cost.std_error / e.cost.mean : 0.0;
    const real rq = e.qv.mean > 0.0 ? e.qv.std_error / e.qv.mean : 0.0;
    e.product_std_error = e.product * std::sqrt(q * q * rc * rc + rq * rq);
    e.bound = theoretical_bound(model, beta,
                                is_unbiased(schemes[k]) ? BoundKind::Unbiased : BoundKind::Biased,
                                seed);
    e.ratio = e.bound.value > 0.0 ? e.product / e.bound.value : 0.0;
  }
  return out;
}

EfficiencyProduct run_experiment(const ModelSpec& model, const SchemeSpec& scheme, real beta,
                                 std::size_t n_paths, std::uint64_t seed,
                                 const RunOptions& options) {
  return run_paired(model, std::span<const SchemeSpec>(&scheme, 1), beta, n_paths, seed, options)
      .front();
}

SchemeSpec with_scale(const SchemeSpec& scheme, real value) {
  return std::visit(overloaded{
                        [&](Equidistant e) -> SchemeSpec {
                          if (!(value >= 1.0) || value != std::floor(value)) {
                            throw std::invalid_argument("n: sweep values must be positive integers");
                          }
                          e.n = static_cast<std::size_t>(value);
                          return e;
                        },
                        [&](HittingUnbiased h) -> SchemeSpec {
                          h.eps = value;
                          return h;
                        },
                        [&](HittingBiased h) -> SchemeSpec {
                          h.eps = value;
                          return h;
                        },
                    },
                    scheme);
}

real scale_of(const SchemeSpec& scheme) {
  return std::visit(overloaded{
                        [](const Equidistant& e) { return static_cast<real>(e.n); },
                        [](const HittingUnbiased& h) { return h.eps; },
                        [](const HittingBiased& h) { return h.eps; },
                    },
                    scheme);
}

std::vector<EfficiencyProduct> sweep(const ModelSpec& model, const SchemeSpec& base, real beta,
                                     std::size_t n_paths, std::uint64_t seed,
                                     std::span<const real> values, const RunOptions& options) {
  if (values.empty()) throw std::invalid_argument("sweep: at least one sweep point required");
  std::vector<EfficiencyProduct> rows;
  rows.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint64_t point_seed = i == 0 ? seed : derive_seed(seed, i);
    RunOptions point_options = options;
    point_options.per_path = nullptr;
    rows.push_back(
        run_experiment(model, with_scale(base, values[i]), beta, n_paths, point_seed, point_options));
  }
  return rows;
}

namespace {

struct ExitLocal {
  std::size_t n_exits = 0;
  std::size_t n_upper = 0;
  RunningStats d1, d2, d3;
};

}  // namespace

ExitStatistics exit_statistics(const ModelSpec& model, const HittingBiased& scheme,
                               std::size_t n_paths, std::uint64_t seed,
                               const RunOptions& options) {
  validate(model);
  const SchemeSpec spec = scheme;
  validate(spec);
  const std::size_t grid = model.grid_size();
  auto locals = for_each_path<ExitLocal>(
      n_paths, options, [] { return ExitLocal{}; },
      [&](std::size_t p, ExitLocal& local) {
        PathGenerator gen(model, StreamId{seed, p});
        ScheduleBuilder builder(spec, grid);
        builder.start(gen.current());
        while (gen.advance()) {
          const real anchor = builder.anchor();
          if (builder.observe(gen.index(), gen.current())) {
            const real d = gen.current().x - anchor;
            ++local.n_exits;
            if (builder.last_exit_upper()) ++local.n_upper;
            local.d1.add(d);
            local.d2.add(d * d);
            local.d3.add(d * d * d);
          }
        }
      });
  ExitStatistics out;
  RunningStats d1, d2, d3;
  for (const auto& l : locals) {
    out.n_exits += l.n_exits;
    out.n_upper += l.n_upper;
    d1.merge(l.d1);
    d2.merge(l.d2);
    d3.merge(l.d3);
  }
  out.increment = d1.estimate();
  out.m2 = d2.estimate();
  out.m3 = d3.estimate();
  return out;
}

void write_experiment_csv(std::ostream& out, std::span<const EfficiencyProduct> rows) {
  CsvWriter csv(out, {"scheme", "beta", "eps_or_n", "gamma", "n_paths", "cost_mean", "cost_stderr",
                      "qv_mean", "qv_stderr", "product", "bound", "ratio"});
  for (const auto& r : rows) {
    const real gamma =
        std::holds_alternative<HittingBiased>(r.scheme) ? std::get<HittingBiased>(r.scheme).gamma : 0.0;
    csv.row(scheme_name(r.scheme), r.beta, scale_of(r.scheme), gamma, r.n_paths, r.cost.mean,
            r.cost.std_error, r.qv.mean, r.qv.std_error, r.product, r.bound.value, r.ratio);
  }
}

}  // namespace hedgeff
