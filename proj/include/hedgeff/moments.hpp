#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hedgeff/types.hpp"

// Exact moment calculus for finitely supported laws, and the kurtosis-skewness
// inequalities that drive the efficiency bounds. All functions are pure.

namespace hedgeff {

/// Finitely supported probability law: values with strictly positive weights
/// summing to one, with at least two distinct values.
template <class Scalar = real>
class DiscreteDistribution {
 public:
  using VectorType = Vector<Scalar>;

  DiscreteDistribution(VectorType values, VectorType weights)
      : values_(std::move(values)), weights_(std::move(weights)) {
    if (values_.size() != weights_.size()) {
      throw std::invalid_argument("DiscreteDistribution: values and weights differ in length");
    }
    if ((weights_.array() <= Scalar(0)).any()) {
      throw std::invalid_argument("DiscreteDistribution: weights must be positive");
    }
    using std::abs;
    if (abs(weights_.sum() - Scalar(1)) > Scalar(1e-12)) {
      throw std::invalid_argument("DiscreteDistribution: weights must sum to 1");
    }
    if (values_.size() < 2 || values_.maxCoeff() == values_.minCoeff()) {
      throw std::invalid_argument("DiscreteDistribution: need at least two distinct atoms");
    }
  }

  DiscreteDistribution(std::initializer_list<std::pair<Scalar, Scalar>> atoms)
      : DiscreteDistribution(unzip(atoms, 0), unzip(atoms, 1)) {}

  const VectorType& values() const noexcept { return values_; }
  const VectorType& weights() const noexcept { return weights_; }
  Eigen::Index size() const noexcept { return values_.size(); }

  Scalar mean() const { return weights_.dot(values_); }

  /// Same weights, values multiplied by `factor`.
  DiscreteDistribution scaled(Scalar factor) const {
    return DiscreteDistribution(values_ * factor, weights_);
  }

 private:
  static VectorType unzip(std::initializer_list<std::pair<Scalar, Scalar>> atoms, int which) {
    VectorType out(static_cast<Eigen::Index>(atoms.size()));
    Eigen::Index i = 0;
    for (const auto& [v, w] : atoms) out(i++) = which == 0 ? v : w;
    return out;
  }

  VectorType values_;
  VectorType weights_;
};

/// Centered moments of a law together with the absolute moments used by the
/// inequality lemmas. `abs_beta` is E|X|^beta for the stored `beta`.
template <class Scalar = real>
struct MomentSet {
  Scalar m2{};
  Scalar m3{};
  Scalar m4{};
  Scalar abs1{};
  Scalar abs_beta{};
  Scalar beta{};
};

namespace detail {

template <class Scalar>
Scalar centering_tolerance(const Vector<Scalar>& values) {
  return Scalar(1e-12) * std::max(Scalar(1), values.cwiseAbs().maxCoeff());
}

// |v|^beta with 0^0 := 1.
template <class Scalar>
Scalar abs_pow(Scalar v, Scalar beta) {
  using std::abs;
  using std::pow;
  if (beta == Scalar(0)) return Scalar(1);
  return pow(abs(v), beta);
}

// log cosh(x), exact at 0 and free of overflow for large |x|.
template <class Scalar>
Scalar log_cosh(Scalar x) {
  using std::abs;
  using std::cosh;
  using std::exp;
  using std::log;
  using std::log1p;
  const Scalar ax = abs(x);
  if (ax < Scalar(20)) return log(cosh(ax));
  return ax - log(Scalar(2)) + log1p(exp(Scalar(-2) * ax));
}

template <class Scalar>
void require_positive_m2(const MomentSet<Scalar>& m) {
  if (!(m.m2 > Scalar(0))) throw std::domain_error("moments: m2 must be positive");
}

// |E X^2|^{beta/(2-beta)} / |E|X|^beta|^{2/(2-beta)}, the Hoelder term shared
// by the KS lemmas.
template <class Scalar>
Scalar holder_term(const MomentSet<Scalar>& m) {
  using std::exp;
  using std::log;
  if (!(m.abs_beta > Scalar(0))) throw std::domain_error("moments: E|X|^beta must be positive");
  const Scalar b = m.beta;
  // log space: both powers overflow separately as beta -> 2
  return exp((b * log(m.m2) - Scalar(2) * log(m.abs_beta)) / (Scalar(2) - b));
}

}  // namespace detail

/// Shifts the values so the law has mean zero. Weights are untouched.
template <class Scalar>
DiscreteDistribution<Scalar> center(const DiscreteDistribution<Scalar>& dist) {
  const Scalar mu = dist.mean();
  Vector<Scalar> shifted = dist.values().array() - mu;
  const Scalar var = dist.weights().dot(shifted.cwiseAbs2());
  const Scalar scale = dist.values().cwiseAbs2().maxCoeff();
  if (!(var > Scalar(1e-24) * std::max(Scalar(1), scale))) {
    throw std::domain_error("center: zero variance");
  }
  return DiscreteDistribution<Scalar>(std::move(shifted), dist.weights());
}

/// Exact weighted power sums of a centered law.
template <class Scalar>
MomentSet<Scalar> exact_moments(const DiscreteDistribution<Scalar>& dist, Scalar beta) {
  using std::abs;
  if (!(beta >= Scalar(0) && beta < Scalar(2))) {
    throw std::invalid_argument("exact_moments: beta must lie in [0, 2)");
  }
  const auto& v = dist.values();
  const auto& w = dist.weights();
  if (abs(w.dot(v)) > detail::centering_tolerance(v)) {
    throw std::domain_error("exact_moments: distribution is not centered");
  }
  MomentSet<Scalar> m;
  m.beta = beta;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const Scalar x = v(i);
    const Scalar x2 = x * x;
    m.m2 += w(i) * x2;
    m.m3 += w(i) * x2 * x;
    m.m4 += w(i) * x2 * x2;
    m.abs1 += w(i) * abs(x);
    m.abs_beta += w(i) * detail::abs_pow(x, beta);
  }
  if (!(m.m2 > Scalar(0))) throw std::domain_error("exact_moments: zero variance");
  return m;
}

/// Two-point law on {e^x, -e^{-x}} with P[X = e^x] = 1/(1 + e^{2x}).
/// Mean zero and unit variance for every x; x = 0 is the symmetric coin.
template <class Scalar = real>
DiscreteDistribution<Scalar> bernoulli_distribution(Scalar x) {
  using std::exp;
  using std::isfinite;
  if (!isfinite(x)) throw std::invalid_argument("bernoulli_distribution: x must be finite");
  // Weights via the logistic form, stable for large |x|.
  const Scalar p_up = Scalar(1) / (Scalar(1) + exp(Scalar(2) * x));
  const Scalar p_down = Scalar(1) / (Scalar(1) + exp(Scalar(-2) * x));
  Vector<Scalar> values(2), weights(2);
  values << exp(x), -exp(-x);
  weights << p_up, p_down;
  return DiscreteDistribution<Scalar>(std::move(values), std::move(weights));
}

/// m4/m2^2 - m3^2/m2^3; at least 1, with equality exactly for two-point laws.
template <class Scalar>
Scalar pearson_gap(const MomentSet<Scalar>& m) {
  detail::require_positive_m2(m);
  return m.m4 / (m.m2 * m.m2) - m.m3 * m.m3 / (m.m2 * m.m2 * m.m2);
}

/// m4/m2^2 - (3/4) m3^2/m2^3 - m2/(E|X|)^2; nonnegative, zero for two-point
/// laws and for symmetric laws on {-a, 0, a}.
template <class Scalar>
Scalar fukasawa_gap(const MomentSet<Scalar>& m) {
  detail::require_positive_m2(m);
  if (!(m.abs1 > Scalar(0))) throw std::domain_error("fukasawa_gap: E|X| must be positive");
  return m.m4 / (m.m2 * m.m2) - Scalar(0.75) * m.m3 * m.m3 / (m.m2 * m.m2 * m.m2) -
         m.m2 / (m.abs1 * m.abs1);
}

/// Left minus right side of the beta in [0, 1) refinement of fukasawa_gap.
/// Zero only for symmetric two-point laws.
template <class Scalar>
Scalar ks1_margin(const MomentSet<Scalar>& m) {
  if (!(m.beta >= Scalar(0) && m.beta < Scalar(1))) {
    throw std::invalid_argument("ks1_margin: beta must lie in [0, 1)");
  }
  detail::require_positive_m2(m);
  return m.m4 / (m.m2 * m.m2) - Scalar(0.75) * m.m3 * m.m3 / (m.m2 * m.m2 * m.m2) -
         detail::holder_term(m);
}

/// m4/m2^2 - alpha m3^2/m2^3 - (1 - alpha) H - alpha, where H is the Hoelder
/// term m2^{b/(2-b)} / (E|X|^b)^{2/(2-b)}. Nonnegative for alpha in [0, 1].
template <class Scalar>
Scalar ks20_margin(const MomentSet<Scalar>& m, Scalar alpha) {
  if (!(alpha >= Scalar(0) && alpha <= Scalar(1))) {
    throw std::invalid_argument("ks20_margin: alpha must lie in [0, 1]");
  }
  if (!(m.beta >= Scalar(0) && m.beta < Scalar(2))) {
    throw std::invalid_argument("ks20_margin: beta must lie in [0, 2)");
  }
  detail::require_positive_m2(m);
  return m.m4 / (m.m2 * m.m2) - alpha * m.m3 * m.m3 / (m.m2 * m.m2 * m.m2) -
         (Scalar(1) - alpha) * detail::holder_term(m) - alpha;
}

/// cosh((beta - 1) x) cosh(x)^{1 - beta}.
template <class Scalar>
Scalar g(Scalar x, Scalar beta) {
  using std::exp;
  return exp(detail::log_cosh((beta - Scalar(1)) * x) + (Scalar(1) - beta) * detail::log_cosh(x));
}

/// Closed form of (E|X|^b)^{2/(2-b)} / m2^{b/(2-b)} * (m4/m2^2 - alpha m3^2/m2^3)
/// on the two-point law bernoulli_distribution(x). Exceeds 1 - alpha always.
template <class Scalar>
Scalar bernoulli_ratio(Scalar x, Scalar alpha, Scalar beta) {
  using std::exp;
  using std::log;
  if (!(alpha > Scalar(0) && alpha <= Scalar(1))) {
    throw std::invalid_argument("bernoulli_ratio: alpha must lie in (0, 1]");
  }
  if (!(beta >= Scalar(0) && beta < Scalar(2))) {
    throw std::invalid_argument("bernoulli_ratio: beta must lie in [0, 2)");
  }
  // log of g(x)^{-2/(2-beta)}
  const Scalar log_g = detail::log_cosh((beta - Scalar(1)) * x) +
                       (Scalar(1) - beta) * detail::log_cosh(x);
  const Scalar log_gp = Scalar(-2) / (Scalar(2) - beta) * log_g;
  const Scalar lc = detail::log_cosh(x);
  return (Scalar(4) * alpha - Scalar(3)) * exp(-log_gp - Scalar(2) * lc) +
         Scalar(4) * (Scalar(1) - alpha) * exp(-log_gp);
}

/// Efficiency of the biased hitting scheme relative to the best unbiased one:
/// (4 cosh^2 x - 1) / (3 cosh(x)^{2/(2-b)} cosh((b-1)x)^{-2/(2-b)}).
/// Equals 1 at x = 0 and tends to 1/3 as x grows when beta is in (1, 2).
template <class Scalar>
Scalar efficiency_factor(Scalar x, Scalar beta) {
  using std::abs;
  using std::cosh;
  using std::exp;
  using std::log;
  using std::pow;
  if (beta == Scalar(2)) throw std::domain_error("efficiency_factor: beta = 2 is singular");
  const Scalar p = Scalar(2) / (Scalar(2) - beta);
  if (abs(x) <= Scalar(300)) {
    const Scalar c = cosh(x);
    const Scalar ratio = c / cosh((beta - Scalar(1)) * x);
    return (Scalar(4) * c * c - Scalar(1)) / (Scalar(3) * pow(ratio, p));
  }
  const Scalar lc = detail::log_cosh(x);
  const Scalar lead = log(Scalar(4) - exp(Scalar(-2) * lc));
  return exp(lead + Scalar(2) * lc - p * (lc - detail::log_cosh((beta - Scalar(1)) * x))) /
         Scalar(3);
}

}  // namespace hedgeff
