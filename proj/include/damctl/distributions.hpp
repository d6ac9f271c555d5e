#pragma once

// Service-time laws with closed-form moments, Laplace-Stieltjes transform and
// mixed-Poisson arrival weights.
//
// The weight r_j of a law B at arrival rate lambda is the probability of
// exactly j Poisson(lambda) arrivals during one B-distributed service:
//
//   r_j = int_0^inf exp(-lambda x) (lambda x)^j / j! dB(x),
//
// whose generating function is r(z) = lst(B, lambda - lambda z).  Every
// supported family has either negative-binomial (gamma mixing) or Poisson
// (point mass) weights, or a finite mixture of those.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <variant>
#include <vector>

#include "damctl/errors.hpp"

namespace damctl {

struct Exponential {
  double rate;
};

struct Erlang {
  int shape;
  double rate;
};

struct Gamma {
  double shape;
  double rate;
};

struct Deterministic {
  double duration;
};

struct HyperExponential {
  std::vector<double> weights;
  std::vector<double> rates;
};

namespace detail {

inline constexpr double kWeightSumTolerance = 1e-12;

inline void validate(const Exponential& d) {
  require(d.rate > 0 && std::isfinite(d.rate), "exponential rate must be positive and finite");
}
inline void validate(const Erlang& d) {
  require(d.shape >= 1, "erlang shape must be a positive integer");
  require(d.rate > 0 && std::isfinite(d.rate), "erlang rate must be positive and finite");
}
inline void validate(const Gamma& d) {
  require(d.shape > 0 && std::isfinite(d.shape), "gamma shape must be positive and finite");
  require(d.rate > 0 && std::isfinite(d.rate), "gamma rate must be positive and finite");
}
inline void validate(const Deterministic& d) {
  require(d.duration > 0 && std::isfinite(d.duration),
          "deterministic duration must be positive and finite");
}
inline void validate(const HyperExponential& d) {
  require(!d.weights.empty(), "hyperexponential needs at least one phase");
  require(d.weights.size() == d.rates.size(),
          "hyperexponential weights and rates differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < d.weights.size(); ++i) {
    require(d.weights[i] >= 0 && std::isfinite(d.weights[i]),
            "hyperexponential weights must be nonnegative");
    require(d.rates[i] > 0 && std::isfinite(d.rates[i]),
            "hyperexponential rates must be positive and finite");
    sum += d.weights[i];
  }
  require(std::abs(sum - 1.0) <= kWeightSumTolerance, "hyperexponential weights must sum to 1");
}

}  // namespace detail

/// A service-time law B(x). Constructed only through the validating
/// factories, so every instance satisfies its family's invariants.
class ServiceDistribution {
 public:
  using Variant = std::variant<Exponential, Erlang, Gamma, Deterministic, HyperExponential>;

  static ServiceDistribution exponential(double rate) { return ServiceDistribution(Exponential{rate}); }
  static ServiceDistribution erlang(int shape, double rate) {
    return ServiceDistribution(Erlang{shape, rate});
  }
  static ServiceDistribution gamma(double shape, double rate) {
    return ServiceDistribution(Gamma{shape, rate});
  }
  static ServiceDistribution deterministic(double duration) {
    return ServiceDistribution(Deterministic{duration});
  }
  static ServiceDistribution hyperexponential(std::vector<double> weights, std::vector<double> rates) {
    return ServiceDistribution(HyperExponential{std::move(weights), std::move(rates)});
  }

  template <class Family>
  explicit ServiceDistribution(Family f) : law_(std::move(f)) {
    std::visit([](const auto& x) { detail::validate(x); }, law_);
  }

  const Variant& law() const noexcept { return law_; }

  template <class Family>
  bool holds() const noexcept {
    return std::holds_alternative<Family>(law_);
  }
  template <class Family>
  const Family& as() const {
    return std::get<Family>(law_);
  }

  friend bool operator==(const ServiceDistribution& a, const ServiceDistribution& b) {
    return std::visit(
        [](const auto& x, const auto& y) -> bool {
          using X = std::decay_t<decltype(x)>;
          using Y = std::decay_t<decltype(y)>;
          if constexpr (!std::is_same_v<X, Y>) {
            return false;
          } else if constexpr (std::is_same_v<X, Exponential>) {
            return x.rate == y.rate;
          } else if constexpr (std::is_same_v<X, Erlang> || std::is_same_v<X, Gamma>) {
            return x.shape == y.shape && x.rate == y.rate;
          } else if constexpr (std::is_same_v<X, Deterministic>) {
            return x.duration == y.duration;
          } else {
            return x.weights == y.weights && x.rates == y.rates;
          }
        },
        a.law_, b.law_);
  }

 private:
  Variant law_;
};

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// a (a+1) ... (a+k-1)
inline double rising_factorial(double a, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= a + i;
  return r;
}

}  // namespace detail

/// k-th raw moment E[X^k], k in {1, 2, 3}.
inline double raw_moment(const ServiceDistribution& d, int k) {
  detail::require(k >= 1 && k <= 3, "raw_moment order must be 1, 2 or 3");
  using detail::rising_factorial;
  return std::visit(
      detail::overloaded{
          [k](const Exponential& e) { return rising_factorial(1.0, k) / std::pow(e.rate, k); },
          [k](const Erlang& e) { return rising_factorial(e.shape, k) / std::pow(e.rate, k); },
          [k](const Gamma& g) { return rising_factorial(g.shape, k) / std::pow(g.rate, k); },
          [k](const Deterministic& c) { return std::pow(c.duration, k); },
          [k](const HyperExponential& h) {
            double m = 0.0;
            for (std::size_t i = 0; i < h.weights.size(); ++i)
              m += h.weights[i] * rising_factorial(1.0, k) / std::pow(h.rates[i], k);
            return m;
          }},
      d.law());
}

inline double mean(const ServiceDistribution& d) { return raw_moment(d, 1); }

/// Laplace-Stieltjes transform int exp(-s x) dB(x), s >= 0.
inline double lst(const ServiceDistribution& d, double s) {
  detail::require(s >= 0, "lst argument must be nonnegative");
  return std::visit(
      detail::overloaded{
          [s](const Exponential& e) { return e.rate / (e.rate + s); },
          [s](const Erlang& e) { return std::pow(e.rate / (e.rate + s), e.shape); },
          [s](const Gamma& g) { return std::pow(g.rate / (g.rate + s), g.shape); },
          [s](const Deterministic& c) { return std::exp(-s * c.duration); },
          [s](const HyperExponential& h) {
            double v = 0.0;
            for (std::size_t i = 0; i < h.weights.size(); ++i)
              v += h.weights[i] * h.rates[i] / (h.rates[i] + s);
            return v;
          }},
      d.law());
}

/// d/ds of the transform; lies in [-mean, 0).
inline double lst_derivative(const ServiceDistribution& d, double s) {
  detail::require(s >= 0, "lst_derivative argument must be nonnegative");
  auto gamma_like = [s](double shape, double rate) {
    return -shape / (rate + s) * std::pow(rate / (rate + s), shape);
  };
  return std::visit(
      detail::overloaded{
          [&](const Exponential& e) { return gamma_like(1.0, e.rate); },
          [&](const Erlang& e) { return gamma_like(e.shape, e.rate); },
          [&](const Gamma& g) { return gamma_like(g.shape, g.rate); },
          [s](const Deterministic& c) { return -c.duration * std::exp(-s * c.duration); },
          [s](const HyperExponential& h) {
            double v = 0.0;
            for (std::size_t i = 0; i < h.weights.size(); ++i) {
              const double den = h.rates[i] + s;
              v -= h.weights[i] * h.rates[i] / (den * den);
            }
            return v;
          }},
      d.law());
}

/// Same family rescaled in time so that its mean equals `target_mean`.
inline ServiceDistribution scale_to_mean(const ServiceDistribution& d, double target_mean) {
  detail::require(target_mean > 0 && std::isfinite(target_mean), "target mean must be positive");
  const double f = mean(d) / target_mean;
  return std::visit(
      detail::overloaded{
          [f](const Exponential& e) { return ServiceDistribution::exponential(e.rate * f); },
          [f](const Erlang& e) { return ServiceDistribution::erlang(e.shape, e.rate * f); },
          [f](const Gamma& g) { return ServiceDistribution::gamma(g.shape, g.rate * f); },
          [target_mean](const Deterministic&) { return ServiceDistribution::deterministic(target_mean); },
          [f](const HyperExponential& h) {
            auto rates = h.rates;
            for (auto& r : rates) r *= f;
            return ServiceDistribution::hyperexponential(h.weights, std::move(rates));
          }},
      d.law());
}

namespace detail {

// Below this the multiplicative recursion switches to closed-form log-domain
// evaluation.
inline constexpr double kLogDomainThreshold = 1e-300;

// Weights of a gamma(shape) mixed Poisson, i.e. negative binomial with
// success probability p = rate / (lambda + rate):
//   r_j = Gamma(a + j) / (Gamma(a) j!) p^a (1 - p)^j.
template <class T>
void accumulate_negative_binomial(std::vector<T>& out, const T& weight, double shape, double rate,
                                  double lambda) {
  using std::exp;
  using std::lgamma;
  using std::log;
  const T a = shape;
  const T p = T(rate) / (T(lambda) + T(rate));
  const T q = T(lambda) / (T(lambda) + T(rate));
  const T log_p = log(p);
  const T log_q = log(q);
  const T lgamma_a = lgamma(a);
  auto log_term = [&](std::size_t j) {
    const T jj = static_cast<double>(j);
    return lgamma(a + jj) - lgamma_a - lgamma(jj + 1) + a * log_p + jj * log_q;
  };
  T r = exp(a * log_p);
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (j > 0) {
      if (r >= kLogDomainThreshold) {
        r *= (a + T(static_cast<double>(j - 1))) / T(static_cast<double>(j)) * q;
      }
      if (r < kLogDomainThreshold) r = exp(log_term(j));
    }
    out[j] += weight * r;
  }
}

// Poisson(m) probabilities, m = lambda * duration.
template <class T>
void accumulate_poisson(std::vector<T>& out, const T& weight, double duration, double lambda) {
  using std::exp;
  using std::lgamma;
  using std::log;
  const T m = T(lambda) * T(duration);
  const T log_m = log(m);
  T r = exp(-m);
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (j > 0) {
      if (r >= kLogDomainThreshold) r *= m / T(static_cast<double>(j));
      if (r < kLogDomainThreshold) {
        const T jj = static_cast<double>(j);
        r = exp(-m + jj * log_m - lgamma(jj + 1));
      }
    }
    out[j] += weight * r;
  }
}

}  // namespace detail

/// r_0 .. r_n of `d` at arrival rate `lambda`, evaluated in scalar type T.
template <class T = double>
std::vector<T> mixed_poisson_weights(const ServiceDistribution& d, double lambda, std::size_t n) {
  detail::require(lambda > 0 && std::isfinite(lambda), "arrival rate must be positive");
  std::vector<T> out(n + 1, T(0));
  const T one(1);
  std::visit(detail::overloaded{
                 [&](const Exponential& e) {
                   detail::accumulate_negative_binomial(out, one, 1.0, e.rate, lambda);
                 },
                 [&](const Erlang& e) {
                   detail::accumulate_negative_binomial(out, one, double(e.shape), e.rate, lambda);
                 },
                 [&](const Gamma& g) {
                   detail::accumulate_negative_binomial(out, one, g.shape, g.rate, lambda);
                 },
                 [&](const Deterministic& c) { detail::accumulate_poisson(out, one, c.duration, lambda); },
                 [&](const HyperExponential& h) {
                   for (std::size_t i = 0; i < h.weights.size(); ++i)
                     detail::accumulate_negative_binomial(out, T(h.weights[i]), 1.0, h.rates[i], lambda);
                 }},
             d.law());
  return out;
}

/// Weights r_0 .. r_N with N the first index at which the tail mass
/// 1 - sum_{j<=N} r_j drops below `tail`.  Stops at `max_terms` regardless.
inline std::vector<double> mixed_poisson_weights_to_tail(const ServiceDistribution& d, double lambda,
                                                         double tail = 1e-12,
                                                         std::size_t max_terms = 1u << 22) {
  detail::require(tail > 0, "tail tolerance must be positive");
  // Size the first batch from the mean count, then double until the tail is small.
  const double mean_count = lambda * mean(d);
  std::size_t n = static_cast<std::size_t>(std::ceil(4 * mean_count)) + 64;
  for (;;) {
    auto w = mixed_poisson_weights(d, lambda, n);
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      acc += w[j];
      if (1.0 - acc < tail && double(j) > mean_count) {
        w.resize(j + 1);
        return w;
      }
    }
    if (n >= max_terms) return w;
    n = std::min(max_terms, 2 * n);
  }
}

/// Mean evaluated in scalar type T, from the same parameters the weights use.
template <class T>
T mean_in(const ServiceDistribution& d) {
  return std::visit(detail::overloaded{[](const Exponential& e) { return T(1) / T(e.rate); },
                                       [](const Erlang& e) { return T(e.shape) / T(e.rate); },
                                       [](const Gamma& g) { return T(g.shape) / T(g.rate); },
                                       [](const Deterministic& c) { return T(c.duration); },
                                       [](const HyperExponential& h) {
                                         T m(0);
                                         for (std::size_t i = 0; i < h.weights.size(); ++i)
                                           m += T(h.weights[i]) / T(h.rates[i]);
                                         return m;
                                       }},
                    d.law());
}

/// lambda^k E[X^k] -- the normalized moments rho_1, rho_{1,2}, rho_{1,3}.
inline double normalized_moment(const ServiceDistribution& d, double lambda, int k) {
  return std::pow(lambda, k) * raw_moment(d, k);
}

}  // namespace damctl
