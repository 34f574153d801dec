#include "ccmpc/distributions.hpp"

#include <cmath>

namespace ccmpc {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kSqrt2Pi = 2.5066282746310005024;
}  // namespace

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p outside (0,1)");
  // Acklam's rational approximation, then one Halley refinement.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = normal_cdf(x) - p;
  const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

namespace {

struct TruncLnAux {
  double alpha, beta, D;  // standardized truncation points and mass
};
TruncLnAux aux(const TruncatedLogNormalLaw& l) {
  require(l.lo > 0 && l.hi > l.lo && l.sigma > 0, "TruncatedLogNormalLaw: invalid parameters");
  TruncLnAux x;
  x.alpha = (std::log(l.lo) - l.mu) / l.sigma;
  x.beta = (std::log(l.hi) - l.mu) / l.sigma;
  x.D = normal_cdf(x.beta) - normal_cdf(x.alpha);
  return x;
}

}  // namespace

double law_cdf(const Law& law, double x) {
  return std::visit(
      [x](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, GaussianLaw>) {
          return normal_cdf((x - l.mu) / l.sigma);
        } else if constexpr (std::is_same_v<T, UniformLaw>) {
          if (x <= l.a) return 0.0;
          if (x >= l.b) return 1.0;
          return (x - l.a) / (l.b - l.a);
        } else if constexpr (std::is_same_v<T, ShiftedExponentialLaw>) {
          return x <= l.shift ? 0.0 : 1.0 - std::exp(-l.rate * (x - l.shift));
        } else {
          const auto ax = aux(l);
          if (x <= l.lo) return 0.0;
          if (x >= l.hi) return 1.0;
          return (normal_cdf((std::log(x) - l.mu) / l.sigma) - normal_cdf(ax.alpha)) / ax.D;
        }
      },
      law);
}

double law_pdf(const Law& law, double x) {
  return std::visit(
      [x](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, GaussianLaw>) {
          return normal_pdf((x - l.mu) / l.sigma) / l.sigma;
        } else if constexpr (std::is_same_v<T, UniformLaw>) {
          return (x < l.a || x > l.b) ? 0.0 : 1.0 / (l.b - l.a);
        } else if constexpr (std::is_same_v<T, ShiftedExponentialLaw>) {
          return x < l.shift ? 0.0 : l.rate * std::exp(-l.rate * (x - l.shift));
        } else {
          if (x < l.lo || x > l.hi) return 0.0;
          const auto ax = aux(l);
          return normal_pdf((std::log(x) - l.mu) / l.sigma) / (x * l.sigma * ax.D);
        }
      },
      law);
}

double law_pdf_deriv(const Law& law, double x) {
  return std::visit(
      [&law, x](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, GaussianLaw>) {
          return -(x - l.mu) / (l.sigma * l.sigma) * law_pdf(law, x);
        } else if constexpr (std::is_same_v<T, UniformLaw>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, ShiftedExponentialLaw>) {
          return x < l.shift ? 0.0 : -l.rate * law_pdf(law, x);
        } else {
          if (x < l.lo || x > l.hi) return 0.0;
          const double z = (std::log(x) - l.mu) / l.sigma;
          return law_pdf(law, x) * (-z / (l.sigma * x) - 1.0 / x);
        }
      },
      law);
}

double law_quantile(const Law& law, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("law_quantile: p outside [0,1]");
  return std::visit(
      [p](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, GaussianLaw>) {
          return l.mu + l.sigma * normal_quantile(p);
        } else if constexpr (std::is_same_v<T, UniformLaw>) {
          return l.a + p * (l.b - l.a);
        } else if constexpr (std::is_same_v<T, ShiftedExponentialLaw>) {
          if (p >= 1.0) throw std::domain_error("law_quantile: p == 1 on unbounded law");
          return l.shift - std::log1p(-p) / l.rate;
        } else {
          const auto ax = aux(l);
          if (p <= 0.0) return l.lo;
          if (p >= 1.0) return l.hi;
          return std::exp(l.mu + l.sigma * normal_quantile(normal_cdf(ax.alpha) + p * ax.D));
        }
      },
      law);
}

double law_xstar(const Law& law) {
  return std::visit(
      [](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, GaussianLaw>) {
          return l.mu;
        } else if constexpr (std::is_same_v<T, UniformLaw>) {
          return l.a;
        } else if constexpr (std::is_same_v<T, ShiftedExponentialLaw>) {
          return l.shift;
        } else {
          return std::max(l.lo, std::exp(l.mu - l.sigma * l.sigma));
        }
      },
      law);
}

double law_mean(const Law& law) {
  return std::visit(
      [](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, GaussianLaw>) {
          return l.mu;
        } else if constexpr (std::is_same_v<T, UniformLaw>) {
          return 0.5 * (l.a + l.b);
        } else if constexpr (std::is_same_v<T, ShiftedExponentialLaw>) {
          return l.shift + 1.0 / l.rate;
        } else {
          const auto ax = aux(l);
          return std::exp(l.mu + 0.5 * l.sigma * l.sigma) *
                 (normal_cdf(ax.beta - l.sigma) - normal_cdf(ax.alpha - l.sigma)) / ax.D;
        }
      },
      law);
}

double law_var(const Law& law) {
  return std::visit(
      [&law](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, GaussianLaw>) {
          return l.sigma * l.sigma;
        } else if constexpr (std::is_same_v<T, UniformLaw>) {
          return (l.b - l.a) * (l.b - l.a) / 12.0;
        } else if constexpr (std::is_same_v<T, ShiftedExponentialLaw>) {
          return 1.0 / (l.rate * l.rate);
        } else {
          const auto ax = aux(l);
          const double m1 = law_mean(law);
          const double m2 = std::exp(2.0 * l.mu + 2.0 * l.sigma * l.sigma) *
                            (normal_cdf(ax.beta - 2.0 * l.sigma) - normal_cdf(ax.alpha - 2.0 * l.sigma)) /
                            ax.D;
          return m2 - m1 * m1;
        }
      },
      law);
}

bool law_bounded(const Law& law) {
  return std::holds_alternative<UniformLaw>(law) || std::holds_alternative<TruncatedLogNormalLaw>(law);
}

void law_support(const Law& law, double& lo, double& hi) {
  if (const auto* u = std::get_if<UniformLaw>(&law)) {
    lo = u->a;
    hi = u->b;
  } else if (const auto* t = std::get_if<TruncatedLogNormalLaw>(&law)) {
    lo = t->lo;
    hi = t->hi;
  } else {
    throw std::domain_error("law_support: unbounded law");
  }
}

double law_sample(const Law& law, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(std::numeric_limits<double>::min(), 1.0);
  return std::visit(
      [&](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, GaussianLaw>) {
          std::normal_distribution<double> n(l.mu, l.sigma);
          return n(rng);
        } else if constexpr (std::is_same_v<T, UniformLaw>) {
          std::uniform_real_distribution<double> u(l.a, l.b);
          return u(rng);
        } else {
          return law_quantile(Law(l), u01(rng));
        }
      },
      law);
}

}  // namespace ccmpc
