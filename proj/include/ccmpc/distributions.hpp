#pragma once

#include <random>
#include <variant>

#include "ccmpc/types.hpp"

namespace ccmpc {

double normal_pdf(double x);
double normal_cdf(double x);
/// Inverse standard normal CDF, |error| < 1e-15 on (0,1).
double normal_quantile(double p);

/// Analytic scalar laws with closed-form CDF, quantile, density and density
/// derivative; x_star marks the start of the nonincreasing density tail.
struct GaussianLaw {
  double mu = 0, sigma = 1;
};
struct UniformLaw {
  double a = 0, b = 1;
};
struct ShiftedExponentialLaw {
  double rate = 1, shift = 0;
};
struct TruncatedLogNormalLaw {
  double mu = 0, sigma = 1, lo = 0.5, hi = 4.0;
};

using Law = std::variant<GaussianLaw, UniformLaw, ShiftedExponentialLaw, TruncatedLogNormalLaw>;

double law_cdf(const Law& law, double x);
double law_pdf(const Law& law, double x);
double law_pdf_deriv(const Law& law, double x);
double law_quantile(const Law& law, double p);
double law_xstar(const Law& law);
double law_mean(const Law& law);
double law_var(const Law& law);
/// Bounded support [lo, hi]; throws for unbounded laws.
void law_support(const Law& law, double& lo, double& hi);
bool law_bounded(const Law& law);
double law_sample(const Law& law, std::mt19937_64& rng);

}  // namespace ccmpc
