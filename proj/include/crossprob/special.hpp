#pragma once

#include <cstdint>

namespace crossprob {

// Log-gamma Stirling remainder: lgamma(k + 1) - (k + 1/2) log k + k - log sqrt(2 pi).
double stirling_error(std::int64_t k);

// x log(x / m) + m - x, accurate when x is close to m.
double deviance_term(double x, double m);

/// log P(Poisson(lambda) = k); -inf when the mass is exactly zero.
/// Saddle-point form, full relative precision for large k and lambda.
double log_poisson_pmf(std::int64_t k, double lambda);

/// log P(Binomial(trials, p) = k).
double log_binomial_pmf(std::int64_t k, std::int64_t trials, double p);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double x, double a, double b);

/// Upper tail 1 - I_x(a, b), evaluated without cancellation.
double regularized_incomplete_beta_complement(double x, double a, double b);

/// Smallest x in [0, 1] with I_x(a, b) >= p, found by a bracketed
/// Newton/bisection iteration (at most 80 steps, relative tolerance 1e-14).
double beta_quantile(double p, double a, double b);

}  // namespace crossprob
