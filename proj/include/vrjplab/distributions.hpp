// Exact samplers and distribution functions for the laws used throughout:
// Gamma, inverse Gaussian, the index-1/2 generalized inverse Gaussian, and
// the special functions backing the statistical tests (regularized incomplete
// gamma, normal CDF, inverse-Gaussian CDF).
#pragma once

#include "vrjplab/rng.hpp"

namespace vrjplab {

// ---- samplers -------------------------------------------------------------

// Gamma(shape, rate) via Marsaglia & Tsang's squeeze method; shapes < 1 use
// the standard U^(1/shape) boost.
double sample_gamma(double shape, double rate, Rng& rng);

// Inverse Gaussian IG(mu, lambda) via the Michael-Schucany-Haas two-root
// method, with the smaller root computed in a cancellation-free form.
double sample_inverse_gaussian(double mu, double lambda, Rng& rng);

// ---- distribution functions -------------------------------------------------

// Standard normal CDF (erfc-based; accurate in both tails).
double norm_cdf(double x);

// Regularized lower/upper incomplete gamma P(a,x), Q(a,x) = 1-P(a,x),
// evaluated by series / continued fraction.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Gamma(shape, rate) CDF.
double gamma_cdf(double x, double shape, double rate);

// Inverse Gaussian IG(mu, lambda) CDF.
double inverse_gaussian_cdf(double x, double mu, double lambda);

// Chi-square survival function with df degrees of freedom.
double chi2_sf(double x, double df);

}  // namespace vrjplab
