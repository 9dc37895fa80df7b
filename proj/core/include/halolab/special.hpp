#pragma once

namespace halo {

// Standard normal density, CDF and quantile. std_normal_quantile is the
// Acklam rational approximation polished by two Halley steps, good to ~1e-14
// over p in [1e-300, 1 - 1e-16].
double std_normal_pdf(double x);
double std_normal_cdf(double x);
double std_normal_quantile(double p);  // throws ConfigError for p outside (0,1)

// Regularized incomplete gamma functions P(a,x) (lower) and Q(a,x) (upper).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// q(R) = Pr[||Z|| > R] for Z ~ N(0, I_d): the upper chi tail Q(d/2, R^2/2).
double chi_tail(double r, int dim);

// Survival function of a scaled chi variable: Pr[scale * chi_k > x].
double chi_survival(double x, int dof, double scale = 1.0);

// Wilson 95% score interval for a binomial proportion.
struct WilsonInterval {
  double lo = 0.0;
  double hi = 0.0;
  double half_width = 0.0;
};
WilsonInterval wilson95(long successes, long trials);

}  // namespace halo
