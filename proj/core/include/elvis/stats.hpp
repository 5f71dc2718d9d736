#pragma once

// Distribution tails needed for significance tests, computed from the
// regularized incomplete beta function.

namespace elvis::stats {

/// I_x(a, b) for a, b > 0 and x in [0, 1], by Lentz's continued fraction
/// (absolute tolerance 1e-15 per step, converged well inside 1e-10).
double incomplete_beta(double a, double b, double x);

/// ln Gamma via the standard library.
double log_beta(double a, double b);

/// P(F > f) for an F(d1, d2) variate. f <= 0 gives 1.
double f_upper_tail(double f, double d1, double d2);

/// Two-sided P(|T| > |t|) for Student's t with df degrees of freedom.
double t_two_sided(double t, double df);

}  // namespace elvis::stats
