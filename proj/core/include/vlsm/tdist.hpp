#pragma once

namespace vlsm {

enum class Tail { kGreater, kTwoSided };

/// Regularized incomplete beta I_x(a, b), evaluated by Lentz's continued
/// fraction (relative tolerance 1e-12, at most 300 iterations). `one_minus_x`
/// is passed separately so callers can avoid cancellation near x = 1.
/// Throws NumericError if the fraction fails to converge.
double incomplete_beta(double a, double b, double x, double one_minus_x);
double incomplete_beta(double a, double b, double x);

/// Upper-tail probability of Student's t with `df` degrees of freedom.
/// kGreater: P(T > t). kTwoSided: P(|T| > |t|).
double t_to_p(double t, int df, Tail tail);

/// Smallest-magnitude t for which t_to_p(t) < p, found by bisection.
/// Used to turn a voxel-wise p-threshold into a t cutoff.
double critical_t(double p, int df, Tail tail);

}  // namespace vlsm
