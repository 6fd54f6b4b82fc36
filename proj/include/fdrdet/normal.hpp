#pragma once

namespace fdrdet {

/// Standard normal pdf.
double gauss_pdf(double x);

/// Upper-tail probability Q(x) = P(Z > x) for Z ~ N(0,1).
double gauss_upper_tail(double x);

/// Inverse of the upper tail: returns x with Q(x) = u, u in (0,1).
/// Rational approximation refined by a Newton step; absolute error is far
/// below 1e-9 over the whole open interval.
double gauss_upper_tail_inv(double u);

/// Standard normal quantile, Phi^{-1}(u) = -Q^{-1}(u).
double gauss_quantile(double u);

}  // namespace fdrdet
