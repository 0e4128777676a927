#pragma once

namespace fracsum::specfun {

/// Gamma function for positive arguments (Lanczos approximation).
/// Throws DomainError for x <= 0 or non-finite x.
double gamma(double x);

/// c_alpha = sin(pi alpha) / pi = 1 / (Gamma(alpha) Gamma(1 - alpha)).
/// Throws DomainError unless 0 < alpha < 1.
double reflection_coefficient(double alpha);

struct MLParams
{
    double alpha = 0.5;            ///< order, 0 < alpha <= 1
    double z = 0.0;                ///< argument, z <= 0
    double target_abs_tol = 1e-10;
};

/// One-parameter Mittag-Leffler function E_alpha(z) on the non-positive
/// real axis.
///
/// The evaluator switches between three representations:
///   * |z| <= 1: Taylor series sum z^k / Gamma(alpha k + 1);
///   * large |z|: the asymptotic series -sum z^-k / Gamma(1 - alpha k),
///     used only when its terms drop below round-off before they start to
///     grow;
///   * otherwise: E_alpha(-s) = int_0^inf exp(-r s^(1/alpha)) K_alpha(r) dr
///     with the positive spectral density
///     K_alpha(r) = sin(alpha pi) / pi * r^(alpha-1)
///                  / (r^(2 alpha) + 2 r^alpha cos(alpha pi) + 1),
///     discretised by the trapezoidal rule after r = exp(v).
///
/// Absolute accuracy is well below 1e-12 across the supported range, which
/// satisfies any target_abs_tol >= 1e-10. Throws DomainError for invalid
/// parameters and NonConvergence if the quadrature budget is exceeded
/// (only for alpha extremely close to 1).
double mittag_leffler(const MLParams& p);

/// Convenience overload.
inline double mittag_leffler(double alpha, double z)
{
    return mittag_leffler(MLParams{alpha, z, 1e-10});
}

} // namespace fracsum::specfun
