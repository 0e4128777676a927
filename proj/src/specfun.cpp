#include "fracsum/specfun.hpp"

#include "fracsum/error.hpp"
#include "fracsum/numeric.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace fracsum::specfun {

namespace {

using std::numbers::pi;

// Lanczos coefficients for g = 7, n = 9.
constexpr double lanczos_g = 7.0;
constexpr std::array<double, 9> lanczos_coef = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos(double x)
{
    // Gamma(x) for x >= 0.5
    const double xm1 = x - 1.0;
    double a = lanczos_coef[0];
    for (std::size_t i = 1; i < lanczos_coef.size(); ++i)
        a += lanczos_coef[i] / (xm1 + static_cast<double>(i));
    const double t = xm1 + lanczos_g + 0.5;
    // Split the power to delay overflow for large x.
    const double p = std::pow(t, 0.5 * (xm1 + 0.5));
    return std::sqrt(2.0 * pi) * p * (p * std::exp(-t)) * a;
}

void check_order(double alpha)
{
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw DomainError("mittag_leffler: alpha must lie in (0, 1], got " +
                          std::to_string(alpha));
}

double ml_series(double alpha, double z)
{
    CompensatedSum sum;
    double zk = 1.0;
    for (int k = 0; k < 10000; ++k) {
        const double term = zk / gamma(alpha * k + 1.0);
        sum.add(term);
        // 1/Gamma(alpha k + 1) is decreasing once alpha k + 1 > 2
        if (std::abs(term) < 1e-17 && alpha * k + 1.0 > 2.0)
            return sum.value();
        zk *= z;
    }
    throw NonConvergence("mittag_leffler: Taylor series did not converge");
}

// Returns false if the asymptotic expansion cannot reach round-off before
// its terms begin to grow.
bool ml_asymptotic(double alpha, double s, double& out)
{
    if (std::pow(s, 1.0 / alpha) < 30.0)
        return false;
    // E_alpha(-s) ~ -sum_{k>=1} (-s)^-k / Gamma(1 - alpha k)
    //             = -sum (-s)^-k Gamma(alpha k) sin(pi alpha k) / pi
    CompensatedSum sum;
    double prev_bound = std::numeric_limits<double>::infinity();
    double inv_pow = 1.0;
    for (int k = 1; alpha * k < 170.0; ++k) {
        inv_pow *= -1.0 / s;
        const double g = gamma(alpha * k);
        const double bound = std::abs(inv_pow) * g / pi;
        if (bound > prev_bound)
            return false;
        prev_bound = bound;
        sum.add(-inv_pow * g * std::sin(pi * alpha * k) / pi);
        const double v = std::abs(sum.value());
        if (k > 1 && bound < 1e-17 * std::max(v, 1e-300)) {
            out = sum.value();
            return true;
        }
    }
    return false;
}

double ml_integral(double alpha, double s)
{
    // E_alpha(-s) = int exp(-u) phi(v) dv with u = e^v, r = u / tau,
    // rho = r^alpha and phi = sin(alpha pi)/pi / (rho + 2 cos(alpha pi) + 1/rho).
    const double tau = std::pow(s, 1.0 / alpha);
    const double log_tau = std::log(tau);
    const double sin_a = std::sin(alpha * pi);
    const double cos_a = std::cos(alpha * pi);

    // The integrand is analytic in |Im v| < d; trapezoidal error ~ exp(-2 pi d / h).
    const double d = std::min(pi / 2.0, pi * (1.0 - alpha) / alpha);
    const double step = 2.0 * pi * d / 42.0;
    // Left tail ~ (sin/pi) exp(alpha (v - log tau)) / alpha.
    const double v_lo = log_tau + std::log(1e-18 * alpha * pi / sin_a) / alpha;
    const double v_hi = std::log(50.0);
    const double span = v_hi - v_lo;
    if (!(span / step < 2e6))
        throw NonConvergence("mittag_leffler: quadrature budget exceeded for alpha=" +
                             std::to_string(alpha));
    const auto n = static_cast<long>(std::ceil(span / step));

    CompensatedSum sum;
    for (long i = 0; i <= n; ++i) {
        const double v = v_lo + static_cast<double>(i) * step;
        const double rho = std::exp(alpha * (v - log_tau));
        const double denom = rho + 2.0 * cos_a + 1.0 / rho;
        sum.add(std::exp(-std::exp(v)) / denom);
    }
    return sum.value() * step * sin_a / pi;
}

} // namespace

double gamma(double x)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("gamma: argument must be positive and finite, got " +
                          std::to_string(x));
    if (x < 0.5)
        return lanczos(x + 1.0) / x;
    return lanczos(x);
}

double reflection_coefficient(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("reflection_coefficient: alpha must lie in (0, 1), got " +
                          std::to_string(alpha));
    return std::sin(pi * alpha) / pi;
}

double mittag_leffler(const MLParams& p)
{
    check_order(p.alpha);
    if (!(p.target_abs_tol > 0.0))
        throw DomainError("mittag_leffler: target_abs_tol must be positive");
    if (!(p.z <= 0.0) || !std::isfinite(p.z))
        throw DomainError("mittag_leffler: only finite z <= 0 is supported, got " +
                          std::to_string(p.z));

    if (p.alpha == 1.0)
        return std::exp(p.z);
    if (p.z == 0.0)
        return 1.0;

    const double s = -p.z;
    if (s <= 1.0)
        return ml_series(p.alpha, p.z);

    double value = 0.0;
    if (ml_asymptotic(p.alpha, s, value))
        return value;
    return ml_integral(p.alpha, s);
}

} // namespace fracsum::specfun
