#include "fracsum/bench/examples.hpp"

#include "fracsum/error.hpp"
#include "fracsum/specfun.hpp"

#include <cmath>

namespace fracsum::bench {

namespace {
thread_local long clamp_counter = 0;
}

long clamp_hits()
{
    return clamp_counter;
}

void reset_clamp_hits()
{
    clamp_counter = 0;
}

Example example1(double alpha, double T)
{
    using specfun::gamma;
    const double c1 = 40320.0 / gamma(9.0 - alpha);
    const double c2 = 3.0 * gamma(5.0 + alpha / 2.0) / gamma(5.0 - alpha / 2.0);
    const double c3 = 2.25 * gamma(alpha + 1.0);

    Example ex;
    ex.id = 1;
    ex.problem.alpha = alpha;
    ex.problem.T = T;
    ex.problem.y0 = 0.0;
    ex.problem.rhs = [=](double t, double y) {
        if (y < 0.0) {
            ++clamp_counter;
            y = 0.0;
        }
        const double s = 1.5 * std::pow(t, alpha / 2.0) - std::pow(t, 4.0);
        return c1 * std::pow(t, 8.0 - alpha) - c2 * std::pow(t, 4.0 - alpha / 2.0) + c3 +
               s * s * s - y * std::sqrt(y);
    };
    ex.problem.rhs_dy = [](double, double y) { return y > 0.0 ? -1.5 * std::sqrt(y) : 0.0; };
    ex.exact = [=](double t) {
        return std::pow(t, 8.0) - 3.0 * std::pow(t, 4.0 + alpha / 2.0) +
               2.25 * std::pow(t, alpha);
    };
    return ex;
}

Example example2(double alpha, double lambda, double T)
{
    if (!(lambda <= 0.0))
        throw DomainError("example 2: lambda must be non-positive");
    Example ex;
    ex.id = 2;
    ex.problem.alpha = alpha;
    ex.problem.T = T;
    ex.problem.y0 = 1.0;
    ex.problem.rhs = [=](double, double y) { return lambda * y; };
    ex.problem.rhs_dy = [=](double, double) { return lambda; };
    ex.exact = [=](double t) {
        return specfun::mittag_leffler(alpha, lambda * std::pow(t, alpha));
    };
    return ex;
}

Example example3(double alpha, double c, double k, double T)
{
    if (!(c > 0.0) || !(k > 0.0))
        throw DomainError("example 3: c and k must be positive");
    Example ex;
    ex.id = 3;
    ex.problem.alpha = alpha;
    ex.problem.T = T;
    ex.problem.y0 = 0.0;
    ex.problem.rhs = [=](double, double y) { return (1.0 - k * y) / c; };
    ex.problem.rhs_dy = [=](double, double) { return -k / c; };
    ex.exact = [=](double t) {
        return (1.0 - specfun::mittag_leffler(alpha, -(k / c) * std::pow(t, alpha))) / k;
    };
    return ex;
}

TimeGrid kelvin_voigt_grid()
{
    return TimeGrid::geometric(1e-4, 1.005, 5000);
}

} // namespace fracsum::bench
