#pragma once

#include "fracsum/fode.hpp"

#include <functional>
#include <string>

namespace fracsum::bench {

/// A benchmark problem together with its closed-form solution.
struct Example
{
    int id = 0;
    FodeProblem problem;
    std::function<double(double)> exact;
};

/// D^alpha y = 40320/Gamma(9-alpha) t^(8-alpha)
///             - 3 Gamma(5+alpha/2)/Gamma(5-alpha/2) t^(4-alpha/2)
///             + 9/4 Gamma(alpha+1) + (3/2 t^(alpha/2) - t^4)^3 - y^(3/2),
/// y(0) = 0, with y(t) = t^8 - 3 t^(4+alpha/2) + 9/4 t^alpha.
/// Negative y is clamped to 0 inside y^(3/2); clamp_hits counts activations.
Example example1(double alpha, double T = 1.0);

/// D^alpha y = lambda y, y(0) = 1, y(t) = E_alpha(lambda t^alpha); lambda <= 0.
Example example2(double alpha, double lambda = -1.0, double T = 10.0);

/// Fractional Kelvin-Voigt model c D^alpha y + k y = 1, y(0) = 0,
/// y(t) = (1 - E_alpha(-(k/c) t^alpha)) / k.
Example example3(double alpha, double c, double k, double T);

/// Mesh with h_1 = 1e-4, h_j = 1.005 h_{j-1}, 5000 steps.
TimeGrid kelvin_voigt_grid();

/// Number of times the example-1 clamp was hit since the last reset
/// (per thread).
long clamp_hits();
void reset_clamp_hits();

} // namespace fracsum::bench
