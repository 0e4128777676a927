#include "fracsum/expsum.hpp"

#include "fracsum/error.hpp"
#include "fracsum/numeric.hpp"
#include "fracsum/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fracsum {

namespace {

bool finite_all(std::initializer_list<double> xs)
{
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

double raw_sum(const std::vector<double>& w, const std::vector<double>& b,
               std::size_t count, double t)
{
    CompensatedSum acc;
    for (std::size_t l = 0; l < count; ++l)
        acc.add(w[l] * std::exp(b[l] * t));
    return acc.value();
}

} // namespace

void KernelSpec::validate() const
{
    if (!finite_all({alpha, delta, T, epsilon}))
        throw DomainError("kernel spec: non-finite parameter");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("kernel spec: alpha must lie in (0, 1), got " + std::to_string(alpha));
    if (!(delta > 0.0 && delta < T))
        throw DomainError("kernel spec: need 0 < delta < T");
    if (L < 2)
        throw DomainError("kernel spec: L must be at least 2");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw DomainError("kernel spec: epsilon must lie in (0, 1)");
}

void ExpSum::validate() const
{
    if (exponents.size() != weights.size() || nodes.size() != weights.size())
        throw ShapeError("expsum: weights, exponents and nodes differ in length");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("expsum: alpha must lie in (0, 1)");
    if (!(delta > 0.0 && delta < T))
        throw DomainError("expsum: need 0 < delta < T");
    for (double b : exponents)
        if (!(b < 0.0))
            throw DomainError("expsum: every exponent must be negative");
}

TruncationBounds truncation_bounds(const KernelSpec& spec)
{
    spec.validate();
    const double a1 = 1.0 - spec.alpha;
    TruncationBounds tb;
    tb.l_min = std::min(std::log(spec.epsilon / spec.T),
                        std::log(spec.epsilon * a1) / a1);
    tb.l_max = std::log(-std::log(spec.epsilon) / spec.delta);
    if (!(tb.l_max > tb.l_min))
        throw InvalidBounds("truncation window is empty: l_min=" + std::to_string(tb.l_min) +
                            " l_max=" + std::to_string(tb.l_max));
    tb.h_quad = (tb.l_max - tb.l_min) / static_cast<double>(spec.L - 1);
    return tb;
}

ExpSum build_trapezoidal_expsum(const KernelSpec& spec)
{
    const TruncationBounds tb = truncation_bounds(spec);
    const double a1 = 1.0 - spec.alpha;

    ExpSum es;
    es.alpha = spec.alpha;
    es.delta = spec.delta;
    es.T = spec.T;
    es.epsilon = spec.epsilon;
    es.L = spec.L;
    es.weights.resize(spec.L);
    es.exponents.resize(spec.L);
    es.nodes.resize(spec.L);
    for (std::size_t l = 0; l < spec.L; ++l) {
        const double om = (l + 1 == spec.L)
                              ? tb.l_max
                              : tb.l_min + static_cast<double>(l) * tb.h_quad;
        es.nodes[l] = om;
        es.exponents[l] = -std::exp(om);
        es.weights[l] = tb.h_quad * std::exp(a1 * om);
    }
    es.weights.front() *= 0.5;
    es.weights.back() *= 0.5;
    return es;
}

double partial_sum(const std::vector<double>& w, const std::vector<double>& b,
                   std::size_t count, double alpha, double t)
{
    return raw_sum(w, b, count, t) / specfun::gamma(1.0 - alpha);
}

EvalResult eval_expsum(const ExpSum& es, double t)
{
    EvalResult r;
    r.value = partial_sum(es.weights, es.exponents, es.size(), es.alpha, t);
    const double slack = 1e-12;
    r.extrapolated = t < es.delta * (1.0 - slack) || t > es.T * (1.0 + slack);
    return r;
}

ErrorReport kernel_error(const ExpSum& es, const EvalGrid& grid)
{
    ErrorReport rep;
    rep.grid = grid;
    rep.pointwise.resize(grid.size());
    const double inv_g = 1.0 / specfun::gamma(1.0 - es.alpha);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double t = grid.points[j];
        const double approx = raw_sum(es.weights, es.exponents, es.size(), t) * inv_g;
        rep.pointwise[j] = std::pow(t, es.alpha - 1.0) - approx;
        rep.max_abs = std::max(rep.max_abs, std::abs(rep.pointwise[j]));
    }
    return rep;
}

EvalGrid geometric_grid(double delta, double T, std::size_t N)
{
    if (!(delta > 0.0 && delta < T) || N < 2)
        throw DomainError("geometric_grid: need 0 < delta < T and N >= 2");
    EvalGrid g;
    g.kind = GridKind::Geometric;
    g.points.resize(N);
    const double ratio = T / delta;
    const double denom = static_cast<double>(N - 1);
    for (std::size_t j = 0; j < N; ++j)
        g.points[j] = delta * std::pow(ratio, static_cast<double>(j) / denom);
    g.points.front() = delta;
    g.points.back() = T;
    return g;
}

EvalGrid uniform_grid(double delta, double T, std::size_t N)
{
    if (!(delta > 0.0 && delta < T) || N < 2)
        throw DomainError("uniform_grid: need 0 < delta < T and N >= 2");
    EvalGrid g;
    g.kind = GridKind::Uniform;
    g.points.resize(N);
    const double denom = static_cast<double>(N - 1);
    for (std::size_t j = 0; j < N; ++j)
        g.points[j] = delta + (T - delta) * (static_cast<double>(j) / denom);
    g.points.back() = T;
    return g;
}

ExpSum rescale(const ExpSum& es, double T_new)
{
    if (!(T_new > 0.0) || !std::isfinite(T_new))
        throw DomainError("rescale: target endpoint must be positive");
    if (T_new == es.T)
        return es;
    const double s = T_new / es.T;
    const double wscale = std::pow(s, es.alpha - 1.0);
    const double log_s = std::log(s);

    ExpSum out = es;
    for (std::size_t l = 0; l < es.size(); ++l) {
        out.weights[l] = es.weights[l] * wscale;
        out.exponents[l] = es.exponents[l] / s;
        out.nodes[l] = es.nodes[l] - log_s;
    }
    out.delta = es.delta * s;
    out.T = T_new;
    return out;
}

} // namespace fracsum
