#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace fracsum {

/// Kernel compression problem: approximate t^(alpha-1) on [delta, T].
struct KernelSpec
{
    double alpha = 0.5;
    double delta = 1e-2;
    double T = 1.0;
    std::size_t L = 128;
    double epsilon = 1e-10;

    /// Throws DomainError if any invariant is violated.
    void validate() const;
};

struct TruncationBounds
{
    double l_min = 0.0;
    double l_max = 0.0;
    double h_quad = 0.0;
};

/// Present on sums produced by the Prony reduction.
struct ReductionTag
{
    std::size_t K = 0;
    std::size_t L_p = 0;
};

/// Exponential sum (1/Gamma(1-alpha)) sum_l w_l exp(b_l t), valid on
/// [delta, T]. The 1/Gamma(1-alpha) factor is applied at evaluation time;
/// weights hold the raw quadrature weights. nodes[l] = ln(-b_l).
struct ExpSum
{
    std::vector<double> weights;
    std::vector<double> exponents;
    std::vector<double> nodes;
    double alpha = 0.5;
    double delta = 0.0;
    double T = 0.0;
    double epsilon = 0.0;     ///< truncation threshold used to build it
    std::size_t L = 0;        ///< term count of the trapezoidal sum it came from
    std::optional<ReductionTag> reduction;

    std::size_t size() const noexcept { return weights.size(); }

    /// Throws ShapeError or DomainError on broken invariants.
    void validate() const;
};

enum class GridKind { Uniform, Geometric };

struct EvalGrid
{
    std::vector<double> points;
    GridKind kind = GridKind::Geometric;

    std::size_t size() const noexcept { return points.size(); }
};

struct ErrorReport
{
    EvalGrid grid;
    std::vector<double> pointwise;  ///< t^(alpha-1) - f(t, theta)
    double max_abs = 0.0;
};

struct EvalResult
{
    double value = 0.0;
    bool extrapolated = false;  ///< t outside [delta, T]
};

TruncationBounds truncation_bounds(const KernelSpec& spec);

ExpSum build_trapezoidal_expsum(const KernelSpec& spec);

/// Compensated sum over all terms; never throws for t >= 0.
EvalResult eval_expsum(const ExpSum& es, double t);

/// (1/Gamma(1-alpha)) sum_{l < count} w_l exp(b_l t) without the range check.
double partial_sum(const std::vector<double>& w, const std::vector<double>& b,
                   std::size_t count, double alpha, double t);

ErrorReport kernel_error(const ExpSum& es, const EvalGrid& grid);

/// t_j = delta (T/delta)^(j/(N-1)); both endpoints are exact.
EvalGrid geometric_grid(double delta, double T, std::size_t N);
EvalGrid uniform_grid(double delta, double T, std::size_t N);

/// Maps a sum valid on [delta, T] to [delta s, T_new] with s = T_new / T:
/// w <- s^(alpha-1) w, b <- b / s. With T_new = 1 this is the normalisation
/// w~ = T^(1-alpha) w, b~ = T b; applying it with the original T undoes it.
ExpSum rescale(const ExpSum& es, double T_new);

} // namespace fracsum
