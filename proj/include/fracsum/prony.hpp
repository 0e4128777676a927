#pragma once

#include "fracsum/expsum.hpp"

#include <cstddef>
#include <vector>

namespace fracsum {

/// K-term replacement for the first L_p terms of an exponential sum.
struct PronyBlock
{
    std::size_t L_p = 0;
    std::size_t K = 0;
    std::vector<double> rho;
    std::vector<double> eta;
    std::vector<double> moments;  ///< g_0 .. g_{2K-1}
};

/// g_j = sum_{l < L_p} w_l b_l^j, j = 0 .. 2K-1. Throws ArityError if
/// 2K - 1 > L_p or L_p exceeds the input length.
std::vector<double> moments(const std::vector<double>& weights,
                            const std::vector<double>& exponents,
                            std::size_t L_p, std::size_t K);

/// Hankel solve, polynomial roots and Vandermonde least squares.
/// Throws SingularHankel, ComplexRoots or PositiveRoot (all PronyRejected).
PronyBlock prony_fit(const std::vector<double>& weights,
                     const std::vector<double>& exponents,
                     std::size_t L_p, std::size_t K);

/// max_t |sum_{l < L_p} w_l e^{b_l t} - sum_k rho_k e^{eta_k t}| / Gamma(1-alpha).
double prony_error(const std::vector<double>& weights,
                   const std::vector<double>& exponents,
                   const PronyBlock& block, double alpha, const EvalGrid& grid);

enum class SearchOrder {
    /// K = 1, 2, ... at L_p = M; the literal order only if that fails.
    MFirst,
    /// Start at (K, L_p) = (1, M), decrement L_p down to 2K-1, then K += 1.
    Literal,
};

struct SearchOptions
{
    SearchOrder order = SearchOrder::MFirst;
};

struct ReductionReport
{
    std::size_t M = 0;
    std::size_t L = 0;
    std::size_t K = 0;
    std::size_t L_p = 0;
    std::size_t L_f = 0;
    double eps_prime = 0.0;      ///< max error before reduction
    double max_err_after = 0.0;
    bool exhausted = false;      ///< no candidate accepted; reduced == original
    PronyBlock block;
    ExpSum original;
    ExpSum reduced;
};

/// Number of nodes with omega <= 0.
std::size_t count_nonpositive_nodes(const ExpSum& es);

/// Replaces the omega <= 0 block of a trapezoidal sum by K Prony terms,
/// accepting the first candidate whose block error is at most the
/// unreduced max error on the grid.
ReductionReport search_reduction(const ExpSum& es, const EvalGrid& grid,
                                 const SearchOptions& opts = {});

/// Builds the sum on [delta/T, 1], reduces it there on the scaled grid and
/// maps the result back to [delta, T]. Errors are reported on the given grid.
ReductionReport reduce_with_rescaling(const KernelSpec& spec, const EvalGrid& grid,
                                      const SearchOptions& opts = {});

} // namespace fracsum
