#include "fracsum/prony.hpp"

#include "fracsum/error.hpp"
#include "fracsum/numeric.hpp"
#include "fracsum/specfun.hpp"

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace fracsum {

namespace {

// Fits run in 50-digit arithmetic: moments of exponents spread over several
// decades span far more than double precision.
using Real = boost::multiprecision::cpp_bin_float_50;
using MatR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VecR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

const Real max_condition{1e30};

void check_arity(std::size_t n_w, std::size_t n_b, std::size_t L_p, std::size_t K)
{
    if (K == 0)
        throw ArityError("moments: K must be at least 1");
    if (2 * K - 1 > L_p)
        throw ArityError("moments: need 2K-1 <= L_p (K=" + std::to_string(K) +
                         ", L_p=" + std::to_string(L_p) + ")");
    if (L_p > n_w || L_p > n_b)
        throw ArityError("moments: L_p exceeds the number of terms");
}

std::vector<Real> moments_mp(const std::vector<double>& weights,
                             const std::vector<double>& exponents, std::size_t L_p,
                             std::size_t K)
{
    check_arity(weights.size(), exponents.size(), L_p, K);
    std::vector<Real> g(2 * K, Real(0));
    for (std::size_t l = 0; l < L_p; ++l) {
        Real p = weights[l];
        const Real b = exponents[l];
        for (std::size_t j = 0; j < 2 * K; ++j) {
            g[j] += p;
            p *= b;
        }
    }
    return g;
}

// Roots of z^K + q_{K-1} z^{K-1} + ... + q_0 as (real, imag) pairs.
std::vector<std::pair<Real, Real>> monic_roots(const VecR& q)
{
    const auto K = q.size();
    std::vector<std::pair<Real, Real>> roots;
    if (K == 1) {
        roots.emplace_back(-q(0), Real(0));
    } else if (K == 2) {
        const Real p = q(1), c = q(0);
        const Real disc = p * p - 4 * c;
        if (disc >= 0) {
            // Avoid cancellation between -p and sqrt(disc).
            const Real r = sqrt(disc);
            const Real s = p >= 0 ? Real(-(p + r) / 2) : Real((r - p) / 2);
            if (s == 0) {
                roots.emplace_back(Real(0), Real(0));
                roots.emplace_back(Real(0), Real(0));
            } else {
                roots.emplace_back(s, Real(0));
                roots.emplace_back(Real(c / s), Real(0));
            }
        } else {
            const Real im = sqrt(-disc) / 2;
            roots.emplace_back(Real(-p / 2), im);
            roots.emplace_back(Real(-p / 2), Real(-im));
        }
    } else {
        MatR C = MatR::Zero(K, K);
        for (Eigen::Index i = 1; i < K; ++i)
            C(i, i - 1) = 1;
        for (Eigen::Index i = 0; i < K; ++i)
            C(i, K - 1) = -q(i);
        Eigen::EigenSolver<MatR> es(C, false);
        if (es.info() != Eigen::Success)
            throw ComplexRoots("prony: eigenvalue iteration failed");
        const auto& ev = es.eigenvalues();
        for (Eigen::Index i = 0; i < K; ++i)
            roots.emplace_back(ev(i).real(), ev(i).imag());
    }
    return roots;
}

} // namespace

std::vector<double> moments(const std::vector<double>& weights,
                            const std::vector<double>& exponents,
                            std::size_t L_p, std::size_t K)
{
    const auto g = moments_mp(weights, exponents, L_p, K);
    std::vector<double> out;
    out.reserve(g.size());
    for (const auto& x : g)
        out.push_back(static_cast<double>(x));
    return out;
}

PronyBlock prony_fit(const std::vector<double>& weights,
                     const std::vector<double>& exponents,
                     std::size_t L_p, std::size_t K)
{
    PronyBlock blk;
    blk.L_p = L_p;
    blk.K = K;
    const auto g = moments_mp(weights, exponents, L_p, K);
    for (const auto& x : g)
        blk.moments.push_back(static_cast<double>(x));
    const auto k = static_cast<Eigen::Index>(K);

    MatR H(k, k);
    VecR rhs(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j)
            H(i, j) = g[static_cast<std::size_t>(i + j)];
        rhs(i) = -g[static_cast<std::size_t>(k + i)];
    }
    Eigen::FullPivLU<MatR> lu(H);
    if (!lu.isInvertible())
        throw SingularHankel("prony: Hankel matrix is singular");
    // exact 1-norm condition number; K <= 5 keeps the inverse cheap
    const auto norm1 = [](const MatR& A) { return A.cwiseAbs().colwise().sum().maxCoeff(); };
    const Real rcond = 1 / (norm1(H) * norm1(lu.inverse()));
    if (!(rcond * max_condition >= 1))
        throw SingularHankel("prony: Hankel matrix is numerically singular (rcond=" +
                             std::to_string(static_cast<double>(rcond)) + ")");
    const VecR q = lu.solve(rhs);

    std::vector<Real> eta;
    for (const auto& [re, im] : monic_roots(q)) {
        if (abs(im) > Real(1e-8) * (1 + abs(re)))
            throw ComplexRoots("prony: complex root " + std::to_string(static_cast<double>(re)) +
                               "+" + std::to_string(static_cast<double>(im)) + "i");
        if (!(re < 0))
            throw PositiveRoot("prony: non-negative root " +
                               std::to_string(static_cast<double>(re)));
        eta.push_back(re);
    }
    std::sort(eta.begin(), eta.end());

    MatR V(2 * k, k);
    VecR gv(2 * k);
    for (Eigen::Index c = 0; c < k; ++c) {
        Real p = 1;
        for (Eigen::Index j = 0; j < 2 * k; ++j) {
            V(j, c) = p;
            p *= eta[static_cast<std::size_t>(c)];
        }
    }
    for (Eigen::Index j = 0; j < 2 * k; ++j)
        gv(j) = g[static_cast<std::size_t>(j)];
    const VecR rho = V.colPivHouseholderQr().solve(gv);
    for (Eigen::Index c = 0; c < k; ++c) {
        blk.eta.push_back(static_cast<double>(eta[static_cast<std::size_t>(c)]));
        blk.rho.push_back(static_cast<double>(rho(c)));
    }
    return blk;
}

double prony_error(const std::vector<double>& weights,
                   const std::vector<double>& exponents,
                   const PronyBlock& block, double alpha, const EvalGrid& grid)
{
    if (block.L_p > weights.size() || block.L_p > exponents.size() ||
        block.rho.size() != block.eta.size())
        throw ArityError("prony_error: inconsistent block");
    double worst = 0.0;
    for (double t : grid.points) {
        CompensatedSum acc;
        for (std::size_t l = 0; l < block.L_p; ++l)
            acc.add(weights[l] * std::exp(exponents[l] * t));
        for (std::size_t k = 0; k < block.rho.size(); ++k)
            acc.add(-block.rho[k] * std::exp(block.eta[k] * t));
        worst = std::max(worst, std::abs(acc.value()));
    }
    return worst / specfun::gamma(1.0 - alpha);
}

std::size_t count_nonpositive_nodes(const ExpSum& es)
{
    return static_cast<std::size_t>(
        std::count_if(es.nodes.begin(), es.nodes.end(), [](double w) { return w <= 0.0; }));
}

namespace {

ExpSum assemble(const ExpSum& es, const PronyBlock& blk)
{
    ExpSum out;
    out.alpha = es.alpha;
    out.delta = es.delta;
    out.T = es.T;
    out.epsilon = es.epsilon;
    out.L = es.L;
    out.reduction = ReductionTag{blk.K, blk.L_p};
    for (std::size_t k = 0; k < blk.K; ++k) {
        out.weights.push_back(blk.rho[k]);
        out.exponents.push_back(blk.eta[k]);
        out.nodes.push_back(std::log(-blk.eta[k]));
    }
    for (std::size_t l = blk.L_p; l < es.size(); ++l) {
        out.weights.push_back(es.weights[l]);
        out.exponents.push_back(es.exponents[l]);
        out.nodes.push_back(es.nodes[l]);
    }
    return out;
}

// Returns true and fills blk if (L_p, K) is accepted.
bool try_candidate(const ExpSum& es, const EvalGrid& grid, double budget,
                   std::size_t L_p, std::size_t K, PronyBlock& blk)
{
    try {
        PronyBlock cand = prony_fit(es.weights, es.exponents, L_p, K);
        if (prony_error(es.weights, es.exponents, cand, es.alpha, grid) <= budget) {
            blk = std::move(cand);
            return true;
        }
    } catch (const PronyRejected&) {
    }
    return false;
}

} // namespace

ReductionReport search_reduction(const ExpSum& es, const EvalGrid& grid,
                                 const SearchOptions& opts)
{
    es.validate();
    ReductionReport rep;
    rep.original = es;
    rep.L = es.size();
    rep.M = count_nonpositive_nodes(es);
    rep.eps_prime = kernel_error(es, grid).max_abs;

    const std::size_t M = rep.M;
    bool found = false;
    PronyBlock blk;

    if (opts.order == SearchOrder::MFirst)
        for (std::size_t K = 1; !found && 2 * K - 1 <= M; ++K)
            found = try_candidate(es, grid, rep.eps_prime, M, K, blk);

    for (std::size_t K = 1; !found && 2 * K - 1 <= M; ++K)
        for (std::size_t L_p = M; !found && L_p >= 2 * K - 1; --L_p) {
            if (opts.order == SearchOrder::MFirst && L_p == M)
                continue;  // already tried above
            found = try_candidate(es, grid, rep.eps_prime, L_p, K, blk);
        }

    if (!found) {
        rep.exhausted = true;
        rep.L_f = rep.L;
        rep.reduced = es;
        rep.max_err_after = rep.eps_prime;
        return rep;
    }
    rep.K = blk.K;
    rep.L_p = blk.L_p;
    rep.L_f = blk.K + rep.L - blk.L_p;
    rep.reduced = assemble(es, blk);
    rep.max_err_after = kernel_error(rep.reduced, grid).max_abs;
    rep.block = std::move(blk);
    return rep;
}

ReductionReport reduce_with_rescaling(const KernelSpec& spec, const EvalGrid& grid,
                                      const SearchOptions& opts)
{
    spec.validate();
    if (spec.T == 1.0)
        return search_reduction(build_trapezoidal_expsum(spec), grid, opts);

    KernelSpec unit = spec;
    unit.delta = spec.delta / spec.T;
    unit.T = 1.0;
    const ExpSum es_unit = build_trapezoidal_expsum(unit);

    EvalGrid grid_unit = grid;
    for (double& t : grid_unit.points)
        t /= spec.T;

    ReductionReport rep = search_reduction(es_unit, grid_unit, opts);
    rep.original = rescale(rep.original, spec.T);
    rep.original.delta = spec.delta;
    rep.reduced = rescale(rep.reduced, spec.T);
    rep.reduced.delta = spec.delta;

    const double wscale = std::pow(spec.T, spec.alpha - 1.0);
    for (double& r : rep.block.rho)
        r *= wscale;
    for (double& e : rep.block.eta)
        e /= spec.T;
    rep.block.moments.clear();  // moments refer to the normalised sum

    rep.eps_prime = kernel_error(rep.original, grid).max_abs;
    rep.max_err_after = rep.exhausted ? rep.eps_prime : kernel_error(rep.reduced, grid).max_abs;
    return rep;
}

} // namespace fracsum
