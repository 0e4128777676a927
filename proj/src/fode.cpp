#include "fracsum/fode.hpp"

#include "fracsum/error.hpp"
#include "fracsum/expsum_io.hpp"
#include "fracsum/numeric.hpp"
#include "fracsum/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string>

namespace fracsum {

void FodeProblem::validate() const
{
    if (!rhs)
        throw DomainError("fode: right-hand side is missing");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("fode: alpha must lie in (0, 1)");
    if (!(T > 0.0) || !std::isfinite(T) || !std::isfinite(y0))
        throw DomainError("fode: need finite y0 and T > 0");
}

void SolverOptions::validate() const
{
    if (!(tol > 0.0))
        throw DomainError("solver: tol must be positive");
    if (max_iter < 1)
        throw DomainError("solver: max_iter must be at least 1");
}

double TimeGrid::min_step() const
{
    if (h.size() < 2)
        throw DomainError("time grid has no steps");
    return *std::min_element(h.begin() + 1, h.end());
}

TimeGrid TimeGrid::uniform(double T, std::size_t N)
{
    if (!(T > 0.0) || N < 1)
        throw DomainError("uniform time grid: need T > 0 and N >= 1");
    std::vector<double> t(N + 1);
    const double step = T / static_cast<double>(N);
    for (std::size_t n = 0; n <= N; ++n)
        t[n] = static_cast<double>(n) * step;
    t[N] = T;
    return from_points(std::move(t));
}

TimeGrid TimeGrid::geometric(double first, double growth, std::size_t steps)
{
    if (!(first > 0.0) || !(growth > 0.0) || steps < 1)
        throw DomainError("geometric time grid: need first > 0, growth > 0, steps >= 1");
    std::vector<double> t(steps + 1, 0.0);
    double h = first;
    for (std::size_t n = 1; n <= steps; ++n) {
        t[n] = t[n - 1] + h;
        h *= growth;
    }
    return from_points(std::move(t));
}

TimeGrid TimeGrid::from_points(std::vector<double> t)
{
    if (t.size() < 2 || t.front() != 0.0)
        throw DomainError("time grid must start at 0 and have at least one step");
    TimeGrid g;
    g.h.assign(t.size(), 0.0);
    for (std::size_t n = 1; n < t.size(); ++n) {
        g.h[n] = t[n] - t[n - 1];
        if (!(g.h[n] > 0.0))
            throw DomainError("time grid must be strictly increasing");
    }
    g.t = std::move(t);
    return g;
}

double transition_weight(double w, double b, double t_n, double t_n1, double t_n2,
                         double c_alpha)
{
    const double h_n = t_n - t_n1;
    const double h_n1 = t_n1 - t_n2;
    return c_alpha * w * h_n1 * std::exp(b * h_n) * expm1_ratio(b * h_n1);
}

double transition_weight_gauss3(double w, double b, double t_n, double t_n1, double t_n2,
                                double c_alpha)
{
    static const double node = std::sqrt(0.6);
    static constexpr double wt[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const double mid = 0.5 * (t_n1 + t_n2);
    const double half = 0.5 * (t_n1 - t_n2);
    const double x[3] = {-node, 0.0, node};
    double acc = 0.0;
    for (int i = 0; i < 3; ++i)
        acc += wt[i] * std::exp(b * (t_n - (mid + half * x[i])));
    return c_alpha * w * half * acc;
}

void history_advance_ci(HistoryState& state, const ExpSum& es, double f_prev, double t_n,
                        double t_n1, double t_n2, double c_alpha, TransitionRule rule)
{
    if (state.values.size() != es.size())
        throw ShapeError("history state does not match the exponential sum");
    const double h_n = t_n - t_n1;
    for (std::size_t l = 0; l < es.size(); ++l) {
        const double w = es.weights[l], b = es.exponents[l];
        const double k = rule == TransitionRule::Exact
                             ? transition_weight(w, b, t_n, t_n1, t_n2, c_alpha)
                             : transition_weight_gauss3(w, b, t_n, t_n1, t_n2, c_alpha);
        state.values[l] = k * f_prev + std::exp(b * h_n) * state.values[l];
    }
    ++state.n;
}

double aux_ode_step(double mu_prev, double b, double h_n, double h_n1, double f_n1,
                    double f_n2, Scheme scheme)
{
    switch (scheme) {
    case Scheme::ODE_BE:
        return (mu_prev + h_n * std::exp(b * h_n) * f_n1) / (1.0 - h_n * b);
    case Scheme::ODE_TR:
        return (mu_prev * (1.0 + 0.5 * h_n * b) +
                0.5 * h_n * (std::exp(b * h_n) * f_n1 + std::exp(b * h_n1) * f_n2)) /
               (1.0 - 0.5 * h_n * b);
    case Scheme::CI:
        break;
    }
    throw DomainError("aux_ode_step: scheme must be ODE_BE or ODE_TR");
}

ImplicitResult implicit_solve(const ImplicitStep& ctx, double y_guess, const SolverOptions& opt)
{
    const FodeProblem& p = *ctx.problem;
    const bool newton = opt.implicit == ImplicitMethod::Newton;
    if (newton && !p.rhs_dy)
        throw DomainError("Newton iteration requires df/dy");

    double x = y_guess;
    for (int updates = 1; updates <= opt.max_iter + 1; ++updates) {
        const double fx = p.rhs(ctx.t, x);
        double next = ctx.base + ctx.coef * fx;  // fixed-point update
        if (newton) {
            const double dg = 1.0 - ctx.coef * p.rhs_dy(ctx.t, x);
            if (std::abs(dg) >= 1e-14)
                next = x - (x - next) / dg;
        }
        if (!std::isfinite(next))
            throw ImplicitDivergence(ctx.step, "implicit solve produced a non-finite iterate at step " +
                                                   std::to_string(ctx.step));
        const bool done = std::abs(next - x) < opt.tol;
        x = next;
        if (done)
            return {x, updates - 1};
    }
    throw ImplicitDivergence(ctx.step, "implicit solve did not converge within " +
                                           std::to_string(opt.max_iter) +
                                           " iterations at step " + std::to_string(ctx.step));
}

void check_grid(const FodeProblem& p, const TimeGrid& grid, const ExpSum& es)
{
    p.validate();
    es.validate();
    if (grid.steps() < 1)
        throw DomainError("time grid has no steps");
    if (std::abs(es.alpha - p.alpha) > 1e-14)
        throw DomainError("kernel order differs from the problem order");
    const double end = grid.t.back();
    if (std::abs(end - p.T) > 1e-9 * p.T)
        throw DomainError("time grid must end at T");
    if (grid.min_step() < es.delta * (1.0 - 1e-12))
        throw DomainError("smallest time step " + format_shortest(grid.min_step()) +
                          " is below the kernel's delta " + format_shortest(es.delta));
    if (end > es.T * (1.0 + 1e-12))
        throw DomainError("time grid extends beyond the kernel interval");
}

namespace {

// exp(b_l h) for all l, recomputed only when h changes.
class ExpCache
{
public:
    explicit ExpCache(const std::vector<double>& b) : b_(b), v_(b.size()) {}

    const std::vector<double>& at(double h)
    {
        if (h != h_) {
            for (std::size_t l = 0; l < b_.size(); ++l)
                v_[l] = std::exp(b_[l] * h);
            h_ = h;
        }
        return v_;
    }

private:
    const std::vector<double>& b_;
    std::vector<double> v_;
    double h_ = -1.0;
};

Solution start(const FodeProblem& p, const TimeGrid& grid, const ExpSum& es,
               const SolverOptions& opt)
{
    opt.validate();
    check_grid(p, grid, es);
    Solution sol;
    sol.grid = grid;
    sol.y.assign(grid.t.size(), 0.0);
    sol.iterations.assign(grid.t.size(), 0);
    sol.y[0] = p.y0;
    return sol;
}

} // namespace

Solution solve_ci(const FodeProblem& p, const TimeGrid& grid, const ExpSum& es,
                  const SolverOptions& opt)
{
    if (opt.scheme != Scheme::CI)
        throw DomainError("solve_ci: scheme must be CI");
    Solution sol = start(p, grid, es, opt);
    const std::size_t N = grid.steps();
    const std::size_t L = es.size();
    const double c_alpha = specfun::reflection_coefficient(p.alpha);
    const double g1 = specfun::gamma(p.alpha + 1.0);

    std::vector<double> phi(L, 0.0);
    std::vector<double> kcoef(L, 0.0);
    ExpCache decay(es.exponents);
    double kh_n = -1.0, kh_n1 = -1.0;

    double f_prev = p.rhs(grid.t[0], p.y0);
    for (std::size_t n = 1; n <= N; ++n) {
        const double h_n = grid.h[n];
        if (n >= 2) {
            const double h_n1 = grid.h[n - 1];
            const auto& e = decay.at(h_n);
            if (opt.transition == TransitionRule::Gauss3) {
                for (std::size_t l = 0; l < L; ++l)
                    kcoef[l] = transition_weight_gauss3(es.weights[l], es.exponents[l],
                                                        grid.t[n], grid.t[n - 1],
                                                        grid.t[n - 2], c_alpha);
            } else if (h_n != kh_n || h_n1 != kh_n1) {
                for (std::size_t l = 0; l < L; ++l)
                    kcoef[l] = c_alpha * es.weights[l] * h_n1 * e[l] *
                               expm1_ratio(es.exponents[l] * h_n1);
                kh_n = h_n;
                kh_n1 = h_n1;
            }
            for (std::size_t l = 0; l < L; ++l)
                phi[l] = kcoef[l] * f_prev + e[l] * phi[l];
        }
        CompensatedSum hist;
        for (double v : phi)
            hist.add(v);

        ImplicitStep ctx{&p, grid.t[n], p.y0 + hist.value(), std::pow(h_n, p.alpha) / g1, n};
        const ImplicitResult r = implicit_solve(ctx, sol.y[n - 1], opt);
        sol.y[n] = r.y;
        sol.iterations[n] = r.iters;
        f_prev = p.rhs(grid.t[n], r.y);
    }
    return sol;
}

Solution solve_ode_aux(const FodeProblem& p, const TimeGrid& grid, const ExpSum& es,
                       const SolverOptions& opt)
{
    if (opt.scheme != Scheme::ODE_BE && opt.scheme != Scheme::ODE_TR)
        throw DomainError("solve_ode_aux: scheme must be ODE_BE or ODE_TR");
    Solution sol = start(p, grid, es, opt);
    const std::size_t N = grid.steps();
    const std::size_t L = es.size();
    const double c_alpha = specfun::reflection_coefficient(p.alpha);
    const double g2 = specfun::gamma(p.alpha + 2.0);
    const bool tr = opt.scheme == Scheme::ODE_TR;

    std::vector<double> mu(L, 0.0);
    ExpCache decay_n(es.exponents), decay_n1(es.exponents);

    double f_n1 = p.rhs(grid.t[0], p.y0);  // f_{n-1}
    double f_n2 = f_n1;                    // f_{n-2}
    for (std::size_t n = 1; n <= N; ++n) {
        const double h_n = grid.h[n];
        if (n >= 2) {
            const auto& e_n = decay_n.at(h_n);
            if (tr) {
                const auto& e_n1 = decay_n1.at(grid.h[n - 1]);
                for (std::size_t l = 0; l < L; ++l) {
                    const double b = es.exponents[l];
                    mu[l] = (mu[l] * (1.0 + 0.5 * h_n * b) +
                             0.5 * h_n * (e_n[l] * f_n1 + e_n1[l] * f_n2)) /
                            (1.0 - 0.5 * h_n * b);
                }
            } else {
                for (std::size_t l = 0; l < L; ++l)
                    mu[l] = (mu[l] + h_n * e_n[l] * f_n1) / (1.0 - h_n * es.exponents[l]);
            }
        }
        CompensatedSum hist;
        for (std::size_t l = 0; l < L; ++l)
            hist.add(es.weights[l] * mu[l]);

        const double coef = std::pow(h_n, p.alpha) / g2;
        ImplicitStep ctx{&p, grid.t[n], p.y0 + coef * p.alpha * f_n1 + c_alpha * hist.value(),
                         coef, n};
        const ImplicitResult r = implicit_solve(ctx, sol.y[n - 1], opt);
        sol.y[n] = r.y;
        sol.iterations[n] = r.iters;
        f_n2 = f_n1;
        f_n1 = p.rhs(grid.t[n], r.y);
    }
    return sol;
}

Solution solve(const FodeProblem& p, const TimeGrid& grid, const ExpSum& es,
               const SolverOptions& opt)
{
    if (opt.scheme == Scheme::CI)
        return solve_ci(p, grid, es, opt);
    return solve_ode_aux(p, grid, es, opt);
}

void write_solution_csv(std::ostream& os, const Solution& sol,
                        const std::function<double(double)>& reference)
{
    os << (reference ? "t,y,abs_error\n" : "t,y\n");
    for (std::size_t n = 0; n < sol.y.size(); ++n) {
        const double t = sol.grid.t[n];
        os << format_shortest(t) << ',' << format_shortest(sol.y[n]);
        if (reference)
            os << ',' << format_shortest(std::abs(reference(t) - sol.y[n]));
        os << '\n';
    }
}

void save_solution_csv(const std::filesystem::path& path, const Solution& sol,
                       const std::function<double(double)>& reference)
{
    std::ofstream os(path);
    if (!os)
        throw IoError("cannot open '" + path.string() + "' for writing");
    write_solution_csv(os, sol, reference);
    if (!os)
        throw IoError("write to '" + path.string() + "' failed");
}

} // namespace fracsum
