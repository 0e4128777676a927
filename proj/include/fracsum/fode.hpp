#pragma once

#include "fracsum/expsum.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

namespace fracsum {

/// Caputo problem D^alpha y = f(t, y), y(0) = y0 on [0, T].
struct FodeProblem
{
    std::function<double(double, double)> rhs;
    std::function<double(double, double)> rhs_dy;  ///< df/dy, needed for Newton
    double y0 = 0.0;
    double alpha = 0.5;
    double T = 1.0;

    void validate() const;
};

/// Mesh 0 = t_0 < t_1 < ... < t_N = T with steps h_j = t_j - t_{j-1}
/// (h[0] is unused and set to 0).
struct TimeGrid
{
    std::vector<double> t;
    std::vector<double> h;

    std::size_t steps() const noexcept { return t.empty() ? 0 : t.size() - 1; }
    double min_step() const;

    static TimeGrid uniform(double T, std::size_t N);
    /// h_1 = first, h_j = growth h_{j-1}, `steps` steps.
    static TimeGrid geometric(double first, double growth, std::size_t steps);
    static TimeGrid from_points(std::vector<double> t);
};

enum class Scheme { CI, ODE_BE, ODE_TR };
enum class ImplicitMethod { Newton, FixedPoint };
enum class TransitionRule { Exact, Gauss3 };

struct SolverOptions
{
    Scheme scheme = Scheme::ODE_TR;
    ImplicitMethod implicit = ImplicitMethod::Newton;
    double tol = 1e-10;
    int max_iter = 50;
    /// CI only: how K_{l,n,n-1} is obtained.
    TransitionRule transition = TransitionRule::Exact;

    void validate() const;
};

/// Per-exponent history: Phi for CI, mu for the auxiliary-ODE schemes.
struct HistoryState
{
    std::vector<double> values;
    std::size_t n = 1;  ///< step the values belong to

    explicit HistoryState(std::size_t terms = 0) : values(terms, 0.0) {}
};

struct Solution
{
    TimeGrid grid;
    std::vector<double> y;
    std::vector<int> iterations;  ///< per step; iterations[0] = 0
};

/// K_{l,n,n-1} = c_alpha w int_{t_{n-2}}^{t_{n-1}} exp(b (t_n - tau)) dtau in the
/// cancellation-free form c_alpha w h_{n-1} e^{b h_n} expm1(b h_{n-1}) / (b h_{n-1}).
double transition_weight(double w, double b, double t_n, double t_n1, double t_n2,
                         double c_alpha);

/// Same integral by 3-point Gauss-Legendre quadrature.
double transition_weight_gauss3(double w, double b, double t_n, double t_n1, double t_n2,
                                double c_alpha);

/// Phi^n = K_{n,n-1} f_{n-1} + e^{b h_n} Phi^{n-1}; advances state.n to n.
void history_advance_ci(HistoryState& state, const ExpSum& es, double f_prev, double t_n,
                        double t_n1, double t_n2, double c_alpha,
                        TransitionRule rule = TransitionRule::Exact);

/// One step of the auxiliary ODE mu' = b mu + e^{b h} f for a single exponent.
double aux_ode_step(double mu_prev, double b, double h_n, double h_n1, double f_n1,
                    double f_n2, Scheme scheme);

/// Residual G(x) = x - base - coef f(t, x) of the implicit step equation.
struct ImplicitStep
{
    const FodeProblem* problem = nullptr;
    double t = 0.0;
    double base = 0.0;
    double coef = 0.0;
    std::size_t step = 0;  ///< for error reporting
};

struct ImplicitResult
{
    double y = 0.0;
    int iters = 0;  ///< updates before the stopping test was met
};

/// Newton (falls back to one fixed-point update when |G'| < 1e-14) or plain
/// fixed-point iteration from y_guess. Stops once two successive iterates
/// differ by less than tol and returns the last one. Throws
/// ImplicitDivergence after max_iter updates or on a non-finite iterate.
ImplicitResult implicit_solve(const ImplicitStep& ctx, double y_guess, const SolverOptions& opt);

/// Throws DomainError if the grid and kernel are incompatible (min h below
/// the kernel's delta, grid beyond its T, order mismatch).
void check_grid(const FodeProblem& p, const TimeGrid& grid, const ExpSum& es);

Solution solve_ci(const FodeProblem& p, const TimeGrid& grid, const ExpSum& es,
                  const SolverOptions& opt);
Solution solve_ode_aux(const FodeProblem& p, const TimeGrid& grid, const ExpSum& es,
                       const SolverOptions& opt);
/// Dispatches on opt.scheme.
Solution solve(const FodeProblem& p, const TimeGrid& grid, const ExpSum& es,
               const SolverOptions& opt);

/// CSV with header t,y or t,y,abs_error when a reference is given.
void write_solution_csv(std::ostream& os, const Solution& sol,
                        const std::function<double(double)>& reference = {});
void save_solution_csv(const std::filesystem::path& path, const Solution& sol,
                       const std::function<double(double)>& reference = {});

} // namespace fracsum
