#include <doctest.h>

#include "fracsum/bench/examples.hpp"
#include "fracsum/error.hpp"
#include "fracsum/fode.hpp"
#include "fracsum/prony.hpp"
#include "fracsum/specfun.hpp"
#include "oracles/history_oracle.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

using namespace fracsum;

namespace {

ExpSum solver_sum(double alpha, std::size_t L, double T, double delta = 1e-5)
{
    const KernelSpec spec{alpha, delta, T, L, 1e-10};
    return reduce_with_rescaling(spec, geometric_grid(delta, T, 1000)).reduced;
}

double final_error(const bench::Example& ex, const ExpSum& es, Scheme scheme, int k)
{
    SolverOptions opt;
    opt.scheme = scheme;
    const double h = std::ldexp(1.0, -k);
    const auto N = static_cast<std::size_t>(std::llround(ex.problem.T / h));
    const Solution sol = solve(ex.problem, TimeGrid::uniform(ex.problem.T, N), es, opt);
    return std::abs(sol.y.back() - ex.exact(ex.problem.T));
}

bool near(double got, double want, double rel)
{
    return std::abs(got - want) <= rel * std::abs(want);
}

FodeProblem constant_one(double alpha, double T)
{
    FodeProblem p;
    p.rhs = [](double, double) { return 1.0; };
    p.rhs_dy = [](double, double) { return 0.0; };
    p.y0 = 0.0;
    p.alpha = alpha;
    p.T = T;
    return p;
}

} // namespace

TEST_CASE("transition weight")
{
    const double e1 = std::exp(-1.0), e2 = std::exp(-2.0);
    CHECK(transition_weight(1.0, -1.0, 2.0, 1.0, 0.0, 1.0) ==
          doctest::Approx(e1 - e2).epsilon(1e-15));
    CHECK(transition_weight(1.0, -1.0, 2.0, 1.0, 0.0, 1.0) == doctest::Approx(0.2325442).epsilon(1e-7));

    // b h -> 0: c w h e^{b h_n}
    const double tiny = transition_weight(2.0, -1e-20, 3.0, 2.5, 2.0, 0.5);
    CHECK(tiny == doctest::Approx(0.5 * 2.0 * 0.5).epsilon(1e-15));

    // naive formula against the stable one
    const double t_n = 1.0, t_n1 = 0.75;
    for (double bh = -10.0; bh <= -1e-4; bh *= 0.8) {
        const double h = 0.25, b = bh / h;
        const double naive = (std::exp(b * (t_n - (t_n1 - h))) - std::exp(b * (t_n - t_n1))) / b;
        const double stable = transition_weight(1.0, b, t_n, t_n1, t_n1 - h, 1.0);
        CAPTURE(bh);
        CHECK(std::abs(stable / naive - 1.0) <= 1e-12);
    }

    // 3-point Gauss is exact to high order for smooth small-|b h| integrands
    CHECK(transition_weight_gauss3(0.7, -1e-3, 5.0, 4.0, 3.5, 0.3) ==
          doctest::Approx(transition_weight(0.7, -1e-3, 5.0, 4.0, 3.5, 0.3)).epsilon(1e-14));
}

TEST_CASE("history recursion equals the direct sum")
{
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> hd(0.01, 0.2), fd(-2.0, 2.0), ld(-8.0, 3.0);
    std::uniform_int_distribution<int> nd(2, 64);
    const double c = specfun::reflection_coefficient(0.4);
    for (int trial = 0; trial < 40; ++trial) {
        const int N = nd(rng);
        std::vector<double> t{0.0};
        for (int j = 0; j < N; ++j)
            t.push_back(t.back() + hd(rng));
        std::vector<double> f(N + 1), fabs_(N + 1);
        for (int j = 0; j <= N; ++j) {
            f[j] = fd(rng);
            fabs_[j] = std::abs(f[j]);
        }

        ExpSum es;
        es.alpha = 0.4;
        for (int l = 0; l < 6; ++l) {
            const double w = ld(rng);
            es.nodes.push_back(w);
            es.exponents.push_back(-std::exp(w));
            es.weights.push_back(std::exp(0.6 * w));
        }

        HistoryState st(es.size());
        CHECK(st.n == 1);
        for (double v : st.values)
            CHECK(v == 0.0);
        for (int n = 2; n <= N; ++n) {
            history_advance_ci(st, es, f[n - 1], t[n], t[n - 1], t[n - 2], c);
            CHECK(st.n == static_cast<std::size_t>(n));
            for (std::size_t l = 0; l < es.size(); ++l) {
                const double want =
                    oracle::direct_history(es.weights[l], es.exponents[l], t, f, n, c);
                // relative to sum |K f|, the scale rounding errors live on
                const double scale =
                    oracle::direct_history(es.weights[l], es.exponents[l], t, fabs_, n, c);
                CAPTURE(trial);
                CAPTURE(n);
                CHECK(std::abs(st.values[l] - want) <= 1e-12 * scale);
            }
        }
    }
}

TEST_CASE("history with constant f on a uniform grid")
{
    const double w = 1.3, b = -0.8, h = 0.1, c = 0.25;
    ExpSum es;
    es.weights = {w};
    es.exponents = {b};
    es.nodes = {std::log(0.8)};
    std::vector<double> t, f(11, 1.0);
    for (int j = 0; j <= 10; ++j)
        t.push_back(j * h);
    HistoryState st(1);
    for (int n = 2; n <= 10; ++n)
        history_advance_ci(st, es, 1.0, t[n], t[n - 1], t[n - 2], c);
    // K e^{bh} ... geometric sum over the n - 1 = 9 past intervals
    const double K = transition_weight(w, b, 2 * h, h, 0.0, c);
    const double q = std::exp(b * h);
    const double closed = K * (1.0 - std::pow(q, 9)) / (1.0 - q);
    CHECK(std::abs(st.values[0] - closed) <= 1e-13 * closed);
    CHECK(std::abs(st.values[0] - oracle::direct_history(w, b, t, f, 10, c)) <= 1e-13 * closed);
}

TEST_CASE("auxiliary ODE step")
{
    CHECK(aux_ode_step(0.0, -3.0, 0.1, 0.1, 0.0, 0.0, Scheme::ODE_BE) == 0.0);
    CHECK(aux_ode_step(0.0, -3.0, 0.1, 0.1, 0.0, 0.0, Scheme::ODE_TR) == 0.0);
    CHECK(aux_ode_step(1.0, -1.0, 0.1, 0.1, 1.0, 0.0, Scheme::ODE_BE) ==
          doctest::Approx(0.9913489).epsilon(1e-7));
    CHECK(aux_ode_step(1.0, -1.0, 0.1, 0.1, 1.0, 0.0, Scheme::ODE_BE) ==
          doctest::Approx((1.0 + 0.1 * std::exp(-0.1)) / 1.1).epsilon(1e-15));

    const double b = -2.0, h = 0.2, h1 = 0.1, f1 = 0.7, f2 = -0.4, mu = 0.3;
    const double tr = (mu * (1 + h * b / 2) + h / 2 * (std::exp(b * h) * f1 + std::exp(b * h1) * f2)) /
                      (1 - h * b / 2);
    CHECK(aux_ode_step(mu, b, h, h1, f1, f2, Scheme::ODE_TR) == doctest::Approx(tr).epsilon(1e-15));

    CHECK(std::abs(aux_ode_step(5.0, -1e300, 0.1, 0.1, 3.0, 0.0, Scheme::ODE_BE)) < 1e-290);

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> lb(-20.0, 10.0), lh(-12.0, 2.0), m(-5.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        const double mp = m(rng);
        const double next = aux_ode_step(mp, -std::exp(lb(rng)), std::exp(lh(rng)), 0.1, 0.0, 0.0,
                                         Scheme::ODE_BE);
        CHECK(std::abs(next) <= std::abs(mp));
    }
    CHECK_THROWS_AS(aux_ode_step(0.0, -1.0, 0.1, 0.1, 0.0, 0.0, Scheme::CI), DomainError);
}

TEST_CASE("first step for a constant right-hand side")
{
    for (double alpha : {0.2, 0.5, 0.8})
        for (Scheme s : {Scheme::CI, Scheme::ODE_BE, Scheme::ODE_TR}) {
            const FodeProblem p = constant_one(alpha, 1.0);
            const ExpSum es = build_trapezoidal_expsum(KernelSpec{alpha, 1e-3, 1.0, 64, 1e-10});
            SolverOptions opt;
            opt.scheme = s;
            const Solution sol = solve(p, TimeGrid::uniform(1.0, 16), es, opt);
            CHECK(sol.y[0] == 0.0);
            CHECK(sol.y[1] == doctest::Approx(std::pow(1.0 / 16, alpha) / specfun::gamma(alpha + 1.0))
                                  .epsilon(1e-14));
        }
}

TEST_CASE("implicit solve")
{
    FodeProblem lin;
    lin.rhs = [](double, double y) { return -3.0 * y; };
    lin.rhs_dy = [](double, double) { return -3.0; };
    lin.alpha = 0.5;
    SolverOptions opt;
    ImplicitStep ctx{&lin, 0.5, 1.0, 0.2, 7};
    const ImplicitResult r = implicit_solve(ctx, 0.3, opt);
    CHECK(r.iters == 1);
    CHECK(r.y == doctest::Approx(1.0 / 1.6).epsilon(1e-14));

    FodeProblem indep = constant_one(0.5, 1.0);
    ImplicitStep ci{&indep, 0.5, 1.0, 0.2, 1};
    CHECK(implicit_solve(ci, 0.0, opt).iters == 1);
    opt.implicit = ImplicitMethod::FixedPoint;
    CHECK(implicit_solve(ci, 0.0, opt).iters == 1);
    CHECK(implicit_solve(ci, 0.0, opt).y == doctest::Approx(1.2));

    // x = 1 + 2x has no attracting fixed point
    FodeProblem bad;
    bad.rhs = [](double, double y) { return y; };
    bad.alpha = 0.5;
    ImplicitStep div{&bad, 0.5, 1.0, 2.0, 4};
    try {
        implicit_solve(div, 0.0, opt);
        FAIL("expected ImplicitDivergence");
    } catch (const ImplicitDivergence& e) {
        CHECK(e.step() == 4);
    }

    // Newton needs df/dy
    opt.implicit = ImplicitMethod::Newton;
    CHECK_THROWS_AS(implicit_solve(div, 0.0, opt), DomainError);

    // zero derivative: falls back to a fixed-point update
    FodeProblem flat;
    flat.rhs = [](double, double y) { return y; };
    flat.rhs_dy = [](double, double) { return 5.0; };
    flat.alpha = 0.5;
    ImplicitStep zd{&flat, 0.5, 1.0, 0.2, 2};
    CHECK(implicit_solve(zd, 0.0, opt).y == doctest::Approx(1.25).epsilon(1e-9));
}

TEST_CASE("Newton and fixed-point iterations agree")
{
    const auto ex = bench::example1(0.5);
    const ExpSum es = solver_sum(0.5, 128, 1.0);
    for (Scheme s : {Scheme::CI, Scheme::ODE_TR}) {
        SolverOptions a, b;
        a.scheme = b.scheme = s;
        b.implicit = ImplicitMethod::FixedPoint;
        const auto grid = TimeGrid::uniform(1.0, 256);
        const Solution na = solve(ex.problem, grid, es, a);
        const Solution fp = solve(ex.problem, grid, es, b);
        for (std::size_t n = 0; n < na.y.size(); ++n)
            CHECK(std::abs(na.y[n] - fp.y[n]) <= 1e-9);
    }
}

TEST_CASE("grid checks")
{
    const FodeProblem p = constant_one(0.5, 1.0);
    const ExpSum es = build_trapezoidal_expsum(KernelSpec{0.5, 1e-3, 1.0, 64, 1e-10});
    SolverOptions opt;
    CHECK_THROWS_AS(solve(p, TimeGrid::uniform(1.0, 2000), es, opt), DomainError);
    CHECK_NOTHROW(solve(p, TimeGrid::uniform(1.0, 1000), es, opt));
    CHECK_THROWS_AS(solve(p, TimeGrid::uniform(0.5, 10), es, opt), DomainError);
    CHECK_THROWS_AS(solve(constant_one(0.3, 1.0), TimeGrid::uniform(1.0, 10), es, opt), DomainError);
    CHECK_THROWS_AS(solve(constant_one(0.5, 2.0), TimeGrid::uniform(2.0, 10), es, opt), DomainError);
    CHECK_THROWS_AS(TimeGrid::from_points({0.0, 0.5, 0.5, 1.0}), DomainError);
    CHECK_THROWS_AS(TimeGrid::from_points({0.1, 0.5}), DomainError);
    SolverOptions bad;
    bad.tol = 0.0;
    CHECK_THROWS_AS(solve(p, TimeGrid::uniform(1.0, 10), es, bad), DomainError);

    const TimeGrid kv = bench::kelvin_voigt_grid();
    CHECK(kv.steps() == 5000);
    CHECK(kv.h[1] == doctest::Approx(1e-4));
    CHECK(kv.min_step() == doctest::Approx(1e-4));
    CHECK(kv.h[2] / kv.h[1] == doctest::Approx(1.005));
}

TEST_CASE("solutions are deterministic")
{
    const auto ex = bench::example2(0.5);
    const ExpSum es = solver_sum(0.5, 128, 10.0);
    SolverOptions opt;
    const auto grid = TimeGrid::uniform(10.0, 640);
    const Solution a = solve(ex.problem, grid, es, opt);
    const Solution b = solve(ex.problem, grid, es, opt);
    REQUIRE(a.y.size() == b.y.size());
    CHECK(std::memcmp(a.y.data(), b.y.data(), a.y.size() * sizeof(double)) == 0);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("final-time errors on the benchmark problems")
{
    const auto ex1 = bench::example1(0.5);
    const ExpSum k1 = solver_sum(0.5, 128, 1.0);
    CHECK(near(final_error(ex1, k1, Scheme::CI, 10), 1.18e-3, 0.05));
    CHECK(near(final_error(ex1, k1, Scheme::ODE_TR, 10), 4.78e-7, 0.05));

    const auto ex2a = bench::example2(0.1);
    CHECK(near(final_error(ex2a, solver_sum(0.1, 128, 10.0), Scheme::CI, 10), 9.24e-7, 0.05));

    const auto ex2b = bench::example2(0.5);
    CHECK(near(final_error(ex2b, solver_sum(0.5, 128, 10.0), Scheme::ODE_BE, 10), 5.39e-6, 0.05));

    const auto ex2c = bench::example2(0.9);
    CHECK(near(final_error(ex2c, solver_sum(0.9, 512, 10.0), Scheme::ODE_TR, 5), 2.47e-7, 0.05));
}

TEST_CASE("observed orders on the relaxation problem")
{
    struct Case
    {
        double alpha;
        Scheme scheme;
        std::size_t L;
        double order;
    };
    const Case cases[] = {
        {0.1, Scheme::ODE_TR, 128, 1.1}, {0.5, Scheme::ODE_TR, 128, 1.5},
        {0.9, Scheme::ODE_TR, 1024, 1.9}, {0.1, Scheme::CI, 128, 1.0},
        {0.5, Scheme::CI, 128, 1.0},     {0.9, Scheme::CI, 512, 1.0},
        {0.1, Scheme::ODE_BE, 128, 1.0}, {0.5, Scheme::ODE_BE, 128, 1.0},
        {0.9, Scheme::ODE_BE, 512, 1.0}};
    for (const Case& c : cases) {
        const auto ex = bench::example2(c.alpha);
        const ExpSum es = solver_sum(c.alpha, c.L, 10.0);
        double prev = final_error(ex, es, c.scheme, 6);
        for (int k = 7; k <= 10; ++k) {
            const double e = final_error(ex, es, c.scheme, k);
            CAPTURE(c.alpha);
            CAPTURE(c.L);
            CAPTURE(k);
            CHECK(std::abs(std::log2(prev / e) - c.order) <= 0.15);
            prev = e;
        }
    }
}

TEST_CASE("relaxation problem at L = 512 saturates at the kernel accuracy")
{
    const auto ex = bench::example2(0.9);
    const ExpSum es = solver_sum(0.9, 512, 10.0);
    CHECK(near(final_error(ex, es, Scheme::ODE_TR, 9), 8.85e-10, 0.05));
    CHECK(near(final_error(ex, es, Scheme::ODE_TR, 10), 9.16e-11, 0.05));
}

TEST_CASE("solution CSV")
{
    const FodeProblem p = constant_one(0.5, 1.0);
    const ExpSum es = build_trapezoidal_expsum(KernelSpec{0.5, 1e-3, 1.0, 64, 1e-10});
    const Solution sol = solve(p, TimeGrid::uniform(1.0, 4), es, SolverOptions{});
    std::ostringstream plain, withref;
    write_solution_csv(plain, sol);
    write_solution_csv(withref, sol, [](double) { return 0.0; });
    CHECK(plain.str().rfind("t,y\n0,0\n0.25,", 0) == 0);
    CHECK(withref.str().rfind("t,y,abs_error\n0,0,0\n", 0) == 0);
    CHECK_THROWS_AS(save_solution_csv("/nonexistent/dir/x.csv", sol), IoError);
}
