#include "fracsum/bench/experiments.hpp"

#include "fracsum/error.hpp"
#include "fracsum/expsum_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <thread>

namespace fracsum::bench {

namespace {
thread_local bool in_worker = false;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();
} // namespace

unsigned thread_cap()
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FRACSUM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<unsigned>(v);
    }
    return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body)
{
    const std::size_t workers = std::min<std::size_t>(thread_cap(), n);
    if (workers <= 1 || in_worker) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex mtx;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            in_worker = true;
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mtx);
                    if (!first)
                        first = std::current_exception();
                }
            }
        });
    for (auto& th : pool)
        th.join();
    if (first)
        std::rethrow_exception(first);
}

SolverKernel solver_kernel(double alpha, double delta, double T, std::size_t L, double epsilon,
                           std::size_t eval_points, bool unreduced)
{
    const KernelSpec spec{alpha, delta, T, L, epsilon};
    SolverKernel k;
    k.L = L;
    if (unreduced) {
        k.sum = build_trapezoidal_expsum(spec);
    } else {
        ReductionReport rep = reduce_with_rescaling(spec, geometric_grid(delta, T, eval_points));
        k.sum = std::move(rep.reduced);
    }
    k.L_f = k.sum.size();
    return k;
}

Example make_example(const RunConfig& cfg)
{
    switch (cfg.example_id) {
    case 1:
        return example1(cfg.alpha, cfg.T > 0.0 ? cfg.T : 1.0);
    case 2:
        return example2(cfg.alpha, cfg.lambda, cfg.T > 0.0 ? cfg.T : 10.0);
    case 3:
        return example3(cfg.alpha, cfg.c, cfg.k,
                        cfg.T > 0.0 ? cfg.T : kelvin_voigt_grid().t.back());
    default:
        throw ConfigError("example_id must be 1, 2 or 3");
    }
}

std::vector<EocRow> run_sweep(const Example& ex, const ExpSum& kernel, const SolverOptions& opt,
                              int k_min, int k_max)
{
    if (k_min > k_max)
        throw ConfigError("sweep: h_min_exp must not exceed h_max_exp");
    const double T = ex.problem.T;
    const double exact_T = ex.exact(T);
    const auto count = static_cast<std::size_t>(k_max - k_min + 1);
    std::vector<std::pair<double, double>> errs(count);
    parallel_for(count, [&](std::size_t i) {
        const double h = std::ldexp(1.0, -(k_min + static_cast<int>(i)));
        const auto N = static_cast<std::size_t>(std::llround(T / h));
        errs[i] = {h, nan};
        try {
            const Solution sol = solve(ex.problem, TimeGrid::uniform(T, N), kernel, opt);
            errs[i].second = std::abs(exact_T - sol.y.back());
        } catch (const ImplicitDivergence&) {
        }
    });
    return eoc(errs);
}

namespace {

SolverOptions options_from(const RunConfig& cfg)
{
    SolverOptions opt;
    opt.scheme = cfg.scheme;
    opt.implicit = cfg.implicit;
    opt.tol = cfg.tol;
    opt.max_iter = cfg.max_iter;
    opt.transition = cfg.transition;
    return opt;
}

SolverOptions options_for(Scheme s)
{
    SolverOptions opt;
    opt.scheme = s;
    return opt;
}

} // namespace

SweepResult run_example(const RunConfig& cfg)
{
    const Example ex = make_example(cfg);
    const SolverKernel k = solver_kernel(cfg.alpha, cfg.delta, ex.problem.T, cfg.L, cfg.epsilon,
                                         cfg.eval_points, cfg.unreduced);
    SweepResult res;
    res.L = k.L;
    res.L_f = k.L_f;
    res.rows = run_sweep(ex, k.sum, options_from(cfg), cfg.h_min_exp, cfg.h_max_exp);
    return res;
}

KelvinVoigtRun run_kelvin_voigt(double alpha, double c, double k, std::size_t L, Scheme scheme,
                                double delta, double epsilon)
{
    const TimeGrid grid = kelvin_voigt_grid();
    const Example ex = example3(alpha, c, k, grid.t.back());
    const SolverKernel ker = solver_kernel(alpha, delta, grid.t.back(), L, epsilon);
    KelvinVoigtRun run;
    run.L_f = ker.L_f;
    run.solution = solve(ex.problem, grid, ker.sum, options_for(scheme));
    for (std::size_t n = 0; n < grid.t.size(); ++n)
        run.max_error =
            std::max(run.max_error, std::abs(ex.exact(grid.t[n]) - run.solution.y[n]));
    return run;
}

CsvTable kelvin_voigt_sweep(const std::vector<std::size_t>& Ls, const std::vector<Scheme>& schemes,
                            double alpha, double c, double k)
{
    const std::size_t n = Ls.size() * schemes.size();
    std::vector<std::vector<std::string>> rows(n);
    parallel_for(n, [&](std::size_t i) {
        const std::size_t L = Ls[i / schemes.size()];
        const Scheme s = schemes[i % schemes.size()];
        const KelvinVoigtRun r = run_kelvin_voigt(alpha, c, k, L, s);
        rows[i] = {std::to_string(L), std::to_string(r.L_f), to_string(s), fmt_sci(r.max_error)};
    });
    CsvTable t;
    t.header = {"L", "L_f", "scheme", "max_error"};
    t.rows = std::move(rows);
    return t;
}

namespace {

struct AlphaL
{
    double alpha;
    std::size_t L;
};

const std::vector<AlphaL>& kernel_rows()
{
    static const std::vector<AlphaL> rows = {
        {0.1, 32},  {0.1, 64},  {0.1, 128}, {0.1, 256}, {0.5, 32},  {0.5, 64},
        {0.5, 128}, {0.5, 256}, {0.9, 128}, {0.9, 256}, {0.9, 512}, {0.9, 1024}};
    return rows;
}

} // namespace

std::vector<ReductionRow> reduction_table(int id, std::size_t eval_points, const SearchOptions& opts)
{
    struct Job
    {
        double alpha;
        std::size_t L;
        double eps;
        double T;
    };
    std::vector<Job> jobs;
    if (id == 1 || id == 8) {
        const double T = id == 1 ? 1.0 : 1e3;
        for (const auto& r : kernel_rows())
            jobs.push_back({r.alpha, r.L, 1e-10, T});
    } else if (id == 9) {
        for (const AlphaL r : {AlphaL{0.1, 256}, AlphaL{0.5, 256}, AlphaL{0.9, 1024}})
            for (double eps : {1e-10, 1e-11, 1e-12, 1e-13})
                jobs.push_back({r.alpha, r.L, eps, 1e3});
    } else {
        throw ConfigError("reduction tables are 1, 8 and 9");
    }

    const double delta = 1e-2;
    const EvalGrid grid1 = geometric_grid(delta, 1.0, eval_points);
    const EvalGrid grid3 = geometric_grid(delta, 1e3, eval_points);
    std::vector<ReductionRow> rows(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
        const Job& j = jobs[i];
        const KernelSpec spec{j.alpha, delta, j.T, j.L, j.eps};
        rows[i] = {j.alpha, j.L, j.eps,
                   reduce_with_rescaling(spec, j.T == 1.0 ? grid1 : grid3, opts)};
    });
    return rows;
}

CsvTable reduction_csv(int id, const std::vector<ReductionRow>& rows)
{
    CsvTable t;
    if (id == 9)
        t.header = {"alpha", "epsilon", "L", "M", "L_p", "K", "L_f", "err_before", "err_after"};
    else
        t.header = {"alpha", "L", "M", "L_p", "K", "L_f", "err_before", "err_after"};
    for (const auto& r : rows) {
        std::vector<std::string> row = {format_shortest(r.alpha)};
        if (id == 9)
            row.push_back(format_shortest(r.epsilon));
        const auto& rep = r.report;
        for (std::size_t v : {r.L, rep.M, rep.L_p, rep.K, rep.L_f})
            row.push_back(std::to_string(v));
        row.push_back(fmt_sci(rep.eps_prime));
        row.push_back(fmt_sci(rep.max_err_after));
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable prony_parameters_csv(std::size_t eval_points)
{
    struct Interval
    {
        const char* name;
        double delta;
        double T;
    };
    const Interval intervals[] = {{"[1e-2,1]", 1e-2, 1.0}, {"[1e-5,1]", 1e-5, 1.0},
                                  {"[1e-2,1e3]", 1e-2, 1e3}};
    const AlphaL cases[] = {{0.1, 256}, {0.5, 256}, {0.9, 1024}};

    std::vector<std::vector<std::vector<std::string>>> blocks(9);
    parallel_for(9, [&](std::size_t i) {
        const Interval& iv = intervals[i / 3];
        const AlphaL& c = cases[i % 3];
        const ReductionReport rep = reduce_with_rescaling(
            {c.alpha, iv.delta, iv.T, c.L, 1e-10}, geometric_grid(iv.delta, iv.T, eval_points));
        for (std::size_t k = 0; k < rep.block.K; ++k)
            blocks[i].push_back({iv.name, format_shortest(c.alpha), std::to_string(c.L),
                                 std::to_string(k + 1), fmt_sci(rep.block.rho[k]),
                                 fmt_sci(rep.block.eta[k])});
    });
    CsvTable t;
    t.header = {"interval", "alpha", "L", "k", "rho", "eta"};
    for (auto& b : blocks)
        for (auto& r : b)
            t.rows.push_back(std::move(r));
    return t;
}

namespace {

struct SolverTableSpec
{
    int example;
    double alpha;
    std::size_t ci[2];
    std::size_t be[2];
    std::size_t tr[2];
};

SolverTableSpec solver_table_spec(int id)
{
    switch (id) {
    case 2: return {1, 0.1, {64, 128}, {64, 128}, {64, 128}};
    case 3: return {1, 0.5, {64, 128}, {64, 128}, {64, 128}};
    case 4: return {1, 0.9, {128, 256}, {128, 256}, {256, 512}};
    case 5: return {2, 0.1, {64, 128}, {64, 128}, {128, 256}};
    case 6: return {2, 0.5, {64, 128}, {64, 128}, {128, 256}};
    case 7: return {2, 0.9, {256, 512}, {256, 512}, {512, 1024}};
    default: throw ConfigError("solver tables are 2 to 7");
    }
}

} // namespace

CsvTable solver_table(int id, std::size_t eval_points)
{
    const SolverTableSpec spec = solver_table_spec(id);
    const Example ex = spec.example == 1 ? example1(spec.alpha) : example2(spec.alpha);
    const double T = ex.problem.T;

    struct Column
    {
        Scheme scheme;
        std::size_t L;
    };
    std::vector<Column> cols;
    for (std::size_t L : spec.ci)
        cols.push_back({Scheme::CI, L});
    for (std::size_t L : spec.be)
        cols.push_back({Scheme::ODE_BE, L});
    for (std::size_t L : spec.tr)
        cols.push_back({Scheme::ODE_TR, L});

    std::map<std::size_t, SolverKernel> kernels;
    for (const auto& c : cols)
        kernels.emplace(c.L, SolverKernel{});
    std::vector<std::size_t> Ls;
    for (const auto& kv : kernels)
        Ls.push_back(kv.first);
    parallel_for(Ls.size(), [&](std::size_t i) {
        kernels.at(Ls[i]) = solver_kernel(spec.alpha, 1e-5, T, Ls[i], 1e-10, eval_points);
    });

    std::vector<std::vector<EocRow>> results(cols.size());
    parallel_for(cols.size(), [&](std::size_t i) {
        results[i] = run_sweep(ex, kernels.at(cols[i].L).sum, options_for(cols[i].scheme), 2, 10);
    });

    CsvTable t;
    t.header = {"scheme", "L", "L_f", "h", "error", "eoc"};
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const CsvTable part = eoc_table(results[i]);
        for (const auto& r : part.rows)
            t.rows.push_back({to_string(cols[i].scheme), std::to_string(cols[i].L),
                              std::to_string(kernels.at(cols[i].L).L_f), r[0], r[1], r[2]});
    }
    return t;
}

namespace {

void add_series(CsvTable& t, const std::vector<double>& x, const std::vector<double>& v,
                const std::string& name)
{
    for (std::size_t i = 0; i < x.size(); ++i)
        t.rows.push_back({format_shortest(x[i]), fmt_sci(v[i]), name});
}

std::string alpha_tag(double alpha)
{
    return "alpha=" + format_shortest(alpha);
}

// Pointwise |exact - y| along the solution mesh.
std::vector<double> abs_errors(const Solution& sol, const std::vector<double>& exact)
{
    std::vector<double> e(sol.y.size());
    for (std::size_t n = 0; n < e.size(); ++n)
        e[n] = std::abs(exact[n] - sol.y[n]);
    return e;
}

std::vector<double> exact_on(const Example& ex, const TimeGrid& g)
{
    std::vector<double> v(g.t.size());
    parallel_for(v.size(), [&](std::size_t n) { v[n] = ex.exact(g.t[n]); });
    return v;
}

struct Run
{
    double alpha;
    std::size_t L;
    Scheme scheme;
};

// Error curves for the given runs of example 1 or 2 at h = 2^-10.
void error_curves(CsvTable& t, int example, const std::vector<Run>& runs, std::size_t eval_points)
{
    std::map<double, Example> exs;
    std::map<double, TimeGrid> grids;
    std::map<double, std::vector<double>> exact;
    for (const auto& r : runs)
        if (!exs.count(r.alpha)) {
            Example ex = example == 1 ? example1(r.alpha) : example2(r.alpha);
            const TimeGrid g =
                TimeGrid::uniform(ex.problem.T, static_cast<std::size_t>(ex.problem.T * 1024));
            exact[r.alpha] = exact_on(ex, g);
            grids.emplace(r.alpha, g);
            exs.emplace(r.alpha, std::move(ex));
        }

    std::vector<std::vector<double>> curves(runs.size());
    std::vector<std::size_t> lfs(runs.size());
    parallel_for(runs.size(), [&](std::size_t i) {
        const Run& r = runs[i];
        const Example& ex = exs.at(r.alpha);
        const SolverKernel k =
            solver_kernel(r.alpha, 1e-5, ex.problem.T, r.L, 1e-10, eval_points);
        lfs[i] = k.L_f;
        curves[i] = abs_errors(solve(ex.problem, grids.at(r.alpha), k.sum, options_for(r.scheme)),
                               exact.at(r.alpha));
    });
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const Run& r = runs[i];
        add_series(t, grids.at(r.alpha).t, curves[i],
                   alpha_tag(r.alpha) + ",L=" + std::to_string(r.L) + ",L_f=" +
                       std::to_string(lfs[i]) + "," + to_string(r.scheme));
    }
}

const Scheme all_schemes[] = {Scheme::CI, Scheme::ODE_BE, Scheme::ODE_TR};

} // namespace

CsvTable figure_data(int id, std::size_t eval_points)
{
    CsvTable t;
    t.header = {"t", "value", "series"};
    const double eps = 1e-10;

    switch (id) {
    case 1: {
        std::vector<double> a, va, T, vT;
        for (int i = 1; i <= 99; ++i) {
            a.push_back(i / 100.0);
            va.push_back(std::log(eps * (1.0 - a.back())) / (1.0 - a.back()));
        }
        for (int i = 0; i <= 100; ++i) {
            T.push_back(std::pow(10.0, 4.0 * i / 100.0));
            vT.push_back(std::log(eps / T.back()));
        }
        add_series(t, a, va, "ln(eps(1-alpha))/(1-alpha)");
        add_series(t, T, vT, "ln(eps/T)");
        break;
    }
    case 2: {
        std::vector<double> om;
        for (int i = 0; i <= 600; ++i)
            om.push_back(-50.0 + 60.0 * i / 600.0);
        auto curve = [&](double alpha, double tt) {
            std::vector<double> v;
            for (double w : om)
                v.push_back(std::exp((1.0 - alpha) * w - tt * std::exp(w)));
            return v;
        };
        for (double a : {0.1, 0.5, 0.9})
            add_series(t, om, curve(a, 1.0), "t=1," + alpha_tag(a));
        for (double tt : {1e-2, 1e-1, 1.0, 10.0})
            add_series(t, om, curve(0.5, tt), "t=" + format_shortest(tt) + ",alpha=0.5");
        break;
    }
    case 3: {
        for (double a : {0.1, 0.5, 0.9}) {
            const ExpSum es = build_trapezoidal_expsum({a, 1e-2, 1.0, 256, eps});
            std::vector<double> mb(es.size());
            for (std::size_t l = 0; l < es.size(); ++l)
                mb[l] = -es.exponents[l];
            add_series(t, es.nodes, es.weights, "w," + alpha_tag(a));
            add_series(t, es.nodes, mb, "-b," + alpha_tag(a));
        }
        break;
    }
    case 4: {
        const auto rows = reduction_table(1, eval_points);
        const EvalGrid g = geometric_grid(1e-2, 1.0, eval_points);
        for (const auto& r : rows) {
            const std::string tag = alpha_tag(r.alpha) + ",L=" + std::to_string(r.L);
            add_series(t, g.points, kernel_error(r.report.original, g).pointwise, "before," + tag);
            add_series(t, g.points, kernel_error(r.report.reduced, g).pointwise, "after," + tag);
        }
        break;
    }
    case 5:
    case 6: {
        const std::size_t L9 = id == 5 ? 256 : 512;
        std::vector<Run> runs;
        for (const AlphaL c : {AlphaL{0.1, 128}, AlphaL{0.5, 128}, AlphaL{0.9, L9}})
            for (Scheme s : all_schemes)
                runs.push_back({c.alpha, c.L, s});
        error_curves(t, id == 5 ? 1 : 2, runs, eval_points);
        break;
    }
    case 7:
    case 8: {
        std::vector<Run> runs;
        for (Scheme s : all_schemes)
            for (std::size_t L : {32, 64, 128, 256})
                runs.push_back({0.5, L, s});
        error_curves(t, id == 7 ? 1 : 2, runs, eval_points);
        break;
    }
    case 9: {
        const TimeGrid grid = kelvin_voigt_grid();
        const Example ex = example3(0.3, 100.0, 10.0, grid.t.back());
        const std::vector<double> exact = exact_on(ex, grid);
        struct Job
        {
            std::string tag;
            std::size_t L;
            Scheme s;
            bool solution;
        };
        std::vector<Job> jobs;
        for (Scheme s : all_schemes)
            jobs.push_back({"a,L=64," + to_string(s), 64, s, false});
        for (std::size_t L : {16, 32, 64, 128, 256})
            jobs.push_back({"b,TR,L=" + std::to_string(L), L, Scheme::ODE_TR, false});
        for (std::size_t L : {16, 64})
            jobs.push_back({"c,TR,L=" + std::to_string(L), L, Scheme::ODE_TR, true});
        std::vector<std::vector<double>> curves(jobs.size());
        parallel_for(jobs.size(), [&](std::size_t i) {
            const KelvinVoigtRun r = run_kelvin_voigt(0.3, 100.0, 10.0, jobs[i].L, jobs[i].s);
            curves[i] = jobs[i].solution ? r.solution.y : abs_errors(r.solution, exact);
        });
        for (std::size_t i = 0; i < jobs.size(); ++i)
            add_series(t, grid.t, curves[i], jobs[i].tag);
        add_series(t, grid.t, exact, "c,exact");
        break;
    }
    default:
        throw ConfigError("figures are numbered 1 to 9");
    }
    return t;
}

} // namespace fracsum::bench
