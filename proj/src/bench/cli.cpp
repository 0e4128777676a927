#include "fracsum/bench/config.hpp"

#include "fracsum/bench/experiments.hpp"
#include "fracsum/error.hpp"
#include "fracsum/expsum_io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace fracsum::bench {

std::string to_string(Command c)
{
    switch (c) {
    case Command::Kernel: return "kernel";
    case Command::Prony: return "prony";
    case Command::Solve: return "solve";
    case Command::Bench: return "bench";
    }
    return "?";
}

std::string to_string(Scheme s)
{
    switch (s) {
    case Scheme::CI: return "CI";
    case Scheme::ODE_BE: return "BE";
    case Scheme::ODE_TR: return "TR";
    }
    return "?";
}

std::string to_string(MeshKind m)
{
    switch (m) {
    case MeshKind::Uniform: return "uniform";
    case MeshKind::Geometric: return "geometric";
    case MeshKind::KelvinVoigt: return "kelvin_voigt";
    }
    return "?";
}

namespace {

std::string to_string(ImplicitMethod m)
{
    return m == ImplicitMethod::Newton ? "newton" : "fixed_point";
}

std::string to_string(TransitionRule r)
{
    return r == TransitionRule::Exact ? "exact" : "gauss3";
}

std::string to_string(SearchOrder o)
{
    return o == SearchOrder::MFirst ? "m_first" : "literal";
}

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw ConfigError(what);
}

} // namespace

void RunConfig::validate() const
{
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    require(delta > 0.0 && std::isfinite(delta), "delta must be positive");
    require(T >= 0.0 && std::isfinite(T), "T must be positive (or 0 for the default)");
    require(T == 0.0 || delta < T, "delta must be smaller than T");
    require(L >= 2, "L must be at least 2");
    require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
    require(eval_points >= 2, "eval_points must be at least 2");
    require(eval_grid != MeshKind::KelvinVoigt, "eval_grid must be uniform or geometric");
    require(example_id >= 1 && example_id <= 3, "example_id must be 1, 2 or 3");
    require(lambda <= 0.0, "lambda must be non-positive");
    require(c > 0.0 && k > 0.0, "c and k must be positive");
    require(tol > 0.0, "tol must be positive");
    require(max_iter >= 1, "max_iter must be at least 1");
    require(h >= 0.0 && std::isfinite(h), "h must be positive");
    require(h == 0.0 || N == 0, "give either h or N, not both");
    require(grid_kind != MeshKind::Geometric, "grid_kind must be uniform or kelvin_voigt");
    require(h_min_exp >= 0 && h_max_exp <= 30 && h_min_exp <= h_max_exp,
            "need 0 <= h_min_exp <= h_max_exp <= 30");
    require(figure >= 0 && figure <= 9, "figure must be 1..9");
    if (command == Command::Prony)
        require(table == 0 || table == 1 || table == 8 || table == 9 || table == 10,
                "prony tables are 1, 8, 9 and 10");
    else if (command == Command::Bench)
        require(table == 0 || (table >= 2 && table <= 7), "bench tables are 2..7");
    else
        require(table == 0, "--table is only valid for prony and bench");
    require(figure == 0 || command == Command::Bench, "--figure is only valid for bench");
    require(kernel_path.empty() || command == Command::Solve,
            "--kernel_path is only valid for solve");
}

std::string meta_line(const RunConfig& cfg)
{
    std::ostringstream os;
    os << "command=" << to_string(cfg.command) << " alpha=" << format_shortest(cfg.alpha)
       << " delta=" << format_shortest(cfg.delta) << " T=" << format_shortest(cfg.T)
       << " L=" << cfg.L << " epsilon=" << format_shortest(cfg.epsilon)
       << " eval_points=" << cfg.eval_points << " eval_grid=" << to_string(cfg.eval_grid)
       << " search=" << to_string(cfg.search) << " unreduced=" << (cfg.unreduced ? 1 : 0)
       << " example_id=" << cfg.example_id << " lambda=" << format_shortest(cfg.lambda)
       << " c=" << format_shortest(cfg.c) << " k=" << format_shortest(cfg.k)
       << " scheme=" << to_string(cfg.scheme) << " implicit=" << to_string(cfg.implicit)
       << " tol=" << format_shortest(cfg.tol) << " max_iter=" << cfg.max_iter
       << " transition=" << to_string(cfg.transition) << " h=" << format_shortest(cfg.h)
       << " N=" << cfg.N << " grid_kind=" << to_string(cfg.grid_kind)
       << " h_min_exp=" << cfg.h_min_exp << " h_max_exp=" << cfg.h_max_exp
       << " table=" << cfg.table << " figure=" << cfg.figure
       << " output_path=" << cfg.output_path << " kernel_path=" << cfg.kernel_path
       << " kernel_out=" << cfg.kernel_out;
    return os.str();
}

ParseOutcome parse_command_line(int argc, const char* const* argv, std::ostream& out,
                                std::ostream& err)
{
    RunConfig cfg;
    CLI::App app{"Sum-of-exponentials kernels and fast solvers for Caputo fractional ODEs",
                 "fracsum"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_config("--config", "", "Flat 'key = value' file; flags override it");
    app.require_subcommand(1);

    const std::map<std::string, Scheme> schemes{
        {"CI", Scheme::CI}, {"BE", Scheme::ODE_BE}, {"TR", Scheme::ODE_TR}};
    const std::map<std::string, MeshKind> meshes{{"uniform", MeshKind::Uniform},
                                                 {"geometric", MeshKind::Geometric},
                                                 {"kelvin_voigt", MeshKind::KelvinVoigt}};
    const std::map<std::string, ImplicitMethod> implicits{
        {"newton", ImplicitMethod::Newton}, {"fixed_point", ImplicitMethod::FixedPoint}};
    const std::map<std::string, TransitionRule> transitions{
        {"exact", TransitionRule::Exact}, {"gauss3", TransitionRule::Gauss3}};
    const std::map<std::string, SearchOrder> orders{{"m_first", SearchOrder::MFirst},
                                                    {"literal", SearchOrder::Literal}};

    app.add_option("--alpha", cfg.alpha, "Fractional order in (0,1)");
    app.add_option("--delta", cfg.delta, "Left end of the kernel interval");
    app.add_option("--T", cfg.T, "Right end / final time (0: default)");
    app.add_option("--L", cfg.L, "Number of quadrature terms");
    app.add_option("--epsilon", cfg.epsilon, "Truncation threshold");
    app.add_option("--eval_points", cfg.eval_points, "Error grid size");
    app.add_option("--eval_grid", cfg.eval_grid, "Error grid: geometric|uniform")
        ->transform(CLI::CheckedTransformer(meshes, CLI::ignore_case));
    app.add_option("--search", cfg.search, "Prony search order: m_first|literal")
        ->transform(CLI::CheckedTransformer(orders, CLI::ignore_case));
    app.add_flag("--unreduced", cfg.unreduced, "Use the unreduced sum in the solver");
    app.add_option("--example_id,--example", cfg.example_id, "Benchmark problem 1, 2 or 3");
    app.add_option("--lambda", cfg.lambda, "Example 2 coefficient");
    app.add_option("--c", cfg.c, "Example 3 damping");
    app.add_option("--k", cfg.k, "Example 3 stiffness");
    app.add_option("--scheme", cfg.scheme, "CI|BE|TR")
        ->transform(CLI::CheckedTransformer(schemes, CLI::ignore_case));
    app.add_option("--implicit", cfg.implicit, "newton|fixed_point")
        ->transform(CLI::CheckedTransformer(implicits, CLI::ignore_case));
    app.add_option("--tol", cfg.tol, "Implicit iteration tolerance");
    app.add_option("--max_iter", cfg.max_iter, "Implicit iteration budget");
    app.add_option("--transition", cfg.transition, "CI transition weights: exact|gauss3")
        ->transform(CLI::CheckedTransformer(transitions, CLI::ignore_case));
    app.add_option("--h", cfg.h, "Step size for solve");
    app.add_option("--N", cfg.N, "Number of steps for solve");
    app.add_option("--grid_kind", cfg.grid_kind, "Solve mesh: uniform|kelvin_voigt")
        ->transform(CLI::CheckedTransformer(meshes, CLI::ignore_case));
    app.add_option("--h_min_exp", cfg.h_min_exp, "Coarsest sweep step 2^-h_min_exp");
    app.add_option("--h_max_exp", cfg.h_max_exp, "Finest sweep step 2^-h_max_exp");
    app.add_option("--table", cfg.table, "Replicate a table (prony: 1,8,9,10; bench: 2..7)");
    app.add_option("--figure", cfg.figure, "Emit a figure dataset 1..9 (bench)");
    app.add_option("--output_path,--output,-o", cfg.output_path, "Output file (default stdout)");
    app.add_option("--kernel_path,--kernel", cfg.kernel_path, "Load a saved kernel (solve)");
    app.add_option("--kernel_out", cfg.kernel_out, "Save the built kernel (kernel, prony)");

    const std::pair<const char*, const char*> subs[] = {
        {"kernel", "Build a trapezoidal exponential sum and report its error"},
        {"prony", "Reduce a kernel with Prony's method (--table for full tables)"},
        {"solve", "Solve one benchmark problem and write the trajectory"},
        {"bench", "Step-size sweeps with EOC, solver tables and figure data"}};
    for (const auto& [name, desc] : subs)
        app.add_subcommand(name, desc)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return {std::nullopt, app.exit(e, out, err) == 0 ? 0 : 2};
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    cfg.command = sub == "kernel"  ? Command::Kernel
                  : sub == "prony" ? Command::Prony
                  : sub == "solve" ? Command::Solve
                                   : Command::Bench;
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        err << "fracsum: " << e.what() << '\n';
        return {std::nullopt, 2};
    }
    return {cfg, 0};
}

namespace {

EvalGrid eval_grid_for(const RunConfig& cfg, double T)
{
    return cfg.eval_grid == MeshKind::Uniform ? uniform_grid(cfg.delta, T, cfg.eval_points)
                                              : geometric_grid(cfg.delta, T, cfg.eval_points);
}

// Writes to the output path (with a .meta sidecar) or to out.
void deliver(const RunConfig& cfg, const CsvTable& table, std::ostream& out)
{
    if (cfg.output_path.empty())
        write_csv(out, table);
    else
        emit_csv(table, cfg.output_path, meta_line(cfg));
}

int run_kernel(const RunConfig& cfg, std::ostream& out)
{
    const double T = cfg.T > 0.0 ? cfg.T : 1.0;
    const KernelSpec spec{cfg.alpha, cfg.delta, T, cfg.L, cfg.epsilon};
    const TruncationBounds tb = truncation_bounds(spec);
    const ExpSum es = build_trapezoidal_expsum(spec);
    const ErrorReport rep = kernel_error(es, eval_grid_for(cfg, T));
    if (!cfg.kernel_out.empty())
        save_expsum(cfg.kernel_out, es);

    CsvTable t;
    t.header = {"alpha", "delta", "T", "L", "epsilon", "l_min", "l_max", "h_quad", "M",
                "max_abs_error"};
    t.rows.push_back({format_shortest(cfg.alpha), format_shortest(cfg.delta), format_shortest(T),
                      std::to_string(cfg.L), format_shortest(cfg.epsilon),
                      format_shortest(tb.l_min), format_shortest(tb.l_max),
                      format_shortest(tb.h_quad), std::to_string(count_nonpositive_nodes(es)),
                      fmt_sci(rep.max_abs)});
    deliver(cfg, t, out);
    return 0;
}

int run_prony(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    const SearchOptions opts{cfg.search};
    if (cfg.table == 10) {
        deliver(cfg, prony_parameters_csv(cfg.eval_points), out);
        return 0;
    }
    if (cfg.table != 0) {
        deliver(cfg, reduction_csv(cfg.table, reduction_table(cfg.table, cfg.eval_points, opts)),
                out);
        return 0;
    }
    const double T = cfg.T > 0.0 ? cfg.T : 1.0;
    const ReductionReport rep = reduce_with_rescaling({cfg.alpha, cfg.delta, T, cfg.L, cfg.epsilon},
                                                      eval_grid_for(cfg, T), opts);
    if (!cfg.kernel_out.empty())
        save_expsum(cfg.kernel_out, rep.reduced);
    deliver(cfg, reduction_csv(1, {{cfg.alpha, cfg.L, cfg.epsilon, rep}}), out);
    if (rep.exhausted) {
        err << "fracsum: no (K, L_p) candidate met the error budget; sum left unreduced\n";
        return 3;
    }
    return 0;
}

int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    RunConfig c = cfg;
    TimeGrid grid;
    if (cfg.grid_kind == MeshKind::KelvinVoigt) {
        grid = kelvin_voigt_grid();
        c.T = grid.t.back();
    }
    const Example ex = make_example(c);
    const double T = ex.problem.T;
    if (cfg.grid_kind != MeshKind::KelvinVoigt) {
        std::size_t N = cfg.N;
        if (N == 0) {
            const double h = cfg.h > 0.0 ? cfg.h : std::ldexp(1.0, -10);
            N = static_cast<std::size_t>(std::llround(T / h));
            if (N == 0 || std::abs(N * h - T) > 1e-9 * T)
                throw ConfigError("h must divide T");
        }
        grid = TimeGrid::uniform(T, N);
    }

    ExpSum kernel;
    if (!cfg.kernel_path.empty())
        kernel = load_expsum(cfg.kernel_path);
    else
        kernel = solver_kernel(cfg.alpha, cfg.delta, T, cfg.L, cfg.epsilon, cfg.eval_points,
                               cfg.unreduced)
                     .sum;

    SolverOptions opt;
    opt.scheme = cfg.scheme;
    opt.implicit = cfg.implicit;
    opt.tol = cfg.tol;
    opt.max_iter = cfg.max_iter;
    opt.transition = cfg.transition;
    const Solution sol = solve(ex.problem, grid, kernel, opt);

    if (cfg.output_path.empty()) {
        write_solution_csv(out, sol, ex.exact);
    } else {
        save_solution_csv(cfg.output_path, sol, ex.exact);
        std::ofstream ms(cfg.output_path + ".meta");
        ms << meta_line(cfg) << '\n';
        if (!ms)
            throw IoError("cannot write '" + cfg.output_path + ".meta'");
    }
    err << "L_f=" << kernel.size() << " error_at_T=" << fmt_sci(std::abs(ex.exact(T) - sol.y.back()))
        << '\n';
    return 0;
}

int run_bench(const RunConfig& cfg, std::ostream& out)
{
    if (cfg.figure != 0) {
        deliver(cfg, figure_data(cfg.figure, cfg.eval_points), out);
        return 0;
    }
    if (cfg.table != 0) {
        deliver(cfg, solver_table(cfg.table, cfg.eval_points), out);
        return 0;
    }
    if (cfg.example_id == 3 && cfg.grid_kind == MeshKind::KelvinVoigt) {
        deliver(cfg, kelvin_voigt_sweep({16, 32, 64, 128, 256}, {cfg.scheme}, cfg.alpha, cfg.c, cfg.k),
                out);
        return 0;
    }
    const SweepResult res = run_example(cfg);
    deliver(cfg, eoc_table(res.rows), out);
    for (const auto& r : res.rows)
        if (r.failed)
            return 3;
    return 0;
}

} // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    try {
        cfg.validate();
        switch (cfg.command) {
        case Command::Kernel: return run_kernel(cfg, out);
        case Command::Prony: return run_prony(cfg, out, err);
        case Command::Solve: return run_solve(cfg, out, err);
        case Command::Bench: return run_bench(cfg, out);
        }
    } catch (const IoError& e) {
        err << "fracsum: " << e.what() << '\n';
        return 4;
    } catch (const ConfigError& e) {
        err << "fracsum: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        err << "fracsum: " << e.what() << '\n';
        return 2;
    } catch (const InvalidBounds& e) {
        err << "fracsum: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "fracsum: numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 2;
}

} // namespace fracsum::bench
