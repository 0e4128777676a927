#include <doctest.h>

#include "fracsum/bench/config.hpp"
#include "fracsum/bench/examples.hpp"
#include "fracsum/bench/experiments.hpp"
#include "fracsum/bench/report.hpp"
#include "fracsum/error.hpp"
#include "fracsum/expsum_io.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace fracsum;
using namespace fracsum::bench;

namespace {

struct CliResult
{
    int code = 0;
    std::string out;
    std::string err;
};

// Parses and runs in-process, like main() does.
CliResult cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "fracsum");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliResult r;
    const ParseOutcome p = parse_command_line(static_cast<int>(argv.size()), argv.data(), out, err);
    r.code = p.config ? run(*p.config, out, err) : p.exit_code;
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path temp_path(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("fracsum_test_" + name);
}

} // namespace

TEST_CASE("observed order")
{
    const auto rows = eoc({{0.5, 1e-2}, {0.25, 2.5e-3}});
    REQUIRE(rows.size() == 2);
    CHECK_FALSE(rows[0].eoc.has_value());
    REQUIRE(rows[1].eoc.has_value());
    CHECK(*rows[1].eoc == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_FALSE(rows[1].marker);

    const auto grew = eoc({{0.5, 1e-4}, {0.25, 2e-4}});
    CHECK(grew[1].marker);

    // saturation: a tiny decrease is a small order, not a marker
    const auto flat = eoc({{0.5, 1.1008e-4}, {0.25, 1.1000e-4}});
    CHECK_FALSE(flat[1].marker);
    CHECK(*flat[1].eoc == doctest::Approx(0.001).epsilon(0.1));

    CHECK_THROWS_AS(eoc({{0.5, 1e-2}, {0.2, 1e-3}}), ShapeError);

    const auto failed = eoc({{0.5, 1e-2}, {0.25, std::nan("")}, {0.125, 1e-3}});
    CHECK(failed[1].failed);
}

TEST_CASE("CSV rendering")
{
    const auto rows = eoc({{0.25, 3.34e-2}});
    std::ostringstream os;
    write_csv(os, eoc_table(rows));
    CHECK(os.str() == "h,error,eoc\n0.25,3.340000e-02,\n");

    std::ostringstream two;
    write_csv(two, eoc_table(eoc({{0.5, 1e-2}, {0.25, 2.5e-3}, {0.125, 5e-3}})));
    CHECK(two.str() == "h,error,eoc\n0.5,1.000000e-02,\n0.25,2.500000e-03,2.00\n"
                       "0.125,5.000000e-03,***\n");

    std::ostringstream empty;
    write_csv(empty, eoc_table({}));
    CHECK(empty.str() == "h,error,eoc\n");

    CsvTable quoted{{"a", "b"}, {{"x,y", "say \"hi\""}}};
    std::ostringstream q;
    write_csv(q, quoted);
    CHECK(q.str() == "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");

    CHECK(fmt_sci(1.0) == "1.000000e+00");
    CHECK(fmt_fixed2(1.005) == "1.00");
}

TEST_CASE("CSV files and sidecar")
{
    const auto path = temp_path("table.csv");
    emit_csv(eoc_table({}), path, "alpha=0.5");
    CHECK(slurp(path) == "h,error,eoc\n");
    CHECK(slurp(path.string() + ".meta") == "alpha=0.5\n");
    std::filesystem::remove(path);
    std::filesystem::remove(path.string() + ".meta");

    CHECK_THROWS_AS(emit_csv(eoc_table({}), "/nonexistent/dir/t.csv"), IoError);
    try {
        emit_csv(eoc_table({}), "/nonexistent/dir/t.csv");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/dir/t.csv") != std::string::npos);
    }
}

TEST_CASE("benchmark problems")
{
    for (double a : {0.1, 0.5, 0.9}) {
        const Example e1 = example1(a);
        CHECK(e1.exact(1.0) == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(e1.exact(0.0) == 0.0);
        // exact solution satisfies the equation's right-hand side at y = y(t)
        CHECK(std::isfinite(e1.problem.rhs(0.5, e1.exact(0.5))));
    }
    const Example e2 = example2(0.5);
    CHECK(e2.exact(0.0) == 1.0);
    CHECK(e2.exact(1.0) == doctest::Approx(0.4275835761558070).epsilon(1e-14));
    CHECK(e2.problem.rhs(0.0, 2.0) == -2.0);

    const Example e3 = example3(0.3, 100.0, 10.0, 1e12);
    CHECK(e3.exact(0.0) == 0.0);
    CHECK(e3.exact(1e12) == doctest::Approx(0.1).epsilon(1e-3));
    CHECK(e3.exact(1e3) < 0.1);
}

TEST_CASE("example 1 clamp never activates for h <= 2^-4")
{
    for (double a : {0.1, 0.5, 0.9}) {
        const Example ex = example1(a);
        const SolverKernel k = solver_kernel(a, 1e-5, 1.0, 128, 1e-10);
        for (Scheme s : {Scheme::CI, Scheme::ODE_BE, Scheme::ODE_TR})
            for (int kexp = 4; kexp <= 8; ++kexp) {
                SolverOptions opt;
                opt.scheme = s;
                reset_clamp_hits();
                solve(ex.problem, TimeGrid::uniform(1.0, std::size_t{1} << kexp), k.sum, opt);
                CAPTURE(a);
                CAPTURE(kexp);
                CHECK(clamp_hits() == 0);
            }
    }
}

TEST_CASE("example 1 sweep entry")
{
    RunConfig cfg;
    cfg.example_id = 1;
    cfg.alpha = 0.9;
    cfg.L = 512;
    cfg.scheme = Scheme::ODE_TR;
    const SweepResult r = run_example(cfg);
    REQUIRE(r.rows.size() == 9);
    CHECK(r.rows.front().h == 0.25);
    CHECK(r.rows.back().h == std::ldexp(1.0, -10));
    CHECK(r.rows.back().error == doctest::Approx(1.04e-6).epsilon(0.05));
    CHECK(*r.rows.back().eoc == doctest::Approx(2.01).epsilon(0.02));
}

TEST_CASE("kernel command")
{
    const CliResult r = cli({"kernel", "--alpha", "0.5", "--delta", "1e-2", "--T", "1"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("alpha,delta,T,L,epsilon,l_min,l_max,h_quad,M,max_abs_error\n", 0) == 0);

    const auto kpath = temp_path("kernel.txt");
    const CliResult s = cli({"prony", "--alpha", "0.5", "--delta", "1e-2", "--T", "1e3", "--L",
                             "256", "--kernel_out", kpath.string()});
    CHECK(s.code == 0);
    const ExpSum es = load_expsum(kpath);
    REQUIRE(es.reduction.has_value());
    CHECK(es.reduction->K == 4);
    CHECK(es.size() == 65);
    std::filesystem::remove(kpath);
}

TEST_CASE("reduction table command")
{
    const CliResult r = cli({"prony", "--table", "1"});
    CHECK(r.code == 0);
    std::istringstream in(r.out);
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    CHECK(header == "alpha,L,M,L_p,K,L_f,err_before,err_after");
    CHECK(first.rfind("0.1,32,24,24,1,9,5.10246", 0) == 0);
}

TEST_CASE("identical configurations give identical bytes")
{
    const std::vector<std::string> args{"bench", "--example", "2", "--alpha", "0.5",
                                        "--scheme", "BE", "--h_max_exp", "7"};
    const CliResult a = cli(args);
    const CliResult b = cli(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("h,error,eoc\n0.25,", 0) == 0);

    const auto p1 = temp_path("det1.csv"), p2 = temp_path("det2.csv");
    auto with_out = [&](const std::filesystem::path& p) {
        auto v = args;
        v.push_back("--output");
        v.push_back(p.string());
        return cli(v);
    };
    CHECK(with_out(p1).code == 0);
    CHECK(with_out(p2).code == 0);
    CHECK(slurp(p1) == slurp(p2));
    CHECK(slurp(p1) == a.out);
    CHECK(std::filesystem::exists(p1.string() + ".meta"));
    for (const auto& p : {p1, p2}) {
        std::filesystem::remove(p);
        std::filesystem::remove(p.string() + ".meta");
    }
}

TEST_CASE("config file with flag override")
{
    const auto conf = temp_path("run.conf");
    {
        std::ofstream f(conf);
        f << "alpha = 0.3\nL = 64\nscheme = CI\nexample_id = 2\nh_max_exp = 5\n";
    }
    const CliResult a = cli({"bench", "--config", conf.string()});
    const CliResult b = cli({"bench", "--example", "2", "--alpha", "0.3", "--L", "64", "--scheme",
                             "CI", "--h_max_exp", "5"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);

    const CliResult c = cli({"bench", "--config", conf.string(), "--alpha", "0.7"});
    const CliResult d = cli({"bench", "--example", "2", "--alpha", "0.7", "--L", "64", "--scheme",
                             "CI", "--h_max_exp", "5"});
    CHECK(c.out == d.out);
    CHECK(c.out != a.out);
    std::filesystem::remove(conf);
}

TEST_CASE("exit codes")
{
    CHECK(cli({"bench", "--alpha", "1.5"}).code == 2);
    CHECK(cli({"bench", "--bogus"}).code == 2);
    CHECK(cli({}).code == 2);
    CHECK(cli({"prony", "--table", "4"}).code == 2);
    CHECK(cli({"solve", "--kernel", "/nonexistent/dir/k.txt"}).code == 4);
    CHECK(cli({"bench", "--h_max_exp", "3", "--output", "/nonexistent/dir/x.csv"}).code == 4);
    const CliResult div = cli({"bench", "--example", "1", "--implicit", "fixed_point",
                               "--max_iter", "1", "--h_max_exp", "3"});
    CHECK(div.code == 3);
    CHECK(div.out.find("failed") != std::string::npos);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("solve command")
{
    const CliResult r = cli({"solve", "--example", "1", "--alpha", "0.5", "--h", "0.0625"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("t,y,abs_error\n0,0,0\n", 0) == 0);
    std::size_t lines = 0;
    for (char ch : r.out)
        lines += ch == '\n';
    CHECK(lines == 18);
    CHECK(r.err.find("error_at_T=") != std::string::npos);
}

TEST_CASE("Kelvin-Voigt sweep command")
{
    const CliResult r = cli({"bench", "--example", "3", "--alpha", "0.3", "--grid_kind",
                             "kelvin_voigt"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("L,L_f,scheme,max_error\n16,", 0) == 0);
}

TEST_CASE("command-line binary")
{
    const char* exe = std::getenv("FRACSUM_CLI");
    if (!exe)
        return;
    const auto out = temp_path("bin.csv");
    const std::string cmd = std::string(exe) + " bench --example 2 --h_max_exp 4 --output " +
                            out.string() + " > /dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(slurp(out).rfind("h,error,eoc\n", 0) == 0);
    const std::string bad = std::string(exe) + " bench --alpha 2 > /dev/null 2>&1";
    const int status = std::system(bad.c_str());
    CHECK(WEXITSTATUS(status) == 2);
    std::filesystem::remove(out);
    std::filesystem::remove(out.string() + ".meta");
}

TEST_CASE("thread cap")
{
    setenv("FRACSUM_THREADS", "3", 1);
    CHECK(thread_cap() == 3);
    setenv("FRACSUM_THREADS", "0", 1);
    CHECK(thread_cap() >= 1);
    unsetenv("FRACSUM_THREADS");

    std::vector<int> hit(50, 0);
    parallel_for(hit.size(), [&](std::size_t i) { hit[i] += 1; });
    for (int h : hit)
        CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(4, [](std::size_t i) {
                        if (i == 2)
                            throw DomainError("boom");
                    }),
                    DomainError);
}
