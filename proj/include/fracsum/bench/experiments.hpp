#pragma once

#include "fracsum/bench/config.hpp"
#include "fracsum/bench/examples.hpp"
#include "fracsum/bench/report.hpp"
#include "fracsum/prony.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace fracsum::bench {

/// Worker cap: FRACSUM_THREADS if set and positive, else the hardware count.
unsigned thread_cap();

/// Runs body(i) for i in [0, n) on at most thread_cap() threads. The first
/// exception thrown by any body is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Kernel fed to the solvers: the rescaled Prony-reduced sum on [delta, T],
/// or the plain trapezoidal sum when unreduced is set.
struct SolverKernel
{
    ExpSum sum;
    std::size_t L = 0;
    std::size_t L_f = 0;
};

SolverKernel solver_kernel(double alpha, double delta, double T, std::size_t L, double epsilon,
                           std::size_t eval_points = 1000, bool unreduced = false);

Example make_example(const RunConfig& cfg);

/// Final-time errors for h = 2^-k_min .. 2^-k_max on uniform meshes.
std::vector<EocRow> run_sweep(const Example& ex, const ExpSum& kernel, const SolverOptions& opt,
                              int k_min, int k_max);

struct SweepResult
{
    std::vector<EocRow> rows;
    std::size_t L = 0;
    std::size_t L_f = 0;
};

/// h-sweep of examples 1 or 2 as configured.
SweepResult run_example(const RunConfig& cfg);

struct KelvinVoigtRun
{
    Solution solution;
    double max_error = 0.0;
    std::size_t L_f = 0;
};

KelvinVoigtRun run_kelvin_voigt(double alpha, double c, double k, std::size_t L, Scheme scheme,
                                double delta = 1e-5, double epsilon = 1e-10);

/// Columns L,L_f,scheme,max_error over the given L values and schemes.
CsvTable kelvin_voigt_sweep(const std::vector<std::size_t>& Ls, const std::vector<Scheme>& schemes,
                            double alpha = 0.3, double c = 100.0, double k = 10.0);

struct ReductionRow
{
    double alpha = 0.0;
    std::size_t L = 0;
    double epsilon = 0.0;
    ReductionReport report;
};

/// Rows of the kernel-reduction tables: 1 ([1e-2, 1]), 8 ([1e-2, 1e3]) and
/// 9 (epsilon sweep on [1e-2, 1e3]).
std::vector<ReductionRow> reduction_table(int id, std::size_t eval_points = 1000,
                                          const SearchOptions& opts = {});

CsvTable reduction_csv(int id, const std::vector<ReductionRow>& rows);

/// Prony weights and exponents on [1e-2,1], [1e-5,1] and [1e-2,1e3].
CsvTable prony_parameters_csv(std::size_t eval_points = 1000);

/// Solver tables 2..7: long format scheme,L,L_f,h,error,eoc.
CsvTable solver_table(int id, std::size_t eval_points = 1000);

/// Figure datasets 1..9 in long format t,value,series.
CsvTable figure_data(int id, std::size_t eval_points = 1000);

} // namespace fracsum::bench
