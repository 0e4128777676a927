#pragma once

#include "fracsum/fode.hpp"
#include "fracsum/prony.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fracsum::bench {

enum class Command { Kernel, Prony, Solve, Bench };
enum class MeshKind { Uniform, Geometric, KelvinVoigt };

/// Everything a CLI run needs. Field names double as flag and config keys.
struct RunConfig
{
    Command command = Command::Bench;

    // kernel
    double alpha = 0.5;
    double delta = 1e-5;
    double T = 0.0;  ///< 0: default of the command or example
    std::size_t L = 128;
    double epsilon = 1e-10;
    std::size_t eval_points = 1000;
    MeshKind eval_grid = MeshKind::Geometric;
    SearchOrder search = SearchOrder::MFirst;
    bool unreduced = false;

    // problems
    int example_id = 1;
    double lambda = -1.0;
    double c = 100.0;
    double k = 10.0;

    // solver
    Scheme scheme = Scheme::ODE_TR;
    ImplicitMethod implicit = ImplicitMethod::Newton;
    double tol = 1e-10;
    int max_iter = 50;
    TransitionRule transition = TransitionRule::Exact;
    double h = 0.0;       ///< step size (uniform mesh); 0: use N
    std::size_t N = 0;    ///< number of steps; 0: use h
    MeshKind grid_kind = MeshKind::Uniform;
    int h_min_exp = 2;    ///< sweep h = 2^-h_min_exp .. 2^-h_max_exp
    int h_max_exp = 10;

    // outputs
    int table = 0;
    int figure = 0;
    std::string output_path;
    std::string kernel_path;  ///< solve: load this kernel instead of building one
    std::string kernel_out;   ///< kernel/prony: also save the sum here

    /// Throws ConfigError on inconsistent values.
    void validate() const;
};

std::string to_string(Command c);
std::string to_string(Scheme s);
std::string to_string(MeshKind m);

/// Single line "key=value key=value ..." covering every field.
std::string meta_line(const RunConfig& cfg);

struct ParseOutcome
{
    std::optional<RunConfig> config;  ///< empty if the process should exit
    int exit_code = 0;
};

/// Parses flags and an optional --config file (flat "key = value" lines);
/// flags override file values. Help and usage errors are printed to out/err.
ParseOutcome parse_command_line(int argc, const char* const* argv, std::ostream& out,
                                std::ostream& err);

/// Executes a validated configuration. Returns the process exit code:
/// 0 success, 2 config error, 3 numerical failure, 4 I/O error.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

} // namespace fracsum::bench
