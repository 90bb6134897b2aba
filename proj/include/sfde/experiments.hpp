#pragma once

#include "sfde/krylov.hpp"
#include "sfde/operators.hpp"
#include "sfde/scheme.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfde {

/// Bad or missing configuration entry; the message names the line and key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat "key = value" file. '#' starts a comment; lists use ',' and order
/// sets are separated by ';'.
///
///   problem        ex1 | ex2
///   orders         0.1, 0.2; 0.4, 0.5     one set per table block
///   diffusivities  symmetric | nonsymmetric | 19/21, 21/23
///   grid           64, 128                n+1 values
///   steps          8                      M values, zipped with grid (one value is broadcast)
///   methods        cg, pcg_tau, ...
///   tol, maxit, restart, initial_guess (zero | warm), quadrature (gauss2 | midpoint)
///   seed, draws, symmetric_draws, max_n, margin                  verify
///   temporal_grid, temporal_steps, reference_steps,
///   spatial_grid, spatial_steps_ratio                            order
struct ExperimentConfig {
    std::string problem = "ex1";
    std::vector<std::vector<double>> orders;
    std::vector<Diffusivity> diffusivities;
    std::string diffusivity_label = "symmetric";
    std::vector<std::size_t> grid;
    std::vector<std::size_t> steps;
    std::vector<Method> methods;
    KrylovConfig krylov;
    SourceQuadrature quadrature = SourceQuadrature::gauss2;
    std::uint64_t seed = 1;

    std::size_t draws = 20;
    std::size_t symmetric_draws = 0;
    std::size_t max_n = 6;
    double margin = 1e-10;

    std::size_t temporal_grid = 64;
    std::vector<std::size_t> temporal_steps{4, 8, 16};
    std::size_t reference_steps = 256;
    std::vector<std::size_t> spatial_grid{16, 32, 64};
    double spatial_steps_ratio = 0.5;

    std::size_t dimension() const { return problem == "ex2" ? 3 : 2; }
    bool symmetric() const;
};

ExperimentConfig parse_config(std::istream& in, const std::string& source_name = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

struct TableRow {
    std::vector<double> orders;
    std::size_t steps = 0;
    std::size_t n_plus_1 = 0;
    Method method = Method::cg;
    double mean_iterations = 0.0;
    double wall_seconds = 0.0;
    double l2_error = 0.0;
    double max_error = 0.0;
    bool converged = false;
    std::string failure;
};

/// Runs every (orders, grid/steps pair, method) combination. Solver failures
/// are recorded in the row and the sweep continues.
std::vector<TableRow> run_table_rows(const ExperimentConfig& cfg);

void write_table_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<TableRow>& rows);
void write_table_markdown(std::ostream& os, const ExperimentConfig& cfg, const std::vector<TableRow>& rows);

struct OrderRow {
    std::string study; // "temporal" or "spatial"
    std::vector<double> orders;
    std::size_t n_plus_1 = 0;
    std::size_t steps = 0;
    double l2_error = 0.0;
    double max_error = 0.0;
    /// log2 ratio against the previous level; NaN on the first level.
    double slope_l2 = 0.0;
    double slope_max = 0.0;
};

/// Temporal study: fixed grid, errors against a run with reference_steps.
/// Spatial study: M = ratio (n+1), errors against the exact solution.
std::vector<OrderRow> run_order_rows(const ExperimentConfig& cfg);
void write_order_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<OrderRow>& rows);
void write_order_markdown(std::ostream& os, const std::vector<OrderRow>& rows);

/// Operators used by the verification command, drawn from cfg.seed.
std::vector<CnFvOperator> verification_instances(const ExperimentConfig& cfg);

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRowFailure = 1;
inline constexpr int kExitConfigError = 2;

/// Subcommand drivers: write artifacts into `out` and return an exit code.
int run_table(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int run_verification(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int run_order_study(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);

} // namespace sfde
