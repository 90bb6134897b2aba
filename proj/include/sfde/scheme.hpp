#pragma once

#include "sfde/coeffs.hpp"
#include "sfde/field.hpp"
#include "sfde/krylov.hpp"
#include "sfde/operators.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sfde {

/// f(x, t) with x holding one coordinate per axis.
using SpaceTimeFunction = std::function<double(std::span<const double> x, double t)>;
using SpaceFunction = std::function<double(std::span<const double> x)>;

enum class SourceQuadrature { gauss2, midpoint };

struct ProblemSpec {
    std::string name;
    GridSpec grid;
    std::vector<FractionalOrder> orders;
    std::vector<Diffusivity> diffusivities;
    double horizon = 1.0;
    std::size_t steps = 1;
    SpaceTimeFunction source;
    SpaceFunction initial;
    /// May be empty when no closed-form solution is known.
    SpaceTimeFunction exact;
    SourceQuadrature quadrature = SourceQuadrature::gauss2;

    double dt() const { return horizon / static_cast<double>(steps); }
    bool symmetric() const;
    void validate() const;
};

enum class DiffusivityPreset { symmetric, nonsymmetric };

/// k = 5 on every side, or the non-symmetric set (19, 21), (21, 23), (23, 25).
std::vector<Diffusivity> preset_diffusivities(std::size_t dimension, DiffusivityPreset preset);

/// Built-in manufactured problems on the unit box with horizon 1:
///   "ex1" (2D) u = 4 e^t X(x) X(y),
///   "ex2" (3D) u = sin(t + 1) X(x) X(y) X(z),
/// where X(s) = s^2 (1 - s)^2. `n_plus_1` is the number of cells per axis.
ProblemSpec builtin_problem(const std::string& name, const std::vector<double>& orders, std::size_t n_plus_1,
                            std::size_t steps, const std::vector<Diffusivity>& diffusivities);

/// Flux-term contribution of X(s) = s^2 (1 - s)^2 along one axis:
///   sum_{k=0}^{2} (-1)^{2-k} C(2,k) Gamma(5-k)/Gamma(3-k+delta)
///       [k_+ s^{2-k+delta} + k_- (1-s)^{2-k+delta}].
double polynomial_flux_term(double s, double delta, Diffusivity k);

/// Nodal values of `fn` on the interior grid.
Field interpolate(const GridSpec& grid, const SpaceFunction& fn);
Field interpolate(const GridSpec& grid, const SpaceTimeFunction& fn, double t);

/// Cell averages of the source at t_{m-1/2}, 1 <= m <= steps.
Field cell_average_source(const ProblemSpec& spec, std::size_t m);

enum class Method { cg, pcg_tau, pcg_strang, pcg_chan, gmres, pgmres_tau, pgmres_strang, pgmres_chan };

std::string to_string(Method m);
/// Throws std::invalid_argument for unknown names.
Method parse_method(const std::string& name);
bool uses_cg(Method m);
const std::vector<Method>& all_methods();

/// One Crank-Nicolson step: b = op_minus u_prev + dt F, then A u = b with
/// PCG when `use_cg` is set, left-preconditioned GMRES otherwise. An empty
/// `precond` means no preconditioner.
std::pair<Field, SolveStats> cn_step(const CnFvOperator& op_plus, const CnFvOperator& op_minus, const LinearMap& precond,
                                     const Field& u_prev, const Field& source, const KrylovConfig& cfg, bool use_cg);

struct ErrorNorms {
    double max = 0.0;
    /// sqrt(prod h_i * sum e^2)
    double l2 = 0.0;
};

ErrorNorms error_norms(const GridSpec& grid, const Field& a, const Field& b);

struct SolveReport {
    std::string problem;
    Method method = Method::cg;
    std::vector<SolveStats> steps;
    /// Final-time errors; absent when the problem has no exact solution.
    std::optional<ErrorNorms> error;
    double wall_seconds = 0.0;
    Field solution;
    std::string config_echo;

    double mean_iterations() const;
    bool all_converged() const;
};

/// u^0 by nodal interpolation, then `steps` CN steps. Rejects CG-family
/// methods on non-symmetric diffusivities before any work is done.
SolveReport time_march(const ProblemSpec& spec, Method method, const KrylovConfig& cfg);

/// log2(e_coarse / e_fine) between successive entries of a factor-2 refinement.
std::vector<double> observed_orders(std::span<const double> errors);
/// Slope of the finest refinement pair of final-time L2 errors.
double observed_order(const std::vector<SolveReport>& reports);

} // namespace sfde
