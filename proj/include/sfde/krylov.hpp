#pragma once

#include "sfde/field.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sfde {

/// y = L x. Both spans have the system size; they never alias.
using LinearMap = std::function<void(std::span<const double> x, std::span<double> y)>;

enum class InitialGuess { zero, warm };

struct KrylovConfig {
    double tol = 1e-9;
    /// 0 means "system size N".
    std::size_t maxit = 0;
    std::size_t restart = 20;
    /// Used by the time stepper; solvers always start from the x0 they get.
    InitialGuess initial_guess = InitialGuess::zero;

    void validate() const;
    std::size_t iteration_cap(std::size_t n) const { return maxit == 0 ? n : maxit; }
};

struct SolveStats {
    std::size_t iterations = 0;
    /// Relative residual after 0, 1, ..., iterations steps. PCG: ||b - Ax|| / ||b||.
    /// GMRES: ||M^{-1}(b - Ax)|| / ||M^{-1}b||.
    std::vector<double> residual_history;
    /// Denominator of residual_history (||b|| or ||M^{-1}b||).
    double reference_norm = 0.0;
    bool converged = false;
    std::optional<std::string> breakdown_reason;

    double absolute_residual(std::size_t k) const { return residual_history.at(k) * reference_norm; }
};

struct SolveResult {
    std::vector<double> x;
    SolveStats stats;
};

/// Preconditioned conjugate gradients. An empty `apply_minv` means no
/// preconditioner. Non-positive curvature stops the solve with a breakdown.
SolveResult pcg(const LinearMap& apply_a, const LinearMap& apply_minv, std::span<const double> b,
                std::span<const double> x0, const KrylovConfig& cfg);

/// Left-preconditioned GMRES(restart): modified Gram-Schmidt Arnoldi with
/// Givens rotations. Iterations count inner Arnoldi steps over all cycles.
SolveResult gmres_restarted(const LinearMap& apply_a, const LinearMap& apply_minv, std::span<const double> b,
                            std::span<const double> x0, const KrylovConfig& cfg);

/// GMRES on P^{-1/2} A P^{-1/2} v = P^{-1/2} b, returning u = P^{-1/2} v.
/// `v0` is the initial guess in the transformed variable (empty = zero).
/// The residual history refers to the transformed system.
SolveResult gmres_two_sided(const LinearMap& apply_a, const LinearMap& apply_pinvhalf, std::span<const double> b,
                            const KrylovConfig& cfg, std::span<const double> v0 = {});

std::pair<Field, SolveStats> pcg(const LinearMap& apply_a, const LinearMap& apply_minv, const Field& b,
                                 const Field& x0, const KrylovConfig& cfg);
std::pair<Field, SolveStats> gmres_restarted(const LinearMap& apply_a, const LinearMap& apply_minv, const Field& b,
                                             const Field& x0, const KrylovConfig& cfg);
std::pair<Field, SolveStats> gmres_two_sided(const LinearMap& apply_a, const LinearMap& apply_pinvhalf,
                                             const Field& b, const KrylovConfig& cfg);

} // namespace sfde
