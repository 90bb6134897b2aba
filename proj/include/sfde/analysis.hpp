#pragma once

#include "sfde/coeffs.hpp"
#include "sfde/dense.hpp"
#include "sfde/operators.hpp"
#include "sfde/preconditioners.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sfde {

enum class SymbolMethod { truncated_series, lerch_closed_form };

struct SymbolEvaluation {
    FractionalOrder order;
    double theta;
    std::complex<double> value;
    SymbolMethod method;
};

/// sum_{j=0}^{terms} q_j e^{i (j-1) theta}. Rejects theta on the lattice 2 k pi
/// and terms < 1000.
std::complex<double> symbol_truncated(FractionalOrder order, double theta, std::size_t terms = 100000);

/// Closed form of the generating function of T through the alternating sums
///   A_1 = sum_n (-1)^n (2(n+1) pi - theta)^{-delta-1},
///   A_2 = sum_n (-1)^n (2 n pi + theta)^{-delta-1},
/// with W = 2 sin(3 theta/2) - 6 sin(theta/2):
///   Re g = -Gamma(1+delta) cos(delta pi/2) W (A_1 + A_2),
///   Im g =  Gamma(1+delta) sin(delta pi/2) W (A_1 - A_2).
/// theta is reduced to (-pi, pi]; negative angles use conjugate symmetry.
std::complex<double> symbol_lerch(FractionalOrder order, double theta);

SymbolEvaluation evaluate_symbol(FractionalOrder order, double theta, SymbolMethod method);

/// sum_{k>=0} (-1)^k a(k) for a completely monotone sequence a, using the
/// Cohen-Rodriguez Villegas-Zagier acceleration with `terms` evaluations.
/// The error is bounded by 2 a(0) / (3 + sqrt 8)^terms.
double alternating_sum(const std::function<double(std::size_t)>& a, std::size_t terms = 40);

/// `count` Chebyshev-spaced angles in (0, pi], the largest equal to pi.
std::vector<double> chebyshev_angles(std::size_t count);

/// Eigenvalues (ascending) of a symmetric matrix by cyclic Jacobi sweeps.
/// Rotations are skipped once |a_pq| <= threshold * sqrt(a_pp a_qq) or tiny.
std::vector<double> symmetric_eigenvalues(const DenseMatrix& a, double threshold = 1e-13);

/// Largest N accepted by the dense eigensolves below.
inline constexpr std::size_t kEigenSizeLimit = 1024;

/// Dense S_n.
DenseMatrix sine_matrix_dense(std::size_t n);
/// Dense S_N Lambda^power S_N for a tau preconditioner.
DenseMatrix tau_power_dense(const TauPreconditioner& p, double power);

struct BoundReport {
    double varsigma = 0.0;
    double omega = 0.0;
    double hermitian_min = 0.0;
    double hermitian_max = 0.0;
    double skew_radius = 0.0;
    bool has_spectrum = false;
};

/// varsigma = 1.5 max_i tan(delta_i pi/2) |k_{i,+} - k_{i,-}| / (k_{i,+} + k_{i,-}),
/// omega = sqrt((2 + 4 varsigma^2) / (3 + 4 varsigma^2)).
BoundReport compute_bounds(const std::vector<FractionalOrder>& orders, const std::vector<Diffusivity>& diffusivities);
double gmres_rate(double varsigma);

/// Extreme eigenvalues of P^{-1/2} H(A) P^{-1/2} and the spectral radius of
/// P^{-1/2} S(A) P^{-1/2}, from dense matrices. N <= kEigenSizeLimit.
BoundReport dense_preconditioned_spectrum(const CnFvOperator& op, const TauPreconditioner& p);

/// Per-instance row of the verification CSV.
struct VerificationRow {
    std::string label;
    std::vector<double> orders;
    std::vector<Diffusivity> diffusivities;
    Shape shape;
    double dt = 0.0;
    BoundReport bounds;
    double min_tau_eigenvalue = 0.0;
    /// Checks: hermitian spectrum in (1/2, 3/2), skew radius <= varsigma,
    /// lambda_min(P) > 1/8, two-sided GMRES envelope, one- vs two-sided relation.
    bool hermitian_ok = false;
    bool skew_ok = false;
    bool tau_min_ok = false;
    bool envelope_ok = false;
    bool residual_relation_ok = false;

    bool passed() const { return hermitian_ok && skew_ok && tau_min_ok && envelope_ok && residual_relation_ok; }
};

/// Runs every dense check on one operator. `margin` is the slack required on
/// the strict inequalities.
VerificationRow verify_instance(const std::string& label, const CnFvOperator& op, double margin = 1e-10);

void write_bound_report_header(std::ostream& os);
void write_bound_report_row(std::ostream& os, const VerificationRow& row);

} // namespace sfde
