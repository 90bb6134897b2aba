#pragma once

#include "sfde/coeffs.hpp"
#include "sfde/dense.hpp"
#include "sfde/field.hpp"
#include "sfde/operators.hpp"
#include "sfde/transforms.hpp"

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfde {

/// Raised when a preconditioner eigenvalue is numerically zero.
class PreconditionerBreakdown : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// (3 + cos(k pi/(n+1))) / 4, k = 1..n: the spectrum of the mass matrix A_n.
std::vector<double> mass_eigenvalues(std::size_t n);

/// First column t_0..t_{n-1} of the symmetric Toeplitz matrix H(T_n) = (T_n + T_n^T)/2.
std::vector<double> hermitian_first_column(const CoefficientTable& table, std::size_t n);

/// Eigenvalues of tau(H(T_n)),
///   q_1 + (q_0 + q_2) cos(theta_k) + sum_{j=2}^{n-1} q_{j+1} cos(j theta_k),
/// theta_k = k pi/(n+1), all obtained from one FFT of the even extension of
/// the first column. `n` defaults to table.n.
std::vector<double> tau_sym_eigenvalues(const CoefficientTable& table);
std::vector<double> tau_sym_eigenvalues(const CoefficientTable& table, std::size_t n);

/// tau(H(T_n)) = H(T_n) - Hankel correction, as a dense matrix.
DenseMatrix tau_matrix_dense(const CoefficientTable& table, std::size_t n);

/// P = S_N Lambda S_N, the tau approximation of A obtained by replacing each
/// stiffness matrix B_i with (k_{i,+} + k_{i,-}) tau(H(T_i)).
class TauPreconditioner {
public:
    static TauPreconditioner assemble(const CnFvOperator& op);
    /// Preconditioner with a caller-supplied eigen-tensor; used in tests.
    TauPreconditioner(GridSpec grid, Field eigen_tensor);

    const GridSpec& grid() const noexcept { return grid_; }
    const Field& eigen_tensor() const noexcept { return lambda_; }
    double min_eigenvalue() const;
    double max_eigenvalue() const;

    /// S_N Lambda^p S_N r for p = -1, 1, -1/2.
    void apply_inverse(std::span<const double> r, std::span<double> z) const;
    void apply(std::span<const double> r, std::span<double> z) const;
    void apply_inverse_sqrt(std::span<const double> r, std::span<double> z) const;

    Field apply_inverse(const Field& r) const;
    Field apply(const Field& r) const;
    Field apply_inverse_sqrt(const Field& r) const;

private:
    void transform_scale(std::span<const double> r, std::span<double> z, const std::vector<double>& scale) const;

    GridSpec grid_;
    Field lambda_;
    std::vector<double> inverse_;
    std::vector<double> inverse_sqrt_;
    std::vector<SineTransformPlan> plans_;
};

Field apply_tau_inverse(const TauPreconditioner& p, const Field& r);
TauPreconditioner assemble_tau(const CnFvOperator& op);

/// Dense P assembled straight from its Kronecker definition (no transforms).
DenseMatrix tau_preconditioner_dense(const CnFvOperator& op);

enum class CirculantVariant { strang, chan };

std::string to_string(CirculantVariant v);

/// First column of the circulant approximation of an n x n Toeplitz matrix
/// whose diagonals are `diag(j)`, j = -(n-1)..n-1 (j > 0 below the diagonal).
/// Strang copies the central diagonals; Chan takes the Frobenius-optimal
/// weighted average ((n-j) t_j + j t_{j-n}) / n.
std::vector<double> circulant_first_column(std::span<const double> lower, std::span<const double> upper,
                                           CirculantVariant variant);

/// Dense circulant with the given first column.
DenseMatrix circulant_dense(std::span<const double> first_column);

/// Circulant-substituted approximation of A: every Toeplitz factor (mass,
/// T_i, T_i^T) replaced by its Strang or Chan circulant. Inverse applied
/// with per-axis complex FFTs.
class CirculantPreconditioner {
public:
    static CirculantPreconditioner assemble(const CnFvOperator& op, CirculantVariant variant);

    CirculantVariant variant() const noexcept { return variant_; }
    const Shape& shape() const noexcept { return shape_; }
    /// Circulant first columns per axis: mass and T_i.
    const std::vector<double>& mass_column(std::size_t axis) const { return mass_columns_.at(axis); }
    const std::vector<double>& toeplitz_column(std::size_t axis) const { return toeplitz_columns_.at(axis); }
    const std::vector<std::complex<double>>& eigen_tensor() const noexcept { return lambda_; }
    /// Largest |Im| seen in the most recent inverse application.
    double last_imaginary_residue() const noexcept { return last_residue_; }

    void apply_inverse(std::span<const double> r, std::span<double> z) const;
    Field apply_inverse(const Field& r) const;

    /// Dense circulant-substituted matrix; same size guard as materialize_dense.
    DenseMatrix dense() const;

private:
    CirculantVariant variant_ = CirculantVariant::strang;
    Shape shape_;
    std::vector<double> eta_;
    std::vector<Diffusivity> k_;
    std::vector<std::vector<double>> mass_columns_;
    std::vector<std::vector<double>> toeplitz_columns_;
    std::vector<std::complex<double>> lambda_;
    mutable double last_residue_ = 0.0;
};

CirculantPreconditioner assemble_circulant(const CnFvOperator& op, CirculantVariant variant);

/// Threshold on |Im| of a circulant inverse application before it is
/// treated as a fault.
inline constexpr double kImaginaryResidueLimit = 1e-10;
/// |Lambda entry| below this is a breakdown.
inline constexpr double kSingularEigenvalue = 1e-14;

} // namespace sfde
