#pragma once

#include "sfde/coeffs.hpp"
#include "sfde/dense.hpp"
#include "sfde/fft.hpp"
#include "sfde/field.hpp"

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace sfde {

/// T_n built from q_0..q_n: q_1 on the diagonal, q_0 on the single
/// superdiagonal, q_2..q_n on the subdiagonals (lower Hessenberg Toeplitz).
///
/// Products use a circulant embedding of length L = next power of two >= 2n,
/// so one forward and one inverse FFT of length L per product. Because the
/// embedded circulant is real, two real lines are packed into one complex
/// transform when applying along tensor axes.
class ToeplitzOperator {
public:
    /// `q` holds q_0..q_n; n = q.size() - 1 >= 1.
    explicit ToeplitzOperator(std::span<const double> q);
    static ToeplitzOperator from_table(const CoefficientTable& table, std::size_t n);

    std::size_t size() const noexcept { return n_; }
    std::size_t embedding_length() const noexcept { return symbol_.size(); }
    /// q_1, q_2, ..., q_n
    std::vector<double> first_column() const;
    /// q_1, q_0, 0, ..., 0
    std::vector<double> first_row() const;
    /// DFT of the first column of the embedding circulant.
    const std::vector<std::complex<double>>& embedded_symbol() const noexcept { return symbol_; }

    /// y = T x, or T^T x when `transpose` is set.
    void apply(std::span<const double> x, std::span<double> y, bool transpose = false) const;
    std::vector<double> apply(std::span<const double> x, bool transpose = false) const;

    /// DFT-domain multiplier of k_plus T + k_minus T^T.
    std::vector<std::complex<double>> stiffness_symbol(double k_plus, double k_minus) const;

    /// Applies the circulant with DFT multiplier `symbol` (an embedding
    /// symbol of this operator) to every line of `data` along `axis`.
    void apply_along_axis(std::span<const std::complex<double>> symbol, const Shape& shape, std::size_t axis,
                          std::span<double> data) const;

    DenseMatrix dense() const;

private:
    std::size_t n_;
    std::vector<double> q_;
    std::vector<std::complex<double>> symbol_;
    std::shared_ptr<const FftPlan> fft_;
};

std::vector<double> toeplitz_matvec(const ToeplitzOperator& op, std::span<const double> x, bool transpose);

/// y_i = (x_{i-1} + 6 x_i + x_{i+1}) / 8 with zero extension: the mass
/// matrix A_n of the piecewise-linear finite-volume scheme.
std::vector<double> mass_matvec(std::size_t n, std::span<const double> x);
void mass_apply_along_axis(const Shape& shape, std::size_t axis, std::span<double> data);
DenseMatrix mass_matrix_dense(std::size_t n);

struct Diffusivity {
    double plus;
    double minus;

    bool symmetric() const noexcept { return plus == minus; }
};

enum class OperatorSign { plus, minus };

/// The Crank-Nicolson finite-volume operator
///   A = A_N + sum_i eta_i (A_{n_d} (x) ... B_i ... (x) A_{n_1})
/// with B_i = k_{i,+} T_i + k_{i,-} T_i^T on axis i and mass matrices on the
/// other axes. With OperatorSign::minus every stiffness term changes sign,
/// giving the right-hand-side operator 2 A_N - A.
///
/// eta_i = dt / (2 Gamma(delta_i + 1) h_i^(2 - delta_i)).
class CnFvOperator {
public:
    CnFvOperator(GridSpec grid, std::vector<FractionalOrder> orders, std::vector<Diffusivity> diffusivities,
                 double dt, OperatorSign sign = OperatorSign::plus);

    const GridSpec& grid() const noexcept { return grid_; }
    Shape shape() const { return grid_.shape(); }
    std::size_t dimension() const noexcept { return grid_.dimension(); }
    std::size_t size() const { return grid_.size(); }
    const std::vector<FractionalOrder>& orders() const noexcept { return orders_; }
    const std::vector<Diffusivity>& diffusivities() const noexcept { return k_; }
    double dt() const noexcept { return dt_; }
    double eta(std::size_t axis) const { return eta_.at(axis); }
    OperatorSign sign() const noexcept { return sign_; }
    const ToeplitzOperator& toeplitz(std::size_t axis) const { return toeplitz_.at(axis); }
    const CoefficientTable& coefficients(std::size_t axis) const { return *tables_.at(axis); }
    /// All k_{i,+} == k_{i,-}.
    bool symmetric() const;

    CnFvOperator with_sign(OperatorSign sign) const;
    /// Same operator with every eta_i replaced; used to probe limits.
    CnFvOperator with_etas(std::vector<double> etas) const;

    Field apply(const Field& u) const;
    void apply(std::span<const double> u, std::span<double> out) const;

private:
    GridSpec grid_;
    std::vector<FractionalOrder> orders_;
    std::vector<Diffusivity> k_;
    double dt_;
    OperatorSign sign_;
    std::vector<double> eta_;
    std::vector<std::shared_ptr<const CoefficientTable>> tables_;
    std::vector<ToeplitzOperator> toeplitz_;
    std::vector<std::vector<std::complex<double>>> stiffness_symbols_;
};

Field operator_apply(const CnFvOperator& op, const Field& u);

/// Per-axis stiffness matrix B_i as a dense matrix.
DenseMatrix stiffness_matrix_dense(const CnFvOperator& op, std::size_t axis);

/// Largest N accepted by materialize_dense.
inline constexpr std::size_t kDenseSizeLimit = 4096;

/// Dense M_N + sum_i w_i (M_d (x) .. S_i .. (x) M_1) from per-axis factors
/// given x-axis first. Entries are formed as explicit sums of products, so a
/// symmetric input gives an exactly symmetric result.
DenseMatrix assemble_kronecker_sum(const std::vector<DenseMatrix>& mass, const std::vector<DenseMatrix>& stiffness,
                                   std::span<const double> weights);

/// Explicit N x N matrix of `op` assembled from dense Kronecker factors.
DenseMatrix materialize_dense(const CnFvOperator& op);

} // namespace sfde
