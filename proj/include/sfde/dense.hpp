#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sfde {

/// Row-major dense matrix. Only used at desk scale (oracles, spectra).
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(std::span<const double> d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<const double> values() const noexcept { return data_; }

    DenseMatrix transpose() const;
    std::vector<double> multiply(std::span<const double> x) const;
    DenseMatrix operator*(const DenseMatrix& rhs) const;
    DenseMatrix operator+(const DenseMatrix& rhs) const;
    DenseMatrix operator-(const DenseMatrix& rhs) const;
    DenseMatrix& operator+=(const DenseMatrix& rhs);
    DenseMatrix& operator*=(double s);

    /// (A + A^T)/2 and (A - A^T)/2.
    DenseMatrix symmetric_part() const;
    DenseMatrix skew_part() const;

    double max_abs() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix operator*(double s, const DenseMatrix& m);

/// Kronecker product a (x) b: the index of b runs fastest.
DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b);

/// Kronecker product of per-axis factors given x-axis first, i.e.
/// factors[d-1] (x) ... (x) factors[0], matching x-fastest field layout.
DenseMatrix kron_axes(const std::vector<DenseMatrix>& factors);

} // namespace sfde
