#include "sfde/dense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sfde {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill)
{
}

DenseMatrix DenseMatrix::identity(std::size_t n)
{
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> d)
{
    DenseMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        m(i, i) = d[i];
    return m;
}

DenseMatrix DenseMatrix::transpose() const
{
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t(j, i) = (*this)(i, j);
    return t;
}

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const
{
    if (x.size() != cols_)
        throw std::invalid_argument("dense matvec: length mismatch");
    std::vector<double> y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double acc = 0.0;
        const double* row = &data_[i * cols_];
        for (std::size_t j = 0; j < cols_; ++j)
            acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& rhs) const
{
    if (cols_ != rhs.rows_)
        throw std::invalid_argument("dense product: inner dimensions differ");
    DenseMatrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const double a = (*this)(i, k);
            if (a == 0.0)
                continue;
            const double* brow = &rhs.data_[k * rhs.cols_];
            double* orow = &out.data_[i * rhs.cols_];
            for (std::size_t j = 0; j < rhs.cols_; ++j)
                orow[j] += a * brow[j];
        }
    return out;
}

DenseMatrix DenseMatrix::operator+(const DenseMatrix& rhs) const
{
    DenseMatrix out = *this;
    out += rhs;
    return out;
}

DenseMatrix DenseMatrix::operator-(const DenseMatrix& rhs) const
{
    DenseMatrix out = *this;
    out += (-1.0) * rhs;
    return out;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& rhs)
{
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
        throw std::invalid_argument("dense sum: shapes differ");
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] += rhs.data_[i];
    return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s)
{
    for (double& v : data_)
        v *= s;
    return *this;
}

DenseMatrix operator*(double s, const DenseMatrix& m)
{
    DenseMatrix out = m;
    out *= s;
    return out;
}

DenseMatrix DenseMatrix::symmetric_part() const
{
    DenseMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            out(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
    return out;
}

DenseMatrix DenseMatrix::skew_part() const
{
    DenseMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            out(i, j) = 0.5 * ((*this)(i, j) - (*this)(j, i));
    return out;
}

double DenseMatrix::max_abs() const
{
    double m = 0.0;
    for (double v : data_)
        m = std::max(m, std::abs(v));
    return m;
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b)
{
    DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double aij = a(i, j);
            if (aij == 0.0)
                continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return out;
}

DenseMatrix kron_axes(const std::vector<DenseMatrix>& factors)
{
    if (factors.empty())
        throw std::invalid_argument("kron_axes needs at least one factor");
    DenseMatrix out = factors.back();
    for (std::size_t i = factors.size() - 1; i-- > 0;)
        out = kron(out, factors[i]);
    return out;
}

} // namespace sfde
