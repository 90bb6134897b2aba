#include "sfde/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace sfde {

namespace {

std::size_t next_power_of_two(std::size_t v)
{
    std::size_t p = 1;
    while (p < v)
        p <<= 1;
    return p;
}

} // namespace

ToeplitzOperator::ToeplitzOperator(std::span<const double> q) : n_(q.size() ? q.size() - 1 : 0), q_(q.begin(), q.end())
{
    if (n_ < 1)
        throw std::invalid_argument("Toeplitz operator needs q_0..q_n with n >= 1");
    const std::size_t length = next_power_of_two(2 * n_);
    fft_ = fft_plan(length);
    symbol_.assign(length, 0.0);
    for (std::size_t j = 0; j < n_; ++j)
        symbol_[j] = q_[j + 1];
    if (n_ >= 2)
        symbol_[length - 1] = q_[0];
    fft_->forward(symbol_);
}

ToeplitzOperator ToeplitzOperator::from_table(const CoefficientTable& table, std::size_t n)
{
    if (n + 1 > table.q.size())
        throw std::invalid_argument("coefficient table is shorter than the requested operator");
    return ToeplitzOperator(std::span<const double>(table.q.data(), n + 1));
}

std::vector<double> ToeplitzOperator::first_column() const { return {q_.begin() + 1, q_.end()}; }

std::vector<double> ToeplitzOperator::first_row() const
{
    std::vector<double> row(n_, 0.0);
    row[0] = q_[1];
    if (n_ >= 2)
        row[1] = q_[0];
    return row;
}

void ToeplitzOperator::apply(std::span<const double> x, std::span<double> y, bool transpose) const
{
    if (x.size() != n_ || y.size() != n_)
        throw std::invalid_argument("Toeplitz matvec: length mismatch (expected " + std::to_string(n_) + ")");
    const std::size_t length = symbol_.size();
    std::vector<std::complex<double>> buf(length, 0.0);
    std::copy(x.begin(), x.end(), buf.begin());
    fft_->forward(buf);
    for (std::size_t k = 0; k < length; ++k)
        buf[k] *= transpose ? std::conj(symbol_[k]) : symbol_[k];
    fft_->backward(buf);
    const double scale = 1.0 / static_cast<double>(length);
    for (std::size_t j = 0; j < n_; ++j)
        y[j] = buf[j].real() * scale;
}

std::vector<double> ToeplitzOperator::apply(std::span<const double> x, bool transpose) const
{
    std::vector<double> y(n_);
    apply(x, y, transpose);
    return y;
}

std::vector<std::complex<double>> ToeplitzOperator::stiffness_symbol(double k_plus, double k_minus) const
{
    std::vector<std::complex<double>> s(symbol_.size());
    for (std::size_t k = 0; k < s.size(); ++k)
        s[k] = k_plus * symbol_[k] + k_minus * std::conj(symbol_[k]);
    return s;
}

void ToeplitzOperator::apply_along_axis(std::span<const std::complex<double>> symbol, const Shape& shape,
                                        std::size_t axis, std::span<double> data) const
{
    if (axis >= shape.size() || shape[axis] != n_)
        throw std::invalid_argument("Toeplitz axis apply: axis length does not match operator size");
    if (symbol.size() != symbol_.size())
        throw std::invalid_argument("Toeplitz axis apply: symbol has the wrong length");

    std::vector<std::size_t> offsets;
    std::size_t stride = 1;
    for_each_line(shape, axis, [&](std::size_t offset, std::size_t s) {
        offsets.push_back(offset);
        stride = s;
    });

    const std::size_t length = symbol_.size();
    const double scale = 1.0 / static_cast<double>(length);
    std::vector<std::complex<double>> buf(length);
    for (std::size_t l = 0; l < offsets.size(); l += 2) {
        const std::size_t a = offsets[l];
        const bool pair = l + 1 < offsets.size();
        const std::size_t b = pair ? offsets[l + 1] : 0;
        std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
        for (std::size_t j = 0; j < n_; ++j)
            buf[j] = {data[a + j * stride], pair ? data[b + j * stride] : 0.0};
        fft_->forward(buf);
        for (std::size_t k = 0; k < length; ++k)
            buf[k] *= symbol[k];
        fft_->backward(buf);
        for (std::size_t j = 0; j < n_; ++j) {
            data[a + j * stride] = buf[j].real() * scale;
            if (pair)
                data[b + j * stride] = buf[j].imag() * scale;
        }
    }
}

DenseMatrix ToeplitzOperator::dense() const
{
    DenseMatrix t(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) {
            const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(j) + 1;
            if (k >= 0 && k <= static_cast<std::ptrdiff_t>(n_))
                t(i, j) = q_[static_cast<std::size_t>(k)];
        }
    return t;
}

std::vector<double> toeplitz_matvec(const ToeplitzOperator& op, std::span<const double> x, bool transpose)
{
    return op.apply(x, transpose);
}

std::vector<double> mass_matvec(std::size_t n, std::span<const double> x)
{
    if (x.size() != n)
        throw std::invalid_argument("mass matvec: length mismatch");
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? x[i - 1] : 0.0;
        const double right = i + 1 < n ? x[i + 1] : 0.0;
        y[i] = (left + 6.0 * x[i] + right) / 8.0;
    }
    return y;
}

void mass_apply_along_axis(const Shape& shape, std::size_t axis, std::span<double> data)
{
    const std::size_t n = shape.at(axis);
    for_each_line(shape, axis, [&](std::size_t offset, std::size_t stride) {
        double prev = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t idx = offset + j * stride;
            const double cur = data[idx];
            const double next = j + 1 < n ? data[idx + stride] : 0.0;
            data[idx] = (prev + 6.0 * cur + next) / 8.0;
            prev = cur;
        }
    });
}

DenseMatrix mass_matrix_dense(std::size_t n)
{
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = 6.0 / 8.0;
        if (i + 1 < n) {
            a(i, i + 1) = 1.0 / 8.0;
            a(i + 1, i) = 1.0 / 8.0;
        }
    }
    return a;
}

CnFvOperator::CnFvOperator(GridSpec grid, std::vector<FractionalOrder> orders,
                           std::vector<Diffusivity> diffusivities, double dt, OperatorSign sign)
    : grid_(std::move(grid)), orders_(std::move(orders)), k_(std::move(diffusivities)), dt_(dt), sign_(sign)
{
    const std::size_t d = grid_.dimension();
    if (orders_.size() != d || k_.size() != d)
        throw std::invalid_argument("CN-FV operator: need one order and one diffusivity pair per axis");
    if (!(dt_ >= 0.0) || !std::isfinite(dt_))
        throw std::invalid_argument("CN-FV operator: time step must be finite and non-negative");
    for (const Diffusivity& k : k_)
        if (!(k.plus >= 0.0) || !(k.minus >= 0.0))
            throw std::invalid_argument("CN-FV operator: diffusivities must be non-negative");

    for (std::size_t i = 0; i < d; ++i) {
        const double delta = orders_[i].value();
        const double h = grid_.step(i);
        eta_.push_back(dt_ / (2.0 * std::tgamma(delta + 1.0) * std::pow(h, 2.0 - delta)));
        const std::size_t n = grid_.interior(i);
        tables_.push_back(coefficient_table(orders_[i], std::max<std::size_t>(n, 2)));
        toeplitz_.push_back(ToeplitzOperator::from_table(*tables_.back(), n));
        stiffness_symbols_.push_back(toeplitz_.back().stiffness_symbol(k_[i].plus, k_[i].minus));
    }
}

bool CnFvOperator::symmetric() const
{
    return std::all_of(k_.begin(), k_.end(), [](const Diffusivity& k) { return k.symmetric(); });
}

CnFvOperator CnFvOperator::with_sign(OperatorSign sign) const
{
    CnFvOperator copy = *this;
    copy.sign_ = sign;
    return copy;
}

CnFvOperator CnFvOperator::with_etas(std::vector<double> etas) const
{
    if (etas.size() != eta_.size())
        throw std::invalid_argument("with_etas: one value per axis required");
    CnFvOperator copy = *this;
    copy.eta_ = std::move(etas);
    return copy;
}

void CnFvOperator::apply(std::span<const double> u, std::span<double> out) const
{
    const Shape sh = shape();
    const std::size_t total = shape_size(sh);
    if (u.size() != total || out.size() != total)
        throw std::invalid_argument("CN-FV apply: field size does not match the grid");
    const std::size_t d = dimension();
    const double sign = sign_ == OperatorSign::plus ? 1.0 : -1.0;

    std::vector<double> tmp(u.begin(), u.end());
    for (std::size_t axis = 0; axis < d; ++axis)
        mass_apply_along_axis(sh, axis, tmp);
    std::copy(tmp.begin(), tmp.end(), out.begin());

    for (std::size_t i = 0; i < d; ++i) {
        const double weight = sign * eta_[i];
        if (weight == 0.0 || (k_[i].plus == 0.0 && k_[i].minus == 0.0))
            continue;
        std::copy(u.begin(), u.end(), tmp.begin());
        for (std::size_t axis = 0; axis < d; ++axis)
            if (axis != i)
                mass_apply_along_axis(sh, axis, tmp);
        toeplitz_[i].apply_along_axis(stiffness_symbols_[i], sh, i, tmp);
        for (std::size_t j = 0; j < total; ++j)
            out[j] += weight * tmp[j];
    }
}

Field CnFvOperator::apply(const Field& u) const
{
    require_shape(u, shape(), "CN-FV apply");
    Field out(shape());
    apply(u.values(), out.values());
    return out;
}

Field operator_apply(const CnFvOperator& op, const Field& u) { return op.apply(u); }

DenseMatrix stiffness_matrix_dense(const CnFvOperator& op, std::size_t axis)
{
    const DenseMatrix t = op.toeplitz(axis).dense();
    const Diffusivity k = op.diffusivities().at(axis);
    DenseMatrix b(t.rows(), t.cols());
    for (std::size_t i = 0; i < t.rows(); ++i)
        for (std::size_t j = 0; j < t.cols(); ++j)
            b(i, j) = k.plus * t(i, j) + k.minus * t(j, i);
    return b;
}

DenseMatrix assemble_kronecker_sum(const std::vector<DenseMatrix>& mass, const std::vector<DenseMatrix>& stiffness,
                                   std::span<const double> weights)
{
    const std::size_t d = mass.size();
    if (stiffness.size() != d || weights.size() != d)
        throw std::invalid_argument("Kronecker sum: one mass, stiffness and weight per axis required");
    Shape sh(d);
    for (std::size_t i = 0; i < d; ++i)
        sh[i] = mass[i].rows();
    const std::size_t total = shape_size(sh);
    if (total > kDenseSizeLimit)
        throw std::length_error("dense assembly: N = " + std::to_string(total) + " exceeds the dense limit of " +
                                std::to_string(kDenseSizeLimit));

    DenseMatrix out(total, total);
    std::vector<std::size_t> row_idx(d), col_idx(d);
    auto unravel = [&](std::size_t flat, std::vector<std::size_t>& idx) {
        for (std::size_t i = 0; i < d; ++i) {
            idx[i] = flat % sh[i];
            flat /= sh[i];
        }
    };
    for (std::size_t r = 0; r < total; ++r) {
        unravel(r, row_idx);
        for (std::size_t c = 0; c < total; ++c) {
            unravel(c, col_idx);
            double value = 1.0;
            for (std::size_t i = 0; i < d; ++i)
                value *= mass[i](row_idx[i], col_idx[i]);
            for (std::size_t i = 0; i < d; ++i) {
                const double b = stiffness[i](row_idx[i], col_idx[i]);
                if (b == 0.0)
                    continue;
                double term = weights[i] * b;
                for (std::size_t j = 0; j < d; ++j)
                    if (j != i)
                        term *= mass[j](row_idx[j], col_idx[j]);
                value += term;
            }
            out(r, c) = value;
        }
    }
    return out;
}

DenseMatrix materialize_dense(const CnFvOperator& op)
{
    const std::size_t d = op.dimension();
    const Shape sh = op.shape();
    const double sign = op.sign() == OperatorSign::plus ? 1.0 : -1.0;
    if (shape_size(sh) > kDenseSizeLimit)
        throw std::length_error("materialize_dense: N = " + std::to_string(shape_size(sh)) +
                                " exceeds the dense limit of " + std::to_string(kDenseSizeLimit));

    std::vector<DenseMatrix> mass, stiff;
    std::vector<double> weights;
    for (std::size_t i = 0; i < d; ++i) {
        mass.push_back(mass_matrix_dense(sh[i]));
        stiff.push_back(stiffness_matrix_dense(op, i));
        weights.push_back(sign * op.eta(i));
    }
    return assemble_kronecker_sum(mass, stiff, weights);
}

} // namespace sfde
