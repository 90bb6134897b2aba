#include "sfde/preconditioners.hpp"

#include "sfde/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace sfde {

namespace {

void require_length(std::size_t got, std::size_t expected, const char* what)
{
    if (got != expected)
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(expected) + " entries, got " +
                                    std::to_string(got));
}

/// In-place forward or inverse complex DFT along every axis of `shape`.
void tensor_fft(const Shape& shape, std::span<std::complex<double>> data, bool inverse)
{
    for (std::size_t axis = 0; axis < shape.size(); ++axis) {
        const std::size_t n = shape[axis];
        if (n == 1)
            continue;
        const auto plan = fft_plan(n);
        std::vector<std::complex<double>> line(n);
        for_each_line(shape, axis, [&](std::size_t offset, std::size_t stride) {
            for (std::size_t j = 0; j < n; ++j)
                line[j] = data[offset + j * stride];
            if (inverse)
                plan->backward(line);
            else
                plan->forward(line);
            for (std::size_t j = 0; j < n; ++j)
                data[offset + j * stride] = line[j];
        });
    }
}

/// Lambda[k] = prod_i m_i[k_i] + sum_i w_i s_i[k_i] prod_{j != i} m_j[k_j].
template <typename T>
std::vector<T> kronecker_sum_eigenvalues(const Shape& shape, const std::vector<std::vector<T>>& mass,
                                         const std::vector<std::vector<T>>& stiffness, const std::vector<double>& w)
{
    const std::size_t d = shape.size();
    const std::size_t total = shape_size(shape);
    std::vector<T> out(total);
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        T value = T(1.0);
        for (std::size_t i = 0; i < d; ++i)
            value *= mass[i][idx[i]];
        for (std::size_t i = 0; i < d; ++i) {
            T term = w[i] * stiffness[i][idx[i]];
            for (std::size_t j = 0; j < d; ++j)
                if (j != i)
                    term *= mass[j][idx[j]];
            value += term;
        }
        out[flat] = value;
        for (std::size_t i = 0; i < d; ++i) {
            if (++idx[i] < shape[i])
                break;
            idx[i] = 0;
        }
    }
    return out;
}

std::vector<double> mass_lower(std::size_t n)
{
    std::vector<double> t(n, 0.0);
    t[0] = 6.0 / 8.0;
    if (n > 1)
        t[1] = 1.0 / 8.0;
    return t;
}

} // namespace

std::vector<double> mass_eigenvalues(std::size_t n)
{
    if (n == 0)
        throw std::invalid_argument("mass_eigenvalues: n must be positive");
    std::vector<double> lambda(n);
    const double step = std::numbers::pi / static_cast<double>(n + 1);
    for (std::size_t k = 1; k <= n; ++k)
        lambda[k - 1] = (3.0 + std::cos(static_cast<double>(k) * step)) / 4.0;
    return lambda;
}

std::vector<double> hermitian_first_column(const CoefficientTable& table, std::size_t n)
{
    if (n == 0 || n > table.n)
        throw std::invalid_argument("hermitian_first_column: n must lie in 1..table.n");
    const auto& q = table.q;
    std::vector<double> t(n);
    t[0] = q[1];
    if (n > 1)
        t[1] = 0.5 * (q[0] + q[2]);
    for (std::size_t j = 2; j < n; ++j)
        t[j] = 0.5 * q[j + 1];
    return t;
}

std::vector<double> tau_sym_eigenvalues(const CoefficientTable& table) { return tau_sym_eigenvalues(table, table.n); }

std::vector<double> tau_sym_eigenvalues(const CoefficientTable& table, std::size_t n)
{
    const std::vector<double> t = hermitian_first_column(table, n);
    // Even extension of length 2(n+1); its DFT at k is t_0 + 2 sum_j t_j cos(j k pi/(n+1)).
    const std::size_t period = 2 * (n + 1);
    std::vector<std::complex<double>> e(period, 0.0);
    e[0] = t[0];
    for (std::size_t j = 1; j < n; ++j) {
        e[j] = t[j];
        e[period - j] = t[j];
    }
    fft_plan(period)->forward(e);
    std::vector<double> lambda(n);
    for (std::size_t k = 1; k <= n; ++k)
        lambda[k - 1] = e[k].real();
    return lambda;
}

DenseMatrix tau_matrix_dense(const CoefficientTable& table, std::size_t n)
{
    const std::vector<double> t = hermitian_first_column(table, n);
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t c = i + j;
            double hankel = 0.0;
            if (c + 3 <= n)
                hankel = t[c + 2];
            else if (c >= n + 1)
                hankel = t[2 * n - c];
            m(i, j) = t[i > j ? i - j : j - i] - hankel;
        }
    return m;
}

TauPreconditioner::TauPreconditioner(GridSpec grid, Field eigen_tensor)
    : grid_(std::move(grid)), lambda_(std::move(eigen_tensor)), plans_(make_sine_plans(grid_.shape()))
{
    require_shape(lambda_, grid_.shape(), "tau preconditioner eigen-tensor");
    inverse_.resize(lambda_.size());
    inverse_sqrt_.resize(lambda_.size());
    for (std::size_t j = 0; j < lambda_.size(); ++j) {
        const double v = lambda_[j];
        if (!(v > kSingularEigenvalue))
            throw PreconditionerBreakdown("tau preconditioner: non-positive eigenvalue " + std::to_string(v));
        inverse_[j] = 1.0 / v;
        inverse_sqrt_[j] = 1.0 / std::sqrt(v);
    }
}

TauPreconditioner TauPreconditioner::assemble(const CnFvOperator& op)
{
    if (op.sign() != OperatorSign::plus)
        throw std::invalid_argument("assemble_tau: operator must be the left-hand side (sign = plus)");
    const Shape sh = op.shape();
    std::vector<std::vector<double>> mass, stiff;
    std::vector<double> w;
    for (std::size_t i = 0; i < sh.size(); ++i) {
        mass.push_back(mass_eigenvalues(sh[i]));
        stiff.push_back(tau_sym_eigenvalues(op.coefficients(i), sh[i]));
        const Diffusivity k = op.diffusivities()[i];
        w.push_back(op.eta(i) * (k.plus + k.minus));
    }
    return TauPreconditioner(op.grid(), Field(sh, kronecker_sum_eigenvalues(sh, mass, stiff, w)));
}

double TauPreconditioner::min_eigenvalue() const
{
    return *std::min_element(lambda_.storage().begin(), lambda_.storage().end());
}

double TauPreconditioner::max_eigenvalue() const
{
    return *std::max_element(lambda_.storage().begin(), lambda_.storage().end());
}

void TauPreconditioner::transform_scale(std::span<const double> r, std::span<double> z,
                                        const std::vector<double>& scale) const
{
    require_length(r.size(), lambda_.size(), "tau preconditioner input");
    require_length(z.size(), lambda_.size(), "tau preconditioner output");
    Field work(lambda_.shape(), std::vector<double>(r.begin(), r.end()));
    tensor_dst_apply_inplace(plans_, work);
    for (std::size_t j = 0; j < work.size(); ++j)
        work[j] *= scale[j];
    tensor_dst_apply_inplace(plans_, work);
    std::copy(work.storage().begin(), work.storage().end(), z.begin());
}

void TauPreconditioner::apply_inverse(std::span<const double> r, std::span<double> z) const
{
    transform_scale(r, z, inverse_);
}

void TauPreconditioner::apply(std::span<const double> r, std::span<double> z) const
{
    transform_scale(r, z, lambda_.storage());
}

void TauPreconditioner::apply_inverse_sqrt(std::span<const double> r, std::span<double> z) const
{
    transform_scale(r, z, inverse_sqrt_);
}

Field TauPreconditioner::apply_inverse(const Field& r) const
{
    Field z(r.shape());
    apply_inverse(r.values(), z.values());
    return z;
}

Field TauPreconditioner::apply(const Field& r) const
{
    Field z(r.shape());
    apply(r.values(), z.values());
    return z;
}

Field TauPreconditioner::apply_inverse_sqrt(const Field& r) const
{
    Field z(r.shape());
    apply_inverse_sqrt(r.values(), z.values());
    return z;
}

Field apply_tau_inverse(const TauPreconditioner& p, const Field& r)
{
    require_shape(r, p.grid().shape(), "apply_tau_inverse");
    return p.apply_inverse(r);
}

TauPreconditioner assemble_tau(const CnFvOperator& op) { return TauPreconditioner::assemble(op); }

DenseMatrix tau_preconditioner_dense(const CnFvOperator& op)
{
    const Shape sh = op.shape();
    std::vector<DenseMatrix> mass, stiff;
    std::vector<double> w;
    for (std::size_t i = 0; i < sh.size(); ++i) {
        mass.push_back(mass_matrix_dense(sh[i]));
        stiff.push_back(tau_matrix_dense(op.coefficients(i), sh[i]));
        const Diffusivity k = op.diffusivities()[i];
        w.push_back(op.eta(i) * (k.plus + k.minus));
    }
    return assemble_kronecker_sum(mass, stiff, w);
}

std::string to_string(CirculantVariant v) { return v == CirculantVariant::strang ? "strang" : "chan"; }

std::vector<double> circulant_first_column(std::span<const double> lower, std::span<const double> upper,
                                           CirculantVariant variant)
{
    const std::size_t n = lower.size();
    if (n == 0 || upper.size() != n || upper[0] != lower[0])
        throw std::invalid_argument("circulant_first_column: diagonals must share length and main entry");
    std::vector<double> c(n);
    c[0] = lower[0];
    for (std::size_t j = 1; j < n; ++j) {
        if (variant == CirculantVariant::strang)
            c[j] = j <= n / 2 ? lower[j] : upper[n - j];
        else
            c[j] = (static_cast<double>(n - j) * lower[j] + static_cast<double>(j) * upper[n - j]) /
                   static_cast<double>(n);
    }
    return c;
}

DenseMatrix circulant_dense(std::span<const double> first_column)
{
    const std::size_t n = first_column.size();
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = first_column[(i + n - j) % n];
    return m;
}

CirculantPreconditioner CirculantPreconditioner::assemble(const CnFvOperator& op, CirculantVariant variant)
{
    if (op.sign() != OperatorSign::plus)
        throw std::invalid_argument("assemble_circulant: operator must be the left-hand side (sign = plus)");
    CirculantPreconditioner p;
    p.variant_ = variant;
    p.shape_ = op.shape();
    p.k_ = op.diffusivities();

    std::vector<std::vector<std::complex<double>>> mass, stiff;
    for (std::size_t i = 0; i < p.shape_.size(); ++i) {
        const std::size_t n = p.shape_[i];
        p.eta_.push_back(op.eta(i));

        const std::vector<double> m = mass_lower(n);
        p.mass_columns_.push_back(circulant_first_column(m, m, variant));

        const auto& q = op.coefficients(i).q;
        std::vector<double> lower(q.begin() + 1, q.begin() + 1 + n);
        std::vector<double> upper(n, 0.0);
        upper[0] = q[1];
        if (n > 1)
            upper[1] = q[0];
        p.toeplitz_columns_.push_back(circulant_first_column(lower, upper, variant));

        const auto plan = fft_plan(n);
        std::vector<std::complex<double>> mu_m(p.mass_columns_.back().begin(), p.mass_columns_.back().end());
        std::vector<std::complex<double>> mu_t(p.toeplitz_columns_.back().begin(), p.toeplitz_columns_.back().end());
        plan->forward(mu_m);
        plan->forward(mu_t);
        const Diffusivity k = p.k_[i];
        for (auto& v : mu_t)
            v = k.plus * v + k.minus * std::conj(v);
        mass.push_back(std::move(mu_m));
        stiff.push_back(std::move(mu_t));
    }
    p.lambda_ = kronecker_sum_eigenvalues(p.shape_, mass, stiff, p.eta_);
    for (const auto& v : p.lambda_)
        if (std::abs(v) < kSingularEigenvalue)
            throw PreconditionerBreakdown(to_string(variant) + " circulant preconditioner: singular eigenvalue");
    return p;
}

void CirculantPreconditioner::apply_inverse(std::span<const double> r, std::span<double> z) const
{
    const std::size_t total = lambda_.size();
    require_length(r.size(), total, "circulant preconditioner input");
    require_length(z.size(), total, "circulant preconditioner output");
    std::vector<std::complex<double>> work(r.begin(), r.end());
    tensor_fft(shape_, work, false);
    for (std::size_t j = 0; j < total; ++j)
        work[j] /= lambda_[j];
    tensor_fft(shape_, work, true);
    const double scale = 1.0 / static_cast<double>(total);
    double max_re = 0.0, max_im = 0.0;
    for (std::size_t j = 0; j < total; ++j) {
        z[j] = work[j].real() * scale;
        max_re = std::max(max_re, std::abs(z[j]));
        max_im = std::max(max_im, std::abs(work[j].imag() * scale));
    }
    last_residue_ = max_re > 0.0 ? max_im / max_re : max_im;
    if (last_residue_ > kImaginaryResidueLimit)
        throw std::runtime_error("circulant preconditioner: imaginary residue " + std::to_string(last_residue_));
}

Field CirculantPreconditioner::apply_inverse(const Field& r) const
{
    require_shape(r, shape_, "circulant preconditioner");
    Field z(shape_);
    apply_inverse(r.values(), z.values());
    return z;
}

DenseMatrix CirculantPreconditioner::dense() const
{
    std::vector<DenseMatrix> mass, stiff;
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        mass.push_back(circulant_dense(mass_columns_[i]));
        const DenseMatrix c = circulant_dense(toeplitz_columns_[i]);
        DenseMatrix b(c.rows(), c.cols());
        for (std::size_t r = 0; r < c.rows(); ++r)
            for (std::size_t s = 0; s < c.cols(); ++s)
                b(r, s) = k_[i].plus * c(r, s) + k_[i].minus * c(s, r);
        stiff.push_back(std::move(b));
    }
    return assemble_kronecker_sum(mass, stiff, eta_);
}

CirculantPreconditioner assemble_circulant(const CnFvOperator& op, CirculantVariant variant)
{
    return CirculantPreconditioner::assemble(op, variant);
}

} // namespace sfde
