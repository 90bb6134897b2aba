#include "sfde/analysis.hpp"

#include "sfde/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sfde {

namespace {

constexpr double kPi = std::numbers::pi;

/// theta mapped into (-pi, pi].
double reduce_angle(double theta)
{
    double r = std::remainder(theta, 2.0 * kPi);
    if (r <= -kPi)
        r += 2.0 * kPi;
    return r;
}

bool on_lattice(double theta) { return std::abs(reduce_angle(theta)) < 1e-12; }

DenseMatrix symmetrized(const DenseMatrix& m) { return m.symmetric_part(); }

} // namespace

std::complex<double> symbol_truncated(FractionalOrder order, double theta, std::size_t terms)
{
    if (terms < 1000)
        throw std::invalid_argument("symbol_truncated: at least 1000 terms required");
    if (on_lattice(theta))
        throw std::invalid_argument("symbol_truncated: theta must avoid multiples of 2 pi");
    const auto table = coefficient_table(order, terms);
    const auto& q = table->q;
    std::complex<double> sum = 0.0;
    for (std::size_t j = 0; j <= terms; ++j)
        sum += q[j] * std::polar(1.0, (static_cast<double>(j) - 1.0) * theta);
    return sum;
}

double alternating_sum(const std::function<double(std::size_t)>& a, std::size_t terms)
{
    const double n = static_cast<double>(terms);
    double d = std::pow(3.0 + std::sqrt(8.0), n);
    d = 0.5 * (d + 1.0 / d);
    double b = -1.0, c = -d, s = 0.0;
    for (std::size_t k = 0; k < terms; ++k) {
        const double kk = static_cast<double>(k);
        c = b - c;
        s += c * a(k);
        b = (kk + n) * (kk - n) * b / ((kk + 0.5) * (kk + 1.0));
    }
    return s / d;
}

std::complex<double> symbol_lerch(FractionalOrder order, double theta)
{
    if (on_lattice(theta))
        throw std::invalid_argument("symbol_lerch: theta must avoid multiples of 2 pi");
    const double th = reduce_angle(theta);
    if (th < 0.0)
        return std::conj(symbol_lerch(order, -th));

    const double delta = order.value();
    const double p = -delta - 1.0;
    const double a1 = alternating_sum(
        [&](std::size_t n) { return std::pow(2.0 * (static_cast<double>(n) + 1.0) * kPi - th, p); });
    const double a2 =
        alternating_sum([&](std::size_t n) { return std::pow(2.0 * static_cast<double>(n) * kPi + th, p); });
    const double w = 2.0 * std::sin(1.5 * th) - 6.0 * std::sin(0.5 * th);
    const double g = std::tgamma(1.0 + delta);
    return {-g * std::cos(0.5 * delta * kPi) * w * (a1 + a2), g * std::sin(0.5 * delta * kPi) * w * (a1 - a2)};
}

SymbolEvaluation evaluate_symbol(FractionalOrder order, double theta, SymbolMethod method)
{
    const std::complex<double> v =
        method == SymbolMethod::truncated_series ? symbol_truncated(order, theta) : symbol_lerch(order, theta);
    return {order, theta, v, method};
}

std::vector<double> chebyshev_angles(std::size_t count)
{
    if (count == 0)
        throw std::invalid_argument("chebyshev_angles: count must be positive");
    // Chebyshev-Gauss-Lobatto points of [0, pi] with the endpoint 0 dropped.
    std::vector<double> theta(count);
    for (std::size_t j = 1; j <= count; ++j)
        theta[j - 1] = 0.5 * kPi * (1.0 - std::cos(kPi * static_cast<double>(j) / static_cast<double>(count)));
    return theta;
}

std::vector<double> symmetric_eigenvalues(const DenseMatrix& input, double threshold)
{
    const std::size_t n = input.rows();
    if (input.cols() != n)
        throw std::invalid_argument("symmetric_eigenvalues: matrix must be square");
    if (n > kEigenSizeLimit)
        throw std::length_error("symmetric_eigenvalues: N = " + std::to_string(n) + " exceeds " +
                                std::to_string(kEigenSizeLimit));
    DenseMatrix a = input;
    double frob = 0.0;
    for (double v : a.values())
        frob += v * v;
    frob = std::sqrt(frob);
    const double floor = 1e-18 * frob;

    for (int sweep = 0; sweep < 100; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= floor || std::abs(apq) <= threshold * std::sqrt(std::abs(a(p, p) * a(q, q))))
                    continue;
                rotated = true;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::abs(theta) > 1e150
                                     ? 0.5 / theta
                                     : std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);
                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q)
                        continue;
                    const double g = a(r, p);
                    const double h = a(r, q);
                    const double new_p = g - s * (h + g * tau);
                    const double new_q = h + s * (g - h * tau);
                    a(r, p) = new_p;
                    a(p, r) = new_p;
                    a(r, q) = new_q;
                    a(q, r) = new_q;
                }
            }
        if (!rotated)
            break;
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i)
        eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

DenseMatrix sine_matrix_dense(std::size_t n)
{
    DenseMatrix s(n, n);
    const double scale = std::sqrt(2.0 / static_cast<double>(n + 1));
    for (std::size_t j = 1; j <= n; ++j)
        for (std::size_t k = 1; k <= n; ++k)
            s(j - 1, k - 1) =
                scale * std::sin(static_cast<double>(j * k) * kPi / static_cast<double>(n + 1));
    return s;
}

DenseMatrix tau_power_dense(const TauPreconditioner& p, double power)
{
    const Shape& sh = p.eigen_tensor().shape();
    if (shape_size(sh) > kDenseSizeLimit)
        throw std::length_error("tau_power_dense: N exceeds the dense limit");
    std::vector<DenseMatrix> factors;
    for (std::size_t n : sh)
        factors.push_back(sine_matrix_dense(n));
    const DenseMatrix s = kron_axes(factors);
    std::vector<double> scale(p.eigen_tensor().size());
    for (std::size_t j = 0; j < scale.size(); ++j)
        scale[j] = std::pow(p.eigen_tensor()[j], power);
    DenseMatrix left = s;
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t j = 0; j < s.cols(); ++j)
            left(i, j) *= scale[j];
    return symmetrized(left * s);
}

double gmres_rate(double varsigma)
{
    const double v2 = varsigma * varsigma;
    return std::sqrt((2.0 + 4.0 * v2) / (3.0 + 4.0 * v2));
}

BoundReport compute_bounds(const std::vector<FractionalOrder>& orders, const std::vector<Diffusivity>& diffusivities)
{
    if (orders.size() != diffusivities.size())
        throw std::invalid_argument("compute_bounds: one diffusivity pair per order required");
    BoundReport r;
    for (std::size_t i = 0; i < orders.size(); ++i) {
        const Diffusivity k = diffusivities[i];
        if (!(k.plus + k.minus > 0.0))
            throw std::invalid_argument("compute_bounds: diffusivities must be positive");
        const double v =
            1.5 * std::tan(0.5 * orders[i].value() * kPi) * std::abs(k.plus - k.minus) / (k.plus + k.minus);
        r.varsigma = std::max(r.varsigma, v);
    }
    r.omega = gmres_rate(r.varsigma);
    return r;
}

BoundReport dense_preconditioned_spectrum(const CnFvOperator& op, const TauPreconditioner& p)
{
    if (op.size() > kEigenSizeLimit)
        throw std::length_error("dense_preconditioned_spectrum: N = " + std::to_string(op.size()) + " exceeds " +
                                std::to_string(kEigenSizeLimit));
    BoundReport r = compute_bounds(op.orders(), op.diffusivities());
    const DenseMatrix a = materialize_dense(op);
    const DenseMatrix ph = tau_power_dense(p, -0.5);

    const DenseMatrix herm = symmetrized(ph * a.symmetric_part() * ph);
    const std::vector<double> eig = symmetric_eigenvalues(herm);
    r.hermitian_min = eig.front();
    r.hermitian_max = eig.back();

    const DenseMatrix skew = ph * a.skew_part() * ph;
    if (skew.max_abs() == 0.0) {
        r.skew_radius = 0.0;
    } else {
        const DenseMatrix gram = symmetrized(skew.transpose() * skew);
        r.skew_radius = std::sqrt(std::max(0.0, symmetric_eigenvalues(gram).back()));
    }
    r.has_spectrum = true;
    return r;
}

VerificationRow verify_instance(const std::string& label, const CnFvOperator& op, double margin)
{
    VerificationRow row;
    row.label = label;
    for (const auto& o : op.orders())
        row.orders.push_back(o.value());
    row.diffusivities = op.diffusivities();
    row.shape = op.shape();
    row.dt = op.dt();

    const TauPreconditioner p = assemble_tau(op);
    row.bounds = dense_preconditioned_spectrum(op, p);
    row.min_tau_eigenvalue = p.min_eigenvalue();
    row.tau_min_ok = row.min_tau_eigenvalue > 0.125 + margin;
    row.hermitian_ok = row.bounds.hermitian_min > 0.5 + margin && row.bounds.hermitian_max < 1.5 - margin;
    row.skew_ok = row.bounds.varsigma == 0.0 ? row.bounds.skew_radius == 0.0
                                             : row.bounds.skew_radius <= row.bounds.varsigma - margin;

    // Paired GMRES runs without restarts so both searches use the same Krylov space.
    const std::size_t n = op.size();
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> b(n);
    for (double& v : b)
        v = dist(rng);
    KrylovConfig cfg;
    cfg.tol = 1e-10;
    cfg.restart = n;
    cfg.maxit = n;
    LinearMap apply_a = [&op](std::span<const double> x, std::span<double> y) { op.apply(x, y); };
    LinearMap apply_pinv = [&p](std::span<const double> x, std::span<double> y) { p.apply_inverse(x, y); };
    LinearMap apply_pinvhalf = [&p](std::span<const double> x, std::span<double> y) { p.apply_inverse_sqrt(x, y); };

    const SolveResult two = gmres_two_sided(apply_a, apply_pinvhalf, b, cfg);
    const SolveResult one = gmres_restarted(apply_a, apply_pinv, b, {}, cfg);

    row.envelope_ok = two.stats.converged;
    const double r0 = two.stats.absolute_residual(0);
    for (std::size_t k = 0; k < two.stats.residual_history.size(); ++k)
        if (two.stats.absolute_residual(k) > std::pow(row.bounds.omega, static_cast<double>(k)) * r0)
            row.envelope_ok = false;

    row.residual_relation_ok = one.stats.converged;
    const std::size_t common = std::min(one.stats.residual_history.size(), two.stats.residual_history.size());
    for (std::size_t j = 0; j < common; ++j)
        if (one.stats.absolute_residual(j) > 2.0 * std::numbers::sqrt2 * two.stats.absolute_residual(j))
            row.residual_relation_ok = false;
    return row;
}

void write_bound_report_header(std::ostream& os)
{
    os << "label,dimension,shape,orders,k_plus,k_minus,dt,lambda_min,lambda_max,skew_radius,varsigma,omega,"
          "tau_lambda_min,hermitian_ok,skew_ok,tau_min_ok,envelope_ok,residual_relation_ok,pass\n";
}

void write_bound_report_row(std::ostream& os, const VerificationRow& row)
{
    auto join = [&](auto&& range, auto&& get) {
        std::string s;
        bool first = true;
        for (const auto& v : range) {
            std::ostringstream item;
            item << std::setprecision(17) << get(v);
            s += (first ? "" : ";") + item.str();
            first = false;
        }
        return s;
    };
    const auto id = [](auto v) { return v; };
    const auto flag = [](bool b) { return b ? "true" : "false"; };
    os << std::setprecision(17) << row.label << ',' << row.shape.size() << ',' << join(row.shape, id) << ','
       << join(row.orders, id) << ',' << join(row.diffusivities, [](const Diffusivity& k) { return k.plus; }) << ','
       << join(row.diffusivities, [](const Diffusivity& k) { return k.minus; }) << ',' << row.dt << ','
       << row.bounds.hermitian_min << ',' << row.bounds.hermitian_max << ',' << row.bounds.skew_radius << ','
       << row.bounds.varsigma << ',' << row.bounds.omega << ',' << row.min_tau_eigenvalue << ','
       << flag(row.hermitian_ok) << ',' << flag(row.skew_ok) << ',' << flag(row.tau_min_ok) << ','
       << flag(row.envelope_ok) << ',' << flag(row.residual_relation_ok) << ',' << flag(row.passed()) << '\n';
}

} // namespace sfde
