#include "sfde/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sfde {

namespace {

double dot(std::span<const double> a, std::span<const double> b)
{
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] += alpha * x[i];
}

void apply_or_copy(const LinearMap& m, std::span<const double> x, std::span<double> y)
{
    if (m)
        m(x, y);
    else
        std::copy(x.begin(), x.end(), y.begin());
}

void check_sizes(std::span<const double> b, std::span<const double> x0)
{
    if (b.empty())
        throw std::invalid_argument("Krylov solve: empty right-hand side");
    if (!x0.empty() && x0.size() != b.size())
        throw std::invalid_argument("Krylov solve: initial guess and right-hand side differ in length");
}

} // namespace

void KrylovConfig::validate() const
{
    if (!(tol > 0.0))
        throw std::invalid_argument("Krylov config: tol must be positive");
    if (restart < 1)
        throw std::invalid_argument("Krylov config: restart must be at least 1");
}

SolveResult pcg(const LinearMap& apply_a, const LinearMap& apply_minv, std::span<const double> b,
                std::span<const double> x0, const KrylovConfig& cfg)
{
    cfg.validate();
    check_sizes(b, x0);
    const std::size_t n = b.size();
    const std::size_t cap = cfg.iteration_cap(n);

    SolveResult out;
    out.x = x0.empty() ? std::vector<double>(n, 0.0) : std::vector<double>(x0.begin(), x0.end());
    SolveStats& st = out.stats;
    st.reference_norm = norm2(b);
    if (st.reference_norm == 0.0) {
        std::fill(out.x.begin(), out.x.end(), 0.0);
        st.residual_history.push_back(0.0);
        st.converged = true;
        return out;
    }

    std::vector<double> r(n), z(n), p(n), ap(n);
    apply_a(out.x, ap);
    for (std::size_t i = 0; i < n; ++i)
        r[i] = b[i] - ap[i];
    double rel = norm2(r) / st.reference_norm;
    st.residual_history.push_back(rel);
    if (rel <= cfg.tol) {
        st.converged = true;
        return out;
    }

    apply_or_copy(apply_minv, r, z);
    p = z;
    double rz = dot(r, z);
    while (st.iterations < cap) {
        apply_a(p, ap);
        const double curvature = dot(p, ap);
        if (!(curvature > 0.0)) {
            st.breakdown_reason = "non-positive curvature";
            return out;
        }
        const double alpha = rz / curvature;
        axpy(alpha, p, out.x);
        axpy(-alpha, ap, r);
        ++st.iterations;
        rel = norm2(r) / st.reference_norm;
        if (rel <= cfg.tol) {
            // Confirm with the true residual before stopping.
            apply_a(out.x, ap);
            for (std::size_t i = 0; i < n; ++i)
                r[i] = b[i] - ap[i];
            rel = norm2(r) / st.reference_norm;
            st.residual_history.push_back(rel);
            if (rel <= cfg.tol) {
                st.converged = true;
                return out;
            }
        } else {
            st.residual_history.push_back(rel);
        }
        apply_or_copy(apply_minv, r, z);
        const double rz_next = dot(r, z);
        if (!(rz_next > 0.0)) {
            st.breakdown_reason = "preconditioner is not positive definite";
            return out;
        }
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i)
            p[i] = z[i] + beta * p[i];
    }
    st.breakdown_reason = "iteration cap reached";
    return out;
}

SolveResult gmres_restarted(const LinearMap& apply_a, const LinearMap& apply_minv, std::span<const double> b,
                            std::span<const double> x0, const KrylovConfig& cfg)
{
    cfg.validate();
    check_sizes(b, x0);
    const std::size_t n = b.size();
    const std::size_t cap = cfg.iteration_cap(n);
    const std::size_t m = std::min(cfg.restart, n);

    SolveResult out;
    out.x = x0.empty() ? std::vector<double>(n, 0.0) : std::vector<double>(x0.begin(), x0.end());
    SolveStats& st = out.stats;

    std::vector<double> tmp(n), w(n), r(n);
    apply_or_copy(apply_minv, b, r);
    st.reference_norm = norm2(r);
    if (st.reference_norm == 0.0) {
        std::fill(out.x.begin(), out.x.end(), 0.0);
        st.residual_history.push_back(0.0);
        st.converged = true;
        return out;
    }

    auto preconditioned_residual = [&](std::span<double> res) {
        apply_a(out.x, tmp);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = b[i] - tmp[i];
        apply_or_copy(apply_minv, tmp, res);
    };

    preconditioned_residual(r);
    double beta = norm2(r);
    st.residual_history.push_back(beta / st.reference_norm);
    if (beta / st.reference_norm <= cfg.tol) {
        st.converged = true;
        return out;
    }

    std::vector<std::vector<double>> v(m + 1, std::vector<double>(n));
    std::vector<std::vector<double>> h(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m), sn(m), g(m + 1);

    while (st.iterations < cap) {
        const double cycle_start = beta;
        for (std::size_t i = 0; i < n; ++i)
            v[0][i] = r[i] / beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;
        for (auto& row : h)
            std::fill(row.begin(), row.end(), 0.0);

        std::size_t k = 0;
        bool done = false;
        while (k < m && st.iterations < cap) {
            apply_a(v[k], tmp);
            apply_or_copy(apply_minv, tmp, w);
            const double w_norm = norm2(w);
            for (std::size_t i = 0; i <= k; ++i) {
                h[i][k] = dot(w, v[i]);
                axpy(-h[i][k], v[i], w);
            }
            h[k + 1][k] = norm2(w);
            const bool happy = h[k + 1][k] <= 1e-14 * w_norm;
            if (!happy)
                for (std::size_t i = 0; i < n; ++i)
                    v[k + 1][i] = w[i] / h[k + 1][k];

            for (std::size_t i = 0; i < k; ++i) {
                const double t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            const double denom = std::hypot(h[k][k], h[k + 1][k]);
            cs[k] = h[k][k] / denom;
            sn[k] = h[k + 1][k] / denom;
            h[k][k] = denom;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];

            ++k;
            ++st.iterations;
            const double rel = std::abs(g[k]) / st.reference_norm;
            st.residual_history.push_back(rel);
            if (rel <= cfg.tol || happy) {
                done = true;
                break;
            }
        }

        // x += V_k y with R y = g.
        std::vector<double> y(k);
        for (std::size_t i = k; i-- > 0;) {
            double s = g[i];
            for (std::size_t j = i + 1; j < k; ++j)
                s -= h[i][j] * y[j];
            y[i] = s / h[i][i];
        }
        for (std::size_t j = 0; j < k; ++j)
            axpy(y[j], v[j], out.x);

        preconditioned_residual(r);
        beta = norm2(r);
        if (done && beta / st.reference_norm <= cfg.tol) {
            st.converged = true;
            return out;
        }
        if (done) {
            // The least-squares estimate drifted from the true residual; keep cycling.
            st.residual_history.back() = beta / st.reference_norm;
        }
        if (!(beta < cycle_start * (1.0 - 1e-12))) {
            st.breakdown_reason = "stagnation over a full cycle";
            return out;
        }
    }
    st.breakdown_reason = "iteration cap reached";
    return out;
}

SolveResult gmres_two_sided(const LinearMap& apply_a, const LinearMap& apply_pinvhalf, std::span<const double> b,
                            const KrylovConfig& cfg, std::span<const double> v0)
{
    check_sizes(b, v0);
    const std::size_t n = b.size();
    std::vector<double> scratch(n);
    LinearMap sandwiched = [&](std::span<const double> x, std::span<double> y) {
        apply_pinvhalf(x, y);
        apply_a(y, scratch);
        apply_pinvhalf(scratch, y);
    };
    std::vector<double> bt(n);
    apply_pinvhalf(b, bt);
    SolveResult res = gmres_restarted(sandwiched, LinearMap{}, bt, v0, cfg);
    std::vector<double> u(n);
    apply_pinvhalf(res.x, u);
    res.x = std::move(u);
    return res;
}

std::pair<Field, SolveStats> pcg(const LinearMap& apply_a, const LinearMap& apply_minv, const Field& b,
                                 const Field& x0, const KrylovConfig& cfg)
{
    require_shape(x0, b.shape(), "pcg initial guess");
    SolveResult r = pcg(apply_a, apply_minv, b.values(), x0.values(), cfg);
    return {Field(b.shape(), std::move(r.x)), std::move(r.stats)};
}

std::pair<Field, SolveStats> gmres_restarted(const LinearMap& apply_a, const LinearMap& apply_minv, const Field& b,
                                             const Field& x0, const KrylovConfig& cfg)
{
    require_shape(x0, b.shape(), "gmres initial guess");
    SolveResult r = gmres_restarted(apply_a, apply_minv, b.values(), x0.values(), cfg);
    return {Field(b.shape(), std::move(r.x)), std::move(r.stats)};
}

std::pair<Field, SolveStats> gmres_two_sided(const LinearMap& apply_a, const LinearMap& apply_pinvhalf,
                                             const Field& b, const KrylovConfig& cfg)
{
    SolveResult r = gmres_two_sided(apply_a, apply_pinvhalf, b.values(), cfg);
    return {Field(b.shape(), std::move(r.x)), std::move(r.stats)};
}

} // namespace sfde
