// Desk-scale acceptance run: one PASS/FAIL line per criterion.

#include "sfde/analysis.hpp"
#include "sfde/experiments.hpp"
#include "sfde/preconditioners.hpp"
#include "sfde/scheme.hpp"
#include "sfde/transforms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace sfde;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& run)
{
    Outcome o;
    try {
        o = run();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass)
        ++failures;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
}

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

double mean_iters(const std::string& problem, std::vector<double> orders, std::size_t n_plus_1, std::size_t steps,
                  DiffusivityPreset preset, Method method)
{
    const auto k = preset_diffusivities(orders.size(), preset);
    const auto spec = builtin_problem(problem, orders, n_plus_1, steps, k);
    KrylovConfig cfg; // tol 1e-9, zero initial guess, restart 20
    const auto rep = time_march(spec, method, cfg);
    if (!rep.all_converged())
        throw std::runtime_error(to_string(method) + " did not converge on every step");
    return rep.mean_iterations();
}

double relative_error(std::span<const double> got, std::span<const double> ref)
{
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        diff = std::max(diff, std::abs(got[i] - ref[i]));
        scale = std::max(scale, std::abs(ref[i]));
    }
    return diff / scale;
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v)
        x = ud(rng);
    return v;
}

Outcome symmetric_3d_cell()
{
    const auto t0 = Clock::now();
    const std::vector<double> orders{0.1, 0.2, 0.3};
    const double tau = mean_iters("ex2", orders, 8, 4, DiffusivityPreset::symmetric, Method::pcg_tau);
    const double cg = mean_iters("ex2", orders, 8, 4, DiffusivityPreset::symmetric, Method::cg);
    const double t = seconds_since(t0);
    return {within(tau, 3, 7) && within(cg, 13, 21) && t < 10.0,
            fmt("pcg_tau %.2f in [3,7], cg %.2f in [13,21], %.2f s < 10 s", tau, cg, t)};
}

Outcome symmetric_2d_cells()
{
    const auto sym = DiffusivityPreset::symmetric;
    const double a64 = mean_iters("ex1", {0.1, 0.2}, 64, 8, sym, Method::pcg_tau);
    const double b64 = mean_iters("ex1", {0.4, 0.5}, 64, 8, sym, Method::pcg_tau);
    const double a128 = mean_iters("ex1", {0.1, 0.2}, 128, 8, sym, Method::pcg_tau);
    const double b128 = mean_iters("ex1", {0.4, 0.5}, 128, 8, sym, Method::pcg_tau);
    const bool ok = within(a64, 4, 8) && within(b64, 5, 9) && std::abs(a128 - a64) <= 2.0 &&
                    std::abs(b128 - b64) <= 2.0;
    return {ok, fmt("(0.1,0.2) %.2f in [4,8], (0.4,0.5) %.2f in [5,9]; n+1=128: %.2f, %.2f (|diff| <= 2)", a64, b64,
                    a128, b128)};
}

Outcome nonsymmetric_cells()
{
    const auto ns = DiffusivityPreset::nonsymmetric;
    const double tau2 = mean_iters("ex1", {0.1, 0.2}, 64, 8, ns, Method::pgmres_tau);
    const double tau3 = mean_iters("ex2", {0.1, 0.2, 0.3}, 8, 4, ns, Method::pgmres_tau);
    const double strang = mean_iters("ex1", {0.1, 0.2}, 64, 8, ns, Method::pgmres_strang);
    const double chan = mean_iters("ex1", {0.1, 0.2}, 64, 8, ns, Method::pgmres_chan);
    const bool ok = std::abs(tau2 - 6.0) <= 2.0 && std::abs(tau3 - 6.0) <= 2.0 && strang > tau2 && chan > tau2;
    return {ok, fmt("2D pgmres_tau %.2f (6 +- 2), 3D pgmres_tau %.2f (6 +- 2), strang %.2f and chan %.2f > tau", tau2,
                    tau3, strang, chan)};
}

std::vector<VerificationRow> verify_draws(std::uint64_t seed, std::size_t draws, double margin)
{
    ExperimentConfig cfg;
    cfg.seed = seed;
    cfg.draws = draws;
    cfg.symmetric_draws = 0;
    cfg.max_n = 6;
    cfg.margin = margin;
    std::vector<VerificationRow> rows;
    std::size_t i = 0;
    for (const auto& op : verification_instances(cfg))
        rows.push_back(verify_instance("draw" + std::to_string(i++), op, margin));
    return rows;
}

Outcome spectral_bounds()
{
    const auto t0 = Clock::now();
    const double margin = 1e-10;
    const auto rows = verify_draws(20240601, 20, margin);
    double lo = INFINITY, hi = -INFINITY, slack = INFINITY;
    bool ok = rows.size() == 20;
    for (const auto& r : rows) {
        ok = ok && r.hermitian_ok && r.skew_ok;
        lo = std::min(lo, r.bounds.hermitian_min);
        hi = std::max(hi, r.bounds.hermitian_max);
        slack = std::min(slack, r.bounds.varsigma - r.bounds.skew_radius);
    }
    const double t = seconds_since(t0);
    ok = ok && lo > 0.5 + margin && hi < 1.5 - margin && t < 60.0;
    return {ok, fmt("%zu draws, hermitian spectrum [%.4f, %.4f] in (0.5,1.5), min(varsigma - skew) %.3e, margin %.0e, "
                    "%.2f s < 60 s",
                    rows.size(), lo, hi, slack, margin, t)};
}

Outcome gmres_envelope()
{
    const auto rows = verify_draws(7, 5, 1e-10);
    std::size_t env = 0, rel = 0;
    for (const auto& r : rows) {
        env += r.envelope_ok;
        rel += r.residual_relation_ok;
    }
    return {env == 5 && rel == 5, fmt("envelope %zu/5, one- vs two-sided relation %zu/5", env, rel)};
}

Outcome symbol_bounds()
{
    const auto angles = chebyshev_angles(50);
    double worst_gap = 0.0, min_margin = INFINITY, min_re = INFINITY;
    bool ok = true;
    for (double d : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const FractionalOrder o(d);
        const double cap = std::tan(d * std::numbers::pi / 2);
        for (double th : angles) {
            const auto tr = symbol_truncated(o, th, 100000);
            const auto lr = symbol_lerch(o, th);
            const double gap = std::abs(tr - lr);
            worst_gap = std::max(worst_gap, gap);
            min_re = std::min(min_re, lr.real());
            const double ratio = std::abs(lr.imag()) / lr.real();
            min_margin = std::min(min_margin, 1.0 - ratio / cap);
            ok = ok && gap <= 1e-6 && lr.real() > 0.0 && ratio < cap;
        }
    }
    return {ok, fmt("250 samples, max |truncated - closed form| %.2e <= 1e-6, min Re %.3e > 0, "
                    "min 1 - (|Im|/Re)/tan %.2e > 0",
                    worst_gap, min_re, min_margin)};
}

Outcome coefficient_invariants()
{
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> un(2, 512);
    std::size_t good = 0;
    double telescope = 0.0;
    for (int i = 0; i < 1000; ++i) {
        double d = ud(rng);
        while (!(d > 0.0 && d < 1.0))
            d = ud(rng);
        const std::size_t n = un(rng);
        const auto s = compute_s_coefficients(FractionalOrder(d), n);
        const auto q = compute_q_coefficients(FractionalOrder(d), n);
        bool ok = q[0] == -s[0] && q[1] > 0.0 && q[0] + q[2] < 0.0;
        for (std::size_t k = 1; k <= n; ++k)
            ok = ok && q[k] == s[k - 1] - s[k];
        for (std::size_t k = 3; k <= n; ++k)
            ok = ok && q[k] < 0.0 && q[k] > (k == 3 ? q[0] + q[2] : q[k - 1]);
        double partial = q[0] + q[1], sum = q[0] + q[1];
        for (std::size_t m = 2; m <= n; ++m) {
            partial += q[m];
            sum += q[m];
            ok = ok && partial > 0.0;
        }
        telescope = std::max(telescope, std::abs(sum + s[n]));
        good += ok;
    }
    return {good == 1000 && telescope < 1e-14,
            fmt("%zu/1000 draws satisfy every invariant, max |sum q + s_n| %.1e", good, telescope)};
}

Outcome kernel_oracles()
{
    const auto t0 = Clock::now();
    double worst = 0.0;
    auto track = [&](double e) { worst = std::max(worst, e); };

    { // Toeplitz, n = 4096, against the direct sum.
        const std::size_t n = 4096;
        const auto q = compute_q_coefficients(FractionalOrder(0.37), n);
        ToeplitzOperator t(q);
        const auto x = random_vector(n, 1);
        std::vector<double> y(n, 0.0), yt(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (i + 1 < n) {
                y[i] += q[0] * x[i + 1];
                yt[i + 1] += q[0] * x[i];
            }
            for (std::size_t j = 0; j <= i; ++j) {
                y[i] += q[i - j + 1] * x[j];
                yt[j] += q[i - j + 1] * x[i];
            }
        }
        track(relative_error(t.apply(x), y));
        track(relative_error(t.apply(x, true), yt));
    }
    { // DST-I, n = 4096: naive product, involution, norm.
        const std::size_t n = 4096;
        SineTransformPlan plan(n);
        const auto x = random_vector(n, 2);
        const auto y = plan.apply(x);
        std::vector<double> ref(n, 0.0);
        const double c = std::sqrt(2.0 / (n + 1.0));
        const std::size_t period = 2 * (n + 1);
        std::vector<double> table(period);
        for (std::size_t m = 0; m < period; ++m)
            table[m] = std::sin(static_cast<double>(m) * std::numbers::pi / static_cast<double>(n + 1));
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                ref[j] += c * table[((j + 1) * (k + 1)) % period] * x[k];
        track(relative_error(y, ref));
        track(relative_error(plan.apply(y), x));
        double nx = 0.0, ny = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            nx += x[i] * x[i];
            ny += y[i] * y[i];
        }
        track(std::abs(nx - ny) / nx);
        Field u({64, 64}, random_vector(4096, 3));
        const auto plans = make_sine_plans(u.shape());
        track(relative_error(tensor_dst_apply(plans, tensor_dst_apply(plans, u)).values(), u.values()));
    }
    // Operators at N = 4096 in 2D and 3D.
    const std::vector<CnFvOperator> ops{
        CnFvOperator(GridSpec::unit_box(2, 64), {FractionalOrder(0.3), FractionalOrder(0.8)}, {{19, 21}, {21, 23}},
                     1.0 / 8.0),
        CnFvOperator(GridSpec::unit_box(3, 16), {FractionalOrder(0.1), FractionalOrder(0.5), FractionalOrder(0.9)},
                     {{5, 5}, {21, 23}, {23, 25}}, 1.0 / 4.0),
    };
    for (const auto& op : ops) {
        Field u(op.shape(), random_vector(op.size(), 4));
        track(relative_error(operator_apply(op, u).values(), materialize_dense(op).multiply(u.values())));
        const auto p = assemble_tau(op);
        const auto z = apply_tau_inverse(p, u);
        track(relative_error(tau_preconditioner_dense(op).multiply(z.values()), u.values()));
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-11 && t < 30.0, fmt("max relative error %.2e <= 1e-11 at N = 4096, %.2f s < 30 s", worst, t)};
}

Outcome convergence_orders()
{
    const auto t0 = Clock::now();
    auto study = [](DiffusivityPreset preset) {
        ExperimentConfig cfg;
        cfg.problem = "ex1";
        cfg.orders = {{0.5, 0.5}};
        cfg.diffusivities = preset_diffusivities(2, preset);
        cfg.krylov.tol = 1e-12;
        cfg.temporal_grid = 64;
        cfg.temporal_steps = {4, 8, 16};
        cfg.reference_steps = 256;
        cfg.spatial_grid = {16, 32, 64};
        cfg.spatial_steps_ratio = 0.5;
        return run_order_rows(cfg);
    };
    auto final_slope = [](const std::vector<OrderRow>& rows, const std::string& kind) {
        double s = NAN;
        for (const auto& r : rows)
            if (r.study == kind)
                s = r.slope_l2;
        return s;
    };
    const auto sym = study(DiffusivityPreset::symmetric);
    const auto nonsym = study(DiffusivityPreset::nonsymmetric);
    const double temporal = final_slope(sym, "temporal");
    const double spatial = final_slope(sym, "spatial");
    const double spatial_ns = final_slope(nonsym, "spatial");
    const double t = seconds_since(t0);
    const bool ok = std::abs(temporal - 2.0) <= 0.2 && std::abs(spatial - 2.0) <= 0.2 && spatial_ns >= 1.3 &&
                    t < 300.0;
    return {ok, fmt("temporal %.3f (2 +- 0.2), spatial symmetric %.3f (2 +- 0.2), spatial non-symmetric %.3f (>= 1.3), "
                    "%.1f s < 300 s",
                    temporal, spatial, spatial_ns, t)};
}

} // namespace

int main()
{
    report(1, "3D symmetric iteration cell", symmetric_3d_cell);
    report(2, "2D symmetric iteration cells", symmetric_2d_cells);
    report(3, "non-symmetric iteration cells", nonsymmetric_cells);
    report(4, "spectral bounds on random draws", spectral_bounds);
    report(5, "GMRES residual envelope", gmres_envelope);
    report(6, "generating-function bounds", symbol_bounds);
    report(7, "coefficient invariants", coefficient_invariants);
    report(8, "kernel oracles", kernel_oracles);
    report(9, "convergence orders", convergence_orders);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
