#include "sfde/scheme.hpp"

#include "sfde/preconditioners.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sfde {

namespace {

double quartic_bump(double s) { return s * s * (1.0 - s) * (1.0 - s); }

double product_except(std::span<const double> x, std::size_t skip)
{
    double p = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j)
        if (j != skip)
            p *= quartic_bump(x[j]);
    return p;
}

/// Calls fn(flat, coords) for every interior node.
template <typename Fn>
void for_each_node(const GridSpec& grid, Fn&& fn)
{
    const std::size_t d = grid.dimension();
    const Shape sh = grid.shape();
    const std::size_t total = shape_size(sh);
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> x(d);
    for (std::size_t flat = 0; flat < total; ++flat) {
        for (std::size_t i = 0; i < d; ++i)
            x[i] = grid.node(i, idx[i] + 1);
        fn(flat, std::span<const double>(x));
        for (std::size_t i = 0; i < d; ++i) {
            if (++idx[i] < sh[i])
                break;
            idx[i] = 0;
        }
    }
}

std::string echo(const ProblemSpec& spec, Method method, const KrylovConfig& cfg)
{
    std::ostringstream os;
    os.precision(17);
    os << "problem=" << spec.name << " method=" << to_string(method) << " orders=";
    for (std::size_t i = 0; i < spec.orders.size(); ++i)
        os << (i ? ";" : "") << spec.orders[i].value();
    os << " k=";
    for (std::size_t i = 0; i < spec.diffusivities.size(); ++i)
        os << (i ? ";" : "") << spec.diffusivities[i].plus << "/" << spec.diffusivities[i].minus;
    os << " n=";
    for (std::size_t i = 0; i < spec.grid.dimension(); ++i)
        os << (i ? ";" : "") << spec.grid.interior(i);
    os << " M=" << spec.steps << " T=" << spec.horizon << " tol=" << cfg.tol << " restart=" << cfg.restart
       << " maxit=" << cfg.maxit << " guess=" << (cfg.initial_guess == InitialGuess::warm ? "warm" : "zero")
       << " quadrature=" << (spec.quadrature == SourceQuadrature::gauss2 ? "gauss2" : "midpoint");
    return os.str();
}

} // namespace

bool ProblemSpec::symmetric() const
{
    return std::all_of(diffusivities.begin(), diffusivities.end(), [](const Diffusivity& k) { return k.symmetric(); });
}

void ProblemSpec::validate() const
{
    const std::size_t d = grid.dimension();
    if (orders.size() != d || diffusivities.size() != d)
        throw std::invalid_argument("problem '" + name + "': one order and one diffusivity pair per axis required");
    if (steps == 0 || !(horizon > 0.0))
        throw std::invalid_argument("problem '" + name + "': need a positive horizon and at least one step");
    if (!source || !initial)
        throw std::invalid_argument("problem '" + name + "': source and initial callbacks are required");
}

std::vector<Diffusivity> preset_diffusivities(std::size_t dimension, DiffusivityPreset preset)
{
    static const std::array<Diffusivity, 3> nonsym{{{19.0, 21.0}, {21.0, 23.0}, {23.0, 25.0}}};
    if (dimension < 1 || dimension > 3)
        throw std::invalid_argument("preset diffusivities exist for up to three axes");
    std::vector<Diffusivity> k;
    for (std::size_t i = 0; i < dimension; ++i)
        k.push_back(preset == DiffusivityPreset::symmetric ? Diffusivity{5.0, 5.0} : nonsym[i]);
    return k;
}

double polynomial_flux_term(double s, double delta, Diffusivity k)
{
    static constexpr std::array<double, 3> sign_binom{1.0, -2.0, 1.0}; // (-1)^{2-k} C(2,k)
    double total = 0.0;
    for (int j = 0; j <= 2; ++j) {
        const double p = 2.0 - j + delta;
        const double c = sign_binom[static_cast<std::size_t>(j)] * std::tgamma(5.0 - j) / std::tgamma(3.0 - j + delta);
        total += c * (k.plus * std::pow(s, p) + k.minus * std::pow(1.0 - s, p));
    }
    return total;
}

ProblemSpec builtin_problem(const std::string& name, const std::vector<double>& orders, std::size_t n_plus_1,
                            std::size_t steps, const std::vector<Diffusivity>& diffusivities)
{
    std::size_t d = 0;
    if (name == "ex1")
        d = 2;
    else if (name == "ex2")
        d = 3;
    else
        throw std::invalid_argument("unknown built-in problem '" + name + "' (expected ex1 or ex2)");
    if (orders.size() != d)
        throw std::invalid_argument(name + " needs " + std::to_string(d) + " fractional orders");
    if (diffusivities.size() != d)
        throw std::invalid_argument(name + " needs " + std::to_string(d) + " diffusivity pairs");
    if (n_plus_1 < 2)
        throw std::invalid_argument("n+1 must be at least 2");

    ProblemSpec spec{.name = name, .grid = GridSpec::unit_box(d, n_plus_1 - 1), .orders = {}, .diffusivities = {}, .source = {}, .initial = {}, .exact = {}};
    for (double v : orders)
        spec.orders.emplace_back(v);
    spec.diffusivities = diffusivities;
    spec.horizon = 1.0;
    spec.steps = steps;

    std::vector<double> deltas = orders;
    std::vector<Diffusivity> k = diffusivities;
    // Time factor a(t) and its derivative; u = a(t) prod_i X(x_i).
    std::function<double(double)> a, da;
    if (name == "ex1") {
        a = [](double t) { return 4.0 * std::exp(t); };
        da = a;
    } else {
        a = [](double t) { return std::sin(t + 1.0); };
        da = [](double t) { return std::cos(t + 1.0); };
    }
    spec.exact = [a](std::span<const double> x, double t) { return a(t) * product_except(x, x.size()); };
    spec.initial = [a](std::span<const double> x) { return a(0.0) * product_except(x, x.size()); };
    spec.source = [a, da, deltas, k](std::span<const double> x, double t) {
        double flux = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            flux += polynomial_flux_term(x[i], deltas[i], k[i]) * product_except(x, i);
        return da(t) * product_except(x, x.size()) - a(t) * flux;
    };
    return spec;
}

Field interpolate(const GridSpec& grid, const SpaceFunction& fn)
{
    Field out(grid.shape());
    for_each_node(grid, [&](std::size_t flat, std::span<const double> x) { out[flat] = fn(x); });
    return out;
}

Field interpolate(const GridSpec& grid, const SpaceTimeFunction& fn, double t)
{
    Field out(grid.shape());
    for_each_node(grid, [&](std::size_t flat, std::span<const double> x) { out[flat] = fn(x, t); });
    return out;
}

Field cell_average_source(const ProblemSpec& spec, std::size_t m)
{
    if (m < 1 || m > spec.steps)
        throw std::out_of_range("cell_average_source: time index outside 1..M");
    const double t = (static_cast<double>(m) - 0.5) * spec.dt();
    const GridSpec& grid = spec.grid;
    const std::size_t d = grid.dimension();

    if (spec.quadrature == SourceQuadrature::midpoint)
        return interpolate(grid, spec.source, t);

    // Two-point Gauss per axis on [x_p - h/2, x_p + h/2]: nodes x_p +- h/(2 sqrt 3), equal weights.
    std::vector<double> offset(d);
    for (std::size_t i = 0; i < d; ++i)
        offset[i] = grid.step(i) / (2.0 * std::sqrt(3.0));
    const std::size_t corners = std::size_t{1} << d;
    const double weight = 1.0 / static_cast<double>(corners);

    Field out(grid.shape());
    std::vector<double> y(d);
    for_each_node(grid, [&](std::size_t flat, std::span<const double> x) {
        double acc = 0.0;
        for (std::size_t c = 0; c < corners; ++c) {
            for (std::size_t i = 0; i < d; ++i)
                y[i] = x[i] + (((c >> i) & 1u) ? offset[i] : -offset[i]);
            acc += spec.source(y, t);
        }
        out[flat] = weight * acc;
    });
    return out;
}

std::string to_string(Method m)
{
    switch (m) {
    case Method::cg: return "cg";
    case Method::pcg_tau: return "pcg_tau";
    case Method::pcg_strang: return "pcg_strang";
    case Method::pcg_chan: return "pcg_chan";
    case Method::gmres: return "gmres";
    case Method::pgmres_tau: return "pgmres_tau";
    case Method::pgmres_strang: return "pgmres_strang";
    case Method::pgmres_chan: return "pgmres_chan";
    }
    return "unknown";
}

const std::vector<Method>& all_methods()
{
    static const std::vector<Method> methods{Method::cg,    Method::pcg_tau,    Method::pcg_strang,    Method::pcg_chan,
                                             Method::gmres, Method::pgmres_tau, Method::pgmres_strang, Method::pgmres_chan};
    return methods;
}

Method parse_method(const std::string& name)
{
    for (Method m : all_methods())
        if (to_string(m) == name)
            return m;
    throw std::invalid_argument("unknown method '" + name + "'");
}

bool uses_cg(Method m)
{
    return m == Method::cg || m == Method::pcg_tau || m == Method::pcg_strang || m == Method::pcg_chan;
}

std::pair<Field, SolveStats> cn_step(const CnFvOperator& op_plus, const CnFvOperator& op_minus, const LinearMap& precond,
                                     const Field& u_prev, const Field& source, const KrylovConfig& cfg, bool use_cg)
{
    if (op_plus.sign() != OperatorSign::plus || op_minus.sign() != OperatorSign::minus)
        throw std::invalid_argument("cn_step: operators must be (plus, minus)");
    require_shape(u_prev, op_plus.shape(), "cn_step previous solution");
    require_shape(source, op_plus.shape(), "cn_step source");

    Field b = op_minus.apply(u_prev);
    const double dt = op_plus.dt();
    for (std::size_t j = 0; j < b.size(); ++j)
        b[j] += dt * source[j];

    const Field x0 = cfg.initial_guess == InitialGuess::warm ? u_prev : Field(u_prev.shape());
    LinearMap apply_a = [&op_plus](std::span<const double> x, std::span<double> y) { op_plus.apply(x, y); };
    return use_cg ? pcg(apply_a, precond, b, x0, cfg) : gmres_restarted(apply_a, precond, b, x0, cfg);
}

ErrorNorms error_norms(const GridSpec& grid, const Field& a, const Field& b)
{
    require_shape(a, grid.shape(), "error_norms");
    require_shape(b, grid.shape(), "error_norms");
    ErrorNorms e;
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = std::abs(a[j] - b[j]);
        e.max = std::max(e.max, diff);
        sum += diff * diff;
    }
    e.l2 = std::sqrt(grid.cell_volume() * sum);
    return e;
}

double SolveReport::mean_iterations() const
{
    if (steps.empty())
        return 0.0;
    double total = 0.0;
    for (const auto& s : steps)
        total += static_cast<double>(s.iterations);
    return total / static_cast<double>(steps.size());
}

bool SolveReport::all_converged() const
{
    return std::all_of(steps.begin(), steps.end(), [](const SolveStats& s) { return s.converged; });
}

SolveReport time_march(const ProblemSpec& spec, Method method, const KrylovConfig& cfg)
{
    spec.validate();
    cfg.validate();
    if (uses_cg(method) && !spec.symmetric())
        throw std::invalid_argument("method " + to_string(method) +
                                    " requires symmetric diffusivities (k_+ == k_- on every axis)");

    const auto start = std::chrono::steady_clock::now();
    const CnFvOperator op_plus(spec.grid, spec.orders, spec.diffusivities, spec.dt(), OperatorSign::plus);
    const CnFvOperator op_minus = op_plus.with_sign(OperatorSign::minus);

    LinearMap precond;
    std::optional<TauPreconditioner> tau;
    std::optional<CirculantPreconditioner> circ;
    switch (method) {
    case Method::pcg_tau:
    case Method::pgmres_tau:
        tau.emplace(assemble_tau(op_plus));
        precond = [&tau](std::span<const double> r, std::span<double> z) { tau->apply_inverse(r, z); };
        break;
    case Method::pcg_strang:
    case Method::pgmres_strang:
        circ.emplace(assemble_circulant(op_plus, CirculantVariant::strang));
        precond = [&circ](std::span<const double> r, std::span<double> z) { circ->apply_inverse(r, z); };
        break;
    case Method::pcg_chan:
    case Method::pgmres_chan:
        circ.emplace(assemble_circulant(op_plus, CirculantVariant::chan));
        precond = [&circ](std::span<const double> r, std::span<double> z) { circ->apply_inverse(r, z); };
        break;
    case Method::cg:
    case Method::gmres:
        break;
    }

    SolveReport report;
    report.problem = spec.name;
    report.method = method;
    report.config_echo = echo(spec, method, cfg);

    Field u = interpolate(spec.grid, spec.initial);
    for (std::size_t m = 1; m <= spec.steps; ++m) {
        const Field f = cell_average_source(spec, m);
        auto [next, stats] = cn_step(op_plus, op_minus, precond, u, f, cfg, uses_cg(method));
        u = std::move(next);
        report.steps.push_back(std::move(stats));
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (spec.exact)
        report.error = error_norms(spec.grid, u, interpolate(spec.grid, spec.exact, spec.horizon));
    report.solution = std::move(u);
    return report;
}

std::vector<double> observed_orders(std::span<const double> errors)
{
    if (errors.size() < 2)
        throw std::invalid_argument("observed order needs at least two refinement levels");
    std::vector<double> slopes;
    for (double e : errors)
        if (!(e > 0.0) || !std::isfinite(e))
            throw std::invalid_argument("observed order: errors must be positive and finite");
    for (std::size_t i = 1; i < errors.size(); ++i)
        slopes.push_back(std::log2(errors[i - 1] / errors[i]));
    return slopes;
}

double observed_order(const std::vector<SolveReport>& reports)
{
    std::vector<double> errors;
    for (const auto& r : reports) {
        if (!r.error)
            throw std::invalid_argument("observed order: report without an exact-solution error");
        errors.push_back(r.error->l2);
    }
    return observed_orders(errors).back();
}

} // namespace sfde
