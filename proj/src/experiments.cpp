#include "sfde/experiments.hpp"

#include "sfde/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace sfde {

namespace {

struct Entry {
    std::string value;
    std::size_t line;
};

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep))
        out.push_back(trim(item));
    if (!s.empty() && s.back() == sep)
        out.emplace_back();
    return out;
}

class Reader {
public:
    Reader(std::map<std::string, Entry> entries, std::string source)
        : entries_(std::move(entries)), source_(std::move(source))
    {
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const
    {
        const auto it = entries_.find(key);
        std::string where = source_;
        if (it != entries_.end())
            where += ":" + std::to_string(it->second.line);
        throw ConfigError(where + ": key '" + key + "': " + what);
    }

    const std::string& raw(const std::string& key) const { return entries_.at(key).value; }

    double number(const std::string& key, const std::string& text) const
    {
        double v = 0.0;
        const char* begin = text.data();
        const char* end = begin + text.size();
        const auto [ptr, ec] = std::from_chars(begin, end, v);
        if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
            fail(key, "'" + text + "' is not a number");
        return v;
    }

    std::size_t count(const std::string& key, const std::string& text) const
    {
        std::size_t v = 0;
        const char* begin = text.data();
        const char* end = begin + text.size();
        const auto [ptr, ec] = std::from_chars(begin, end, v);
        if (text.empty() || ec != std::errc() || ptr != end)
            fail(key, "'" + text + "' is not a non-negative integer");
        return v;
    }

    double number(const std::string& key) const { return number(key, raw(key)); }
    std::size_t count(const std::string& key) const { return count(key, raw(key)); }

    std::vector<std::size_t> counts(const std::string& key) const
    {
        std::vector<std::size_t> out;
        for (const auto& item : split(raw(key), ','))
            out.push_back(count(key, item));
        return out;
    }

private:
    std::map<std::string, Entry> entries_;
    std::string source_;
};

const std::vector<std::string>& known_keys()
{
    static const std::vector<std::string> keys{
        "problem",   "orders",        "diffusivities",  "grid",          "steps",           "methods",
        "tol",       "maxit",         "restart",        "initial_guess", "quadrature",      "seed",
        "draws",     "symmetric_draws", "max_n",        "margin",        "temporal_grid",   "temporal_steps",
        "reference_steps", "spatial_grid", "spatial_steps_ratio"};
    return keys;
}

std::string join_orders(const std::vector<double>& orders)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < orders.size(); ++i)
        os << (i ? ";" : "") << orders[i];
    return os.str();
}

std::string paren_orders(const std::vector<double>& orders)
{
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < orders.size(); ++i)
        os << (i ? ", " : "") << orders[i];
    os << ')';
    return os.str();
}

std::string join_k(const std::vector<Diffusivity>& k, bool plus)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < k.size(); ++i)
        os << (i ? ";" : "") << (plus ? k[i].plus : k[i].minus);
    return os.str();
}

std::size_t steps_for(const ExperimentConfig& cfg, std::size_t i)
{
    return cfg.steps.size() == 1 ? cfg.steps[0] : cfg.steps[i];
}

ProblemSpec make_problem(const ExperimentConfig& cfg, const std::vector<double>& orders, std::size_t n_plus_1,
                         std::size_t steps)
{
    ProblemSpec spec = builtin_problem(cfg.problem, orders, n_plus_1, steps, cfg.diffusivities);
    spec.quadrature = cfg.quadrature;
    return spec;
}

Method order_study_method(const ExperimentConfig& cfg)
{
    if (!cfg.methods.empty())
        return cfg.methods.front();
    return cfg.symmetric() ? Method::pcg_tau : Method::pgmres_tau;
}

void require_orders(const ExperimentConfig& cfg)
{
    if (cfg.orders.empty())
        throw ConfigError("config: key 'orders' is required for this command");
}

void check_methods(const ExperimentConfig& cfg)
{
    if (cfg.symmetric())
        return;
    for (Method m : cfg.methods)
        if (uses_cg(m))
            throw ConfigError("config: key 'methods': " + to_string(m) +
                              " needs symmetric diffusivities but '" + cfg.diffusivity_label + "' is non-symmetric");
}

void open_output(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_file(const std::filesystem::path& path)
{
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("cannot write " + path.string());
    f << std::setprecision(10);
    return f;
}

} // namespace

bool ExperimentConfig::symmetric() const
{
    return std::all_of(diffusivities.begin(), diffusivities.end(), [](const Diffusivity& k) { return k.symmetric(); });
}

ExperimentConfig parse_config(std::istream& in, const std::string& source_name)
{
    std::map<std::string, Entry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        const std::string where = source_name + ":" + std::to_string(line_no);
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end())
            throw ConfigError(where + ": unknown key '" + key + "'");
        if (entries.count(key))
            throw ConfigError(where + ": key '" + key + "' given twice");
        if (value.empty())
            throw ConfigError(where + ": key '" + key + "' has no value");
        entries[key] = {value, line_no};
    }

    const Reader r(std::move(entries), source_name);
    ExperimentConfig cfg;

    if (r.has("problem")) {
        cfg.problem = r.raw("problem");
        if (cfg.problem != "ex1" && cfg.problem != "ex2")
            r.fail("problem", "expected ex1 or ex2");
    }
    const std::size_t d = cfg.dimension();

    if (r.has("orders")) {
        for (const auto& set : split(r.raw("orders"), ';')) {
            std::vector<double> values;
            for (const auto& item : split(set, ','))
                values.push_back(r.number("orders", item));
            if (values.size() != d)
                r.fail("orders", "each set needs " + std::to_string(d) + " values for " + cfg.problem);
            for (double v : values)
                if (!(v > 0.0 && v < 1.0))
                    r.fail("orders", "fractional orders must lie in (0, 1)");
            cfg.orders.push_back(std::move(values));
        }
    }

    cfg.diffusivity_label = r.has("diffusivities") ? r.raw("diffusivities") : "symmetric";
    if (cfg.diffusivity_label == "symmetric") {
        cfg.diffusivities = preset_diffusivities(d, DiffusivityPreset::symmetric);
    } else if (cfg.diffusivity_label == "nonsymmetric") {
        cfg.diffusivities = preset_diffusivities(d, DiffusivityPreset::nonsymmetric);
    } else {
        for (const auto& pair : split(cfg.diffusivity_label, ',')) {
            const auto parts = split(pair, '/');
            if (parts.size() != 2)
                r.fail("diffusivities", "expected 'symmetric', 'nonsymmetric' or k_plus/k_minus pairs");
            const Diffusivity k{r.number("diffusivities", parts[0]), r.number("diffusivities", parts[1])};
            if (!(k.plus > 0.0) || !(k.minus > 0.0))
                r.fail("diffusivities", "diffusivities must be positive");
            cfg.diffusivities.push_back(k);
        }
        if (cfg.diffusivities.size() != d)
            r.fail("diffusivities", "need " + std::to_string(d) + " pairs for " + cfg.problem);
    }

    if (r.has("grid")) {
        cfg.grid = r.counts("grid");
        for (std::size_t g : cfg.grid)
            if (g < 3)
                r.fail("grid", "n+1 must be at least 3");
    }
    if (r.has("steps")) {
        cfg.steps = r.counts("steps");
        for (std::size_t m : cfg.steps)
            if (m == 0)
                r.fail("steps", "M must be positive");
        if (cfg.steps.size() != 1 && cfg.steps.size() != cfg.grid.size())
            r.fail("steps", "give one M or one M per grid entry");
    }
    if (r.has("methods")) {
        for (const auto& name : split(r.raw("methods"), ',')) {
            try {
                cfg.methods.push_back(parse_method(name));
            } catch (const std::invalid_argument& e) {
                r.fail("methods", e.what());
            }
        }
    }

    if (r.has("tol")) {
        cfg.krylov.tol = r.number("tol");
        if (!(cfg.krylov.tol > 0.0))
            r.fail("tol", "must be positive");
    }
    if (r.has("maxit"))
        cfg.krylov.maxit = r.count("maxit");
    if (r.has("restart")) {
        cfg.krylov.restart = r.count("restart");
        if (cfg.krylov.restart == 0)
            r.fail("restart", "must be at least 1");
    }
    if (r.has("initial_guess")) {
        const std::string g = r.raw("initial_guess");
        if (g == "zero")
            cfg.krylov.initial_guess = InitialGuess::zero;
        else if (g == "warm")
            cfg.krylov.initial_guess = InitialGuess::warm;
        else
            r.fail("initial_guess", "expected zero or warm");
    }
    if (r.has("quadrature")) {
        const std::string q = r.raw("quadrature");
        if (q == "gauss2")
            cfg.quadrature = SourceQuadrature::gauss2;
        else if (q == "midpoint")
            cfg.quadrature = SourceQuadrature::midpoint;
        else
            r.fail("quadrature", "expected gauss2 or midpoint");
    }
    if (r.has("seed"))
        cfg.seed = r.count("seed");
    if (r.has("draws"))
        cfg.draws = r.count("draws");
    if (r.has("symmetric_draws"))
        cfg.symmetric_draws = r.count("symmetric_draws");
    if (r.has("max_n")) {
        cfg.max_n = r.count("max_n");
        if (cfg.max_n < 2)
            r.fail("max_n", "must be at least 2");
    }
    if (r.has("margin")) {
        cfg.margin = r.number("margin");
        if (cfg.margin < 0.0)
            r.fail("margin", "must be non-negative");
    }
    if (r.has("temporal_grid")) {
        cfg.temporal_grid = r.count("temporal_grid");
        if (cfg.temporal_grid < 3)
            r.fail("temporal_grid", "n+1 must be at least 3");
    }
    if (r.has("temporal_steps"))
        cfg.temporal_steps = r.counts("temporal_steps");
    if (r.has("reference_steps"))
        cfg.reference_steps = r.count("reference_steps");
    if (r.has("spatial_grid"))
        cfg.spatial_grid = r.counts("spatial_grid");
    if (r.has("spatial_steps_ratio")) {
        cfg.spatial_steps_ratio = r.number("spatial_steps_ratio");
        if (!(cfg.spatial_steps_ratio > 0.0))
            r.fail("spatial_steps_ratio", "must be positive");
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError(path.string() + ": cannot open config file");
    return parse_config(f, path.string());
}

std::vector<TableRow> run_table_rows(const ExperimentConfig& cfg)
{
    std::vector<TableRow> rows;
    for (const auto& orders : cfg.orders)
        for (std::size_t g = 0; g < cfg.grid.size(); ++g)
            for (Method method : cfg.methods) {
                TableRow row;
                row.orders = orders;
                row.n_plus_1 = cfg.grid[g];
                row.steps = steps_for(cfg, g);
                row.method = method;
                try {
                    const SolveReport rep =
                        time_march(make_problem(cfg, orders, row.n_plus_1, row.steps), method, cfg.krylov);
                    row.mean_iterations = rep.mean_iterations();
                    row.wall_seconds = rep.wall_seconds;
                    row.l2_error = rep.error ? rep.error->l2 : std::numeric_limits<double>::quiet_NaN();
                    row.max_error = rep.error ? rep.error->max : std::numeric_limits<double>::quiet_NaN();
                    row.converged = rep.all_converged();
                    if (!row.converged)
                        for (const auto& s : rep.steps)
                            if (!s.converged) {
                                row.failure = s.breakdown_reason.value_or("not converged");
                                break;
                            }
                } catch (const std::exception& e) {
                    row.converged = false;
                    row.failure = e.what();
                    row.l2_error = row.max_error = std::numeric_limits<double>::quiet_NaN();
                }
                rows.push_back(std::move(row));
            }
    return rows;
}

void write_table_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<TableRow>& rows)
{
    os << "orders,M,n_plus_1,method,mean_iters,wall_seconds,final_L2_error,final_max_error,converged_all_steps,"
          "problem,k_plus,k_minus,tol,restart,maxit,initial_guess,quadrature,failure\n";
    for (const auto& r : rows) {
        os << join_orders(r.orders) << ',' << r.steps << ',' << r.n_plus_1 << ',' << to_string(r.method) << ','
           << std::fixed << std::setprecision(2) << r.mean_iterations << ',' << std::setprecision(4)
           << r.wall_seconds << std::defaultfloat << std::setprecision(10) << ',' << r.l2_error << ','
           << r.max_error << ',' << (r.converged ? "true" : "false") << ',' << cfg.problem << ','
           << join_k(cfg.diffusivities, true) << ',' << join_k(cfg.diffusivities, false) << ',' << cfg.krylov.tol
           << ',' << cfg.krylov.restart << ',' << cfg.krylov.maxit << ','
           << (cfg.krylov.initial_guess == InitialGuess::zero ? "zero" : "warm") << ','
           << (cfg.quadrature == SourceQuadrature::gauss2 ? "gauss2" : "midpoint") << ',';
        std::string f = r.failure;
        std::replace(f.begin(), f.end(), ',', ';');
        os << f << '\n';
    }
}

void write_table_markdown(std::ostream& os, const ExperimentConfig& cfg, const std::vector<TableRow>& rows)
{
    os << "Problem " << cfg.problem << ", diffusivities " << cfg.diffusivity_label << ", tol " << cfg.krylov.tol
       << ", restart " << cfg.krylov.restart << "\n\n";
    os << "| orders | n+1 | M |";
    for (Method m : cfg.methods)
        os << ' ' << to_string(m) << " Iter | " << to_string(m) << " CPU |";
    os << "\n|---|---|---|";
    for (std::size_t i = 0; i < cfg.methods.size(); ++i)
        os << "---|---|";
    os << '\n';
    std::size_t idx = 0;
    for (const auto& orders : cfg.orders)
        for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
            os << "| " << paren_orders(orders) << " | " << cfg.grid[g] << " | " << steps_for(cfg, g) << " |";
            for (std::size_t m = 0; m < cfg.methods.size(); ++m, ++idx) {
                const TableRow& r = rows.at(idx);
                std::ostringstream iter, cpu;
                if (r.converged) {
                    iter << std::fixed << std::setprecision(2) << r.mean_iterations;
                    cpu << std::fixed << std::setprecision(2) << r.wall_seconds;
                } else {
                    iter << "failed";
                    cpu << "-";
                }
                os << ' ' << iter.str() << " | " << cpu.str() << " |";
            }
            os << '\n';
        }
}

std::vector<OrderRow> run_order_rows(const ExperimentConfig& cfg)
{
    const Method method = order_study_method(cfg);
    std::vector<OrderRow> rows;
    auto add_slopes = [&](std::size_t first) {
        for (std::size_t i = first; i < rows.size(); ++i) {
            if (i == first) {
                rows[i].slope_l2 = rows[i].slope_max = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            rows[i].slope_l2 = std::log2(rows[i - 1].l2_error / rows[i].l2_error);
            rows[i].slope_max = std::log2(rows[i - 1].max_error / rows[i].max_error);
        }
    };
    auto check = [](const SolveReport& rep) {
        if (!rep.all_converged())
            throw std::runtime_error("order study: solver did not converge (" + rep.config_echo + ")");
    };

    for (const auto& orders : cfg.orders) {
        const SolveReport ref =
            time_march(make_problem(cfg, orders, cfg.temporal_grid, cfg.reference_steps), method, cfg.krylov);
        check(ref);
        std::size_t first = rows.size();
        for (std::size_t m : cfg.temporal_steps) {
            const ProblemSpec spec = make_problem(cfg, orders, cfg.temporal_grid, m);
            const SolveReport rep = time_march(spec, method, cfg.krylov);
            check(rep);
            const ErrorNorms e = error_norms(spec.grid, rep.solution, ref.solution);
            rows.push_back({"temporal", orders, cfg.temporal_grid, m, e.l2, e.max, 0.0, 0.0});
        }
        add_slopes(first);

        first = rows.size();
        for (std::size_t g : cfg.spatial_grid) {
            const auto m = static_cast<std::size_t>(
                std::max(1.0, std::round(cfg.spatial_steps_ratio * static_cast<double>(g))));
            const SolveReport rep = time_march(make_problem(cfg, orders, g, m), method, cfg.krylov);
            check(rep);
            rows.push_back({"spatial", orders, g, m, rep.error->l2, rep.error->max, 0.0, 0.0});
        }
        add_slopes(first);
    }
    return rows;
}

void write_order_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<OrderRow>& rows)
{
    os << "study,orders,n_plus_1,M,l2_error,max_error,slope_l2,slope_max,problem,k_plus,k_minus,method,"
          "reference_steps\n";
    for (const auto& r : rows)
        os << r.study << ',' << join_orders(r.orders) << ',' << r.n_plus_1 << ',' << r.steps << ','
           << std::setprecision(10) << r.l2_error << ',' << r.max_error << ',' << r.slope_l2 << ',' << r.slope_max
           << ',' << cfg.problem << ',' << join_k(cfg.diffusivities, true) << ','
           << join_k(cfg.diffusivities, false) << ',' << to_string(order_study_method(cfg)) << ','
           << (r.study == "temporal" ? std::to_string(cfg.reference_steps) : std::string("exact")) << '\n';
}

void write_order_markdown(std::ostream& os, const std::vector<OrderRow>& rows)
{
    os << "| study | orders | n+1 | M | L2 error | slope | max error | slope |\n|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : rows) {
        std::ostringstream line;
        line << "| " << r.study << " | " << paren_orders(r.orders) << " | " << r.n_plus_1 << " | " << r.steps
             << " | " << std::scientific << std::setprecision(3) << r.l2_error << " | ";
        if (std::isnan(r.slope_l2))
            line << "- | ";
        else
            line << std::fixed << std::setprecision(2) << r.slope_l2 << " | ";
        line << std::scientific << std::setprecision(3) << r.max_error << " | ";
        if (std::isnan(r.slope_max))
            line << "- |";
        else
            line << std::fixed << std::setprecision(2) << r.slope_max << " |";
        os << line.str() << '\n';
    }
}

std::vector<CnFvOperator> verification_instances(const ExperimentConfig& cfg)
{
    if (cfg.max_n * cfg.max_n * cfg.max_n > kEigenSizeLimit)
        throw ConfigError("config: key 'max_n': " + std::to_string(cfg.max_n) +
                          "^3 unknowns exceed the dense eigensolver limit of " + std::to_string(kEigenSizeLimit));
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> size(2, cfg.max_n);
    std::uniform_int_distribution<std::size_t> dim(2, 3);
    std::vector<CnFvOperator> ops;
    const std::size_t total = cfg.draws + cfg.symmetric_draws;
    for (std::size_t i = 0; i < total; ++i) {
        const bool symmetric = i >= cfg.draws;
        const std::size_t d = dim(rng);
        std::vector<GridSpec::Axis> axes;
        std::vector<FractionalOrder> orders;
        std::vector<Diffusivity> k;
        for (std::size_t a = 0; a < d; ++a) {
            axes.push_back({0.0, 1.0, size(rng)});
            orders.emplace_back(0.05 + 0.9 * unit(rng));
            const double plus = 0.5 + 29.5 * unit(rng);
            const double minus = symmetric ? plus : 0.5 + 29.5 * unit(rng);
            k.push_back({plus, minus});
        }
        const double dt = std::pow(10.0, -3.0 + 3.0 * unit(rng));
        ops.emplace_back(GridSpec(std::move(axes)), std::move(orders), std::move(k), dt);
    }
    return ops;
}

int run_table(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log)
{
    require_orders(cfg);
    if (cfg.methods.empty())
        throw ConfigError("config: key 'methods' must list at least one method");
    if (cfg.grid.empty())
        throw ConfigError("config: key 'grid' must list at least one n+1 value");
    if (cfg.steps.empty())
        throw ConfigError("config: key 'steps' must list at least one M value");
    check_methods(cfg);

    const std::vector<TableRow> rows = run_table_rows(cfg);
    open_output(out);
    auto csv = open_file(out / "table.csv");
    write_table_csv(csv, cfg, rows);
    auto md = open_file(out / "table.md");
    write_table_markdown(md, cfg, rows);

    bool ok = true;
    for (const auto& r : rows) {
        log << paren_orders(r.orders) << " n+1=" << r.n_plus_1 << " M=" << r.steps << ' ' << to_string(r.method)
            << ": " << std::fixed << std::setprecision(2) << r.mean_iterations << " iterations"
            << (r.converged ? "" : " FAILED (" + r.failure + ")") << std::defaultfloat << '\n';
        ok = ok && r.converged;
    }
    return ok ? kExitOk : kExitRowFailure;
}

int run_verification(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log)
{
    if (cfg.draws + cfg.symmetric_draws == 0)
        throw ConfigError("config: keys 'draws' and 'symmetric_draws' request no instances");
    const std::vector<CnFvOperator> ops = verification_instances(cfg);
    std::vector<VerificationRow> rows;
    for (std::size_t i = 0; i < ops.size(); ++i)
        rows.push_back(verify_instance("draw" + std::to_string(i), ops[i], cfg.margin));

    open_output(out);
    auto csv = open_file(out / "bounds.csv");
    write_bound_report_header(csv);
    for (const auto& r : rows)
        write_bound_report_row(csv, r);

    auto md = open_file(out / "bounds.md");
    md << "| instance | shape | lambda_min | lambda_max | skew radius | varsigma | omega | pass |\n"
          "|---|---|---|---|---|---|---|---|\n";
    bool ok = true;
    for (const auto& r : rows) {
        std::string shape;
        for (std::size_t i = 0; i < r.shape.size(); ++i)
            shape += (i ? "x" : "") + std::to_string(r.shape[i]);
        md << "| " << r.label << " | " << shape << " | " << std::fixed << std::setprecision(6)
           << r.bounds.hermitian_min << " | " << r.bounds.hermitian_max << " | " << r.bounds.skew_radius << " | "
           << r.bounds.varsigma << " | " << r.bounds.omega << " | " << (r.passed() ? "yes" : "no") << " |\n";
        ok = ok && r.passed();
    }
    const auto passed = std::count_if(rows.begin(), rows.end(), [](const VerificationRow& r) { return r.passed(); });
    log << passed << " of " << rows.size() << " instances satisfy every bound\n";
    return ok ? kExitOk : kExitRowFailure;
}

int run_order_study(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log)
{
    require_orders(cfg);
    if (cfg.temporal_steps.size() < 3 || cfg.spatial_grid.size() < 3)
        throw ConfigError("config: keys 'temporal_steps' and 'spatial_grid' need at least three levels");
    if (uses_cg(order_study_method(cfg)) && !cfg.symmetric())
        throw ConfigError("config: key 'methods': CG-family method with non-symmetric diffusivities");

    std::vector<OrderRow> rows;
    try {
        rows = run_order_rows(cfg);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        log << "order study failed: " << e.what() << '\n';
        return kExitRowFailure;
    }
    open_output(out);
    auto csv = open_file(out / "order.csv");
    write_order_csv(csv, cfg, rows);
    auto md = open_file(out / "order.md");
    write_order_markdown(md, rows);
    for (const auto& r : rows)
        if (!std::isnan(r.slope_l2))
            log << r.study << ' ' << paren_orders(r.orders) << " n+1=" << r.n_plus_1 << " M=" << r.steps
                << " slope " << std::fixed << std::setprecision(3) << r.slope_l2 << std::defaultfloat << '\n';
    return kExitOk;
}

} // namespace sfde
