#include "sfde/coeffs.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <utility>

namespace sfde {

FractionalOrder::FractionalOrder(double value) : value_(value)
{
    if (!(value > 0.0 && value < 1.0))
        throw std::domain_error("fractional order must lie in (0, 1), got " + std::to_string(value));
}

namespace {

// (x + 1)^d - 2 x^d + (x - 1)^d with x = k - 1/2.
//
// Direct evaluation loses about log10(x^2) digits to cancellation. Writing it
// as x^d * ((1+u)^d + (1-u)^d - 2), u = 1/x, the bracket is
// 2 * sum_{m>=1} binom(d, 2m) u^{2m}, and every binom(d, 2m) is negative for
// d in (0, 1), so the series sums without cancellation.
double second_difference(double d, double x)
{
    constexpr double series_threshold = 10.0;
    if (x < series_threshold)
        return std::pow(x + 1.0, d) - 2.0 * std::pow(x, d) + std::pow(x - 1.0, d);

    const double u2 = 1.0 / (x * x);
    double binom = 1.0; // binom(d, j), advanced two steps per term
    double power = 1.0;
    double sum = 0.0;
    for (int m = 1; m < 64; ++m) {
        const int j = 2 * m;
        binom *= (d - (j - 2)) / (j - 1);
        binom *= (d - (j - 1)) / j;
        power *= u2;
        const double term = binom * power;
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum))
            break;
    }
    return 2.0 * std::pow(x, d) * sum;
}

void check_size(std::size_t n)
{
    if (n < 2)
        throw std::invalid_argument("coefficient tables need n >= 2, got " + std::to_string(n));
}

} // namespace

std::vector<double> compute_s_coefficients(FractionalOrder order, std::size_t n)
{
    check_size(n);
    const double d = order.value();
    std::vector<double> s(n + 1);
    s[0] = std::pow(0.5, d);
    s[1] = std::pow(1.5, d) - 2.0 * s[0];
    for (std::size_t k = 2; k <= n; ++k)
        s[k] = second_difference(d, static_cast<double>(k) - 0.5);
    return s;
}

std::vector<double> compute_q_coefficients(FractionalOrder order, std::size_t n)
{
    const std::vector<double> s = compute_s_coefficients(order, n);
    std::vector<double> q(n + 1);
    q[0] = -s[0];
    for (std::size_t k = 1; k <= n; ++k)
        q[k] = s[k - 1] - s[k];
    return q;
}

std::shared_ptr<const CoefficientTable> coefficient_table(FractionalOrder order, std::size_t n)
{
    using Key = std::pair<std::uint64_t, std::size_t>;
    static std::map<Key, std::shared_ptr<const CoefficientTable>> cache;
    static std::shared_mutex mutex;

    const double d = order.value();
    std::uint64_t bits = 0;
    std::memcpy(&bits, &d, sizeof bits);
    const Key key{bits, n};

    {
        std::shared_lock lock(mutex);
        if (auto it = cache.find(key); it != cache.end())
            return it->second;
    }

    auto table = std::make_shared<const CoefficientTable>(
        CoefficientTable{order, n, compute_s_coefficients(order, n), compute_q_coefficients(order, n)});

    std::unique_lock lock(mutex);
    auto [it, inserted] = cache.emplace(key, std::move(table));
    return it->second;
}

} // namespace sfde
