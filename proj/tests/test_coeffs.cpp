#include "sfde/coeffs.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

using namespace sfde;

namespace {

// 40-digit mpmath evaluations of the defining closed form, frozen.
constexpr double kS05[] = {0.70710678118654752, -0.189468690981506, -0.16124413151244091};
constexpr double kQ05[] = {-0.70710678118654752, 0.89657547216805352, -0.028224559469065092};

bool sign_invariants_hold(const CoefficientTable& t)
{
    const auto& q = t.q;
    const std::size_t n = t.n;
    if (!(q[1] > 0.0) || !(q[0] + q[2] < 0.0))
        return false;
    for (std::size_t k = 3; k <= n; ++k)
        if (!(q[k] < 0.0))
            return false;
    double prev = q[0] + q[2];
    for (std::size_t k = 3; k <= n; ++k) {
        if (!(prev < q[k]))
            return false;
        prev = q[k];
    }
    double partial = q[0] + q[1];
    for (std::size_t m = 2; m <= n; ++m) {
        partial += q[m];
        if (!(partial > 0.0))
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("fractional order domain")
{
    CHECK_THROWS_AS(FractionalOrder(0.0), std::domain_error);
    CHECK_THROWS_AS(FractionalOrder(1.0), std::domain_error);
    CHECK_THROWS_AS(FractionalOrder(-0.2), std::domain_error);
    CHECK_THROWS_AS(FractionalOrder(std::nan("")), std::domain_error);
    CHECK(FractionalOrder(0.5).value() == 0.5);
}

TEST_CASE("s coefficients at delta = 0.5, n = 2")
{
    const auto s = compute_s_coefficients(FractionalOrder(0.5), 2);
    REQUIRE(s.size() == 3);
    for (int k = 0; k < 3; ++k)
        CHECK(s[k] == doctest::Approx(kS05[k]).epsilon(1e-14));
}

TEST_CASE("q coefficients at delta = 0.5, n = 2")
{
    const auto q = compute_q_coefficients(FractionalOrder(0.5), 2);
    REQUIRE(q.size() == 3);
    for (int k = 0; k < 3; ++k)
        CHECK(q[k] == doctest::Approx(kQ05[k]).epsilon(1e-13));
}

TEST_CASE("limit delta -> 1")
{
    const auto s = compute_s_coefficients(FractionalOrder(1.0 - 1e-12), 6);
    CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(s[1] == doctest::Approx(0.5).epsilon(1e-10));
    for (std::size_t k = 2; k < s.size(); ++k)
        CHECK(std::abs(s[k]) < 1e-10);
}

TEST_CASE("small n is rejected")
{
    CHECK_THROWS_AS(compute_s_coefficients(FractionalOrder(0.5), 1), std::invalid_argument);
    CHECK_THROWS_AS(coefficient_table(FractionalOrder(0.5), 0), std::invalid_argument);
}

TEST_CASE("large-k values against high-precision evaluations")
{
    // mpmath, 50 digits.
    struct Case {
        double delta;
        std::size_t k;
        double s;
    };
    const Case cases[] = {
        {0.3, 1000, -1.6695087657030388291e-6},
        {0.9, 512, -0.000094300202887481669635},
        {0.05, 20000, -1.9485263839689862006e-10},
        {0.5, 10, -0.0085677063423960993301},
        {0.5, 11, -0.0073687053607379363086},
    };
    for (const auto& c : cases) {
        const auto s = compute_s_coefficients(FractionalOrder(c.delta), c.k);
        CHECK(s[c.k] == doctest::Approx(c.s).epsilon(1e-12));
    }
}

TEST_CASE("q is the first difference of s")
{
    const auto t = coefficient_table(FractionalOrder(0.37), 300);
    CHECK(t->q[0] == -t->s[0]);
    for (std::size_t k = 1; k <= t->n; ++k)
        CHECK(t->q[k] == t->s[k - 1] - t->s[k]);
}

TEST_CASE("partial sums of q shrink toward zero")
{
    const FractionalOrder d(0.5);
    const auto t = coefficient_table(d, 10000);
    double prev = INFINITY;
    for (std::size_t n : {10u, 100u, 1000u, 10000u}) {
        double sum = 0.0;
        for (std::size_t k = 0; k <= n; ++k)
            sum += t->q[k];
        CHECK(std::abs(sum) < prev);
        CHECK(sum == doctest::Approx(-t->s[n]).epsilon(1e-9));
        prev = std::abs(sum);
    }
    CHECK(prev < 1e-2);
}

TEST_CASE("monotone tail for n = 5")
{
    for (double d : {0.05, 0.2, 0.5, 0.8, 0.95}) {
        const auto q = compute_q_coefficients(FractionalOrder(d), 5);
        CHECK(q[0] + q[2] < q[3]);
        CHECK(q[3] < q[4]);
        CHECK(q[4] < q[5]);
    }
}

TEST_CASE("sign and partial-sum invariants on random draws")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ud(0.01, 0.99);
    std::uniform_int_distribution<std::size_t> un(2, 512);
    for (int i = 0; i < 200; ++i) {
        const auto t = coefficient_table(FractionalOrder(ud(rng)), un(rng));
        CHECK(sign_invariants_hold(*t));
    }
}

TEST_CASE("table cache returns one instance across threads")
{
    const FractionalOrder d(0.4242);
    std::vector<std::shared_ptr<const CoefficientTable>> seen(8);
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < seen.size(); ++i)
        threads.emplace_back([&, i] { seen[i] = coefficient_table(d, 777); });
    for (auto& th : threads)
        th.join();
    for (const auto& p : seen)
        CHECK(p.get() == seen[0].get());
    CHECK(coefficient_table(d, 778).get() != seen[0].get());
}
