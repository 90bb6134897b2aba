#include "sfde/preconditioners.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace sfde;
using sfde_test::max_abs;
using sfde_test::max_abs_diff;
using sfde_test::random_vector;

namespace {

Eigen::MatrixXd hermitian_toeplitz(const CoefficientTable& t, std::size_t n)
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            auto entry = [&](std::size_t r, std::size_t c) {
                return c == r + 1 ? t.q[0] : (c <= r ? t.q[r - c + 1] : 0.0);
            };
            m(i, j) = 0.5 * (entry(i, j) + entry(j, i));
        }
    return m;
}

std::vector<double> sorted(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    return v;
}

// Frobenius-nearest circulant: average of each wrapped diagonal.
std::vector<double> wrapped_diagonal_means(const Eigen::MatrixXd& a)
{
    const auto n = static_cast<std::size_t>(a.rows());
    std::vector<double> c(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i)
            c[j] += a((i + j) % n, i);
        c[j] /= static_cast<double>(n);
    }
    return c;
}

} // namespace

TEST_CASE("mass eigenvalues")
{
    CHECK(mass_eigenvalues(1)[0] == doctest::Approx(0.75));
    const auto m3 = mass_eigenvalues(3);
    CHECK(m3[0] == doctest::Approx((3.0 + std::sqrt(0.5)) / 4.0));
    CHECK(m3[1] == doctest::Approx(0.75));
    CHECK(m3[2] == doctest::Approx((3.0 - std::sqrt(0.5)) / 4.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sfde_test::to_eigen(mass_matrix_dense(32)));
    const auto ev = sorted(mass_eigenvalues(32));
    for (std::size_t i = 0; i < 32; ++i) {
        CHECK(std::abs(ev[i] - es.eigenvalues()(static_cast<Eigen::Index>(i))) < 1e-12);
        CHECK(ev[i] > 0.5);
        CHECK(ev[i] < 1.0);
    }
}

TEST_CASE("tau eigenvalues at delta = 0.5, n = 2")
{
    const auto t = coefficient_table(FractionalOrder(0.5), 2);
    const auto ev = tau_sym_eigenvalues(*t);
    // q_1 -/+ (q_0 + q_2)/2 with the 40-digit q values.
    CHECK(ev[0] == doctest::Approx(0.528909801840247215).epsilon(1e-13));
    CHECK(ev[1] == doctest::Approx(1.264241142495859825).epsilon(1e-13));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sfde_test::to_eigen(tau_matrix_dense(*t, 2)));
    CHECK(sorted(ev)[0] == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-13));
    CHECK(sorted(ev)[1] == doctest::Approx(es.eigenvalues()(1)).epsilon(1e-13));
}

TEST_CASE("tau matrix is diagonalized by the sine transform")
{
    for (double d : {0.1, 0.5, 0.9}) {
        for (std::size_t n : {3u, 8u, 17u}) {
            const auto t = coefficient_table(FractionalOrder(d), n);
            const Eigen::MatrixXd tau = sfde_test::to_eigen(tau_matrix_dense(*t, n));
            Eigen::MatrixXd s(n, n);
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k)
                    s(j, k) = std::sqrt(2.0 / (n + 1.0)) * std::sin((j + 1.0) * (k + 1.0) * std::numbers::pi / (n + 1.0));
            const Eigen::MatrixXd diag = s * tau * s;
            const auto ev = tau_sym_eigenvalues(*t);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    CHECK(std::abs(diag(i, j) - (i == j ? ev[i] : 0.0)) < 1e-13);
        }
    }
}

TEST_CASE("tau eigenvalues are positive and cluster H")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ud(0.02, 0.98);
    for (int draw = 0; draw < 30; ++draw) {
        const double d = ud(rng);
        const std::size_t n = 2 + static_cast<std::size_t>(draw) % 63;
        const auto t = coefficient_table(FractionalOrder(d), n);
        for (double v : tau_sym_eigenvalues(*t))
            CHECK(v > 0.0);
        if (n <= 32) {
            Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
                hermitian_toeplitz(*t, n), sfde_test::to_eigen(tau_matrix_dense(*t, n)));
            CHECK(ges.eigenvalues().minCoeff() > 0.5);
            CHECK(ges.eigenvalues().maxCoeff() < 1.5);
        }
    }
}

TEST_CASE("hermitian first column")
{
    const auto t = coefficient_table(FractionalOrder(0.4), 6);
    const auto c = hermitian_first_column(*t, 6);
    const auto h = hermitian_toeplitz(*t, 6);
    for (std::size_t i = 0; i < 6; ++i)
        CHECK(c[i] == doctest::Approx(h(static_cast<Eigen::Index>(i), 0)).epsilon(1e-15));
}

TEST_CASE("zero diffusivity: eigen-tensor is the mass product")
{
    const auto grid = GridSpec::unit_box(3, 5);
    CnFvOperator op(grid, {FractionalOrder(0.2), FractionalOrder(0.4), FractionalOrder(0.6)},
                    {{0, 0}, {0, 0}, {0, 0}}, 0.1);
    const auto p = assemble_tau(op);
    const auto m = mass_eigenvalues(5);
    const auto& lam = p.eigen_tensor();
    for (std::size_t k = 0; k < 5; ++k)
        for (std::size_t j = 0; j < 5; ++j)
            for (std::size_t i = 0; i < 5; ++i) {
                const double v = lam[i + 5 * (j + 5 * k)];
                CHECK(v == doctest::Approx(m[i] * m[j] * m[k]).epsilon(1e-14));
                CHECK(v > 0.125);
                CHECK(v < 1.0);
            }
}

TEST_CASE("dense tau preconditioner spectrum equals the eigen-tensor")
{
    const auto grid = GridSpec::unit_box(2, 4);
    CnFvOperator op(grid, {FractionalOrder(0.3), FractionalOrder(0.8)}, {{19, 21}, {21, 23}}, 0.05);
    const auto p = assemble_tau(op);
    const auto dense = sfde_test::to_eigen(tau_preconditioner_dense(op));
    CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() < 1e-13);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    const auto lam = sorted(p.eigen_tensor().storage());
    for (std::size_t i = 0; i < lam.size(); ++i)
        CHECK(std::abs(lam[i] - es.eigenvalues()(static_cast<Eigen::Index>(i))) < 1e-11 * std::max(1.0, lam[i]));
}

TEST_CASE("3D example parameters keep the smallest eigenvalue above 1/8")
{
    const auto grid = GridSpec::unit_box(3, 3);
    for (double dt : {0.25, 1e-3, 1e-6}) {
        CnFvOperator op(grid, {FractionalOrder(0.1), FractionalOrder(0.2), FractionalOrder(0.3)},
                        {{5, 5}, {5, 5}, {5, 5}}, dt);
        CHECK(assemble_tau(op).min_eigenvalue() > 0.125);
    }
}

TEST_CASE("tau inverse")
{
    SUBCASE("unit eigen-tensor is the identity")
    {
        const auto grid = GridSpec::unit_box(2, 6);
        TauPreconditioner p(grid, Field(grid.shape(), 1.0));
        Field r(grid.shape(), random_vector(36, 1));
        CHECK(max_abs_diff(apply_tau_inverse(p, r).values(), r.values()) < 1e-14);
    }
    SUBCASE("dense P times the inverse")
    {
        const auto grid = GridSpec::unit_box(2, 4);
        CnFvOperator op(grid, {FractionalOrder(0.5), FractionalOrder(0.5)}, {{5, 5}, {5, 5}}, 0.125);
        const auto p = assemble_tau(op);
        Field r(grid.shape(), random_vector(16, 2));
        const auto z = p.apply_inverse(r);
        CHECK(max_abs_diff(tau_preconditioner_dense(op).multiply(z.values()), r.values()) < 1e-11);
        CHECK(max_abs_diff(p.apply(z).values(), r.values()) < 1e-12);
        const auto h = p.apply_inverse_sqrt(p.apply_inverse_sqrt(r));
        CHECK(max_abs_diff(h.values(), z.values()) < 1e-12);
    }
    SUBCASE("linearity in 3D")
    {
        const auto grid = GridSpec::unit_box(3, 4);
        CnFvOperator op(grid, {FractionalOrder(0.2), FractionalOrder(0.5), FractionalOrder(0.7)},
                        {{19, 21}, {21, 23}, {23, 25}}, 0.1);
        const auto p = assemble_tau(op);
        Field r1(grid.shape(), random_vector(64, 3)), r2(grid.shape(), random_vector(64, 4));
        Field mix(grid.shape());
        for (std::size_t i = 0; i < 64; ++i)
            mix[i] = 2.5 * r1[i] - 0.75 * r2[i];
        const auto z1 = p.apply_inverse(r1), z2 = p.apply_inverse(r2), zm = p.apply_inverse(mix);
        for (std::size_t i = 0; i < 64; ++i)
            CHECK(zm[i] == doctest::Approx(2.5 * z1[i] - 0.75 * z2[i]).epsilon(1e-12));
    }
    SUBCASE("zero eigenvalue is a breakdown")
    {
        const auto grid = GridSpec::unit_box(2, 3);
        Field lam(grid.shape(), 1.0);
        lam[4] = 0.0;
        CHECK_THROWS_AS(TauPreconditioner(grid, lam), PreconditionerBreakdown);
    }
}

TEST_CASE("circulant first columns of the mass matrix")
{
    const std::vector<double> diag{0.75, 0.125, 0.0, 0.0};
    const auto strang = circulant_first_column(diag, diag, CirculantVariant::strang);
    CHECK(strang == std::vector<double>{0.75, 0.125, 0.0, 0.125});
    const auto chan = circulant_first_column(diag, diag, CirculantVariant::chan);
    const auto oracle = wrapped_diagonal_means(sfde_test::to_eigen(mass_matrix_dense(4)));
    for (std::size_t j = 0; j < 4; ++j)
        CHECK(chan[j] == doctest::Approx(oracle[j]).epsilon(1e-15));
    CHECK(chan[1] == doctest::Approx(3.0 / 32.0));
}

TEST_CASE("Chan column is the Frobenius-nearest circulant of T")
{
    const std::size_t n = 9;
    const auto t = coefficient_table(FractionalOrder(0.35), n);
    Eigen::MatrixXd tm = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> lower(n, 0.0), upper(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        lower[i] = t->q[i + 1];
        for (std::size_t j = 0; j < n; ++j)
            tm(i, j) = j == i + 1 ? t->q[0] : (j <= i ? t->q[i - j + 1] : 0.0);
    }
    upper[0] = t->q[1];
    upper[1] = t->q[0];
    const auto chan = circulant_first_column(lower, upper, CirculantVariant::chan);
    const auto oracle = wrapped_diagonal_means(tm);
    for (std::size_t j = 0; j < n; ++j)
        CHECK(chan[j] == doctest::Approx(oracle[j]).epsilon(1e-14));
}

TEST_CASE("circulant inverse against the dense circulant-substituted matrix")
{
    const auto grid = GridSpec::unit_box(2, 8);
    CnFvOperator op(grid, {FractionalOrder(0.1), FractionalOrder(0.2)}, {{19, 21}, {21, 23}}, 0.125);
    for (auto variant : {CirculantVariant::strang, CirculantVariant::chan}) {
        const auto c = assemble_circulant(op, variant);
        Field r(grid.shape(), random_vector(64, 8));
        const auto z = c.apply_inverse(r);
        CHECK(max_abs_diff(c.dense().multiply(z.values()), r.values()) < 1e-10);
        CHECK(c.last_imaginary_residue() < kImaginaryResidueLimit);
    }
}

TEST_CASE("preconditioners require the left-hand-side operator")
{
    const auto grid = GridSpec::unit_box(2, 4);
    CnFvOperator op(grid, {FractionalOrder(0.5), FractionalOrder(0.5)}, {{1, 1}, {1, 1}}, 0.1);
    CHECK_THROWS_AS(assemble_tau(op.with_sign(OperatorSign::minus)), std::invalid_argument);
    CHECK_THROWS_AS(assemble_circulant(op.with_sign(OperatorSign::minus), CirculantVariant::chan),
                    std::invalid_argument);
}
