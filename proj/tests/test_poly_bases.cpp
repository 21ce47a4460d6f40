#include "rootdens/poly_bases.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/exponential.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace rootdens;

namespace {

// phi_k^2 * jacobian evaluated in data units
double ground_density(const BasisSpec& spec, double x)
{
    const double v = basis_value(spec, 0, spec.coordinate(x));
    return v * v * spec.jacobian();
}

}  // namespace

TEST_CASE("family names round-trip")
{
    for (auto f : {BasisFamily::Hermite, BasisFamily::Laguerre, BasisFamily::Kravchuk, BasisFamily::Charlier})
        CHECK(parse_family(to_string(f)) == f);
    CHECK_THROWS_AS(parse_family("legendre"), std::invalid_argument);
}

TEST_CASE("basis parameter validation")
{
    CHECK_THROWS(BasisSpec::hermite(0));
    CHECK_THROWS(BasisSpec::hermite(3, 0.0, -1.0));
    CHECK_THROWS(BasisSpec::laguerre(3, 0.0));
    CHECK_THROWS(BasisSpec::kravchuk(3, 10, 1.0));
    CHECK_THROWS(BasisSpec::kravchuk(12, 10, 0.5));  // s > N + 1
    CHECK_THROWS(BasisSpec::charlier(3, 0.0));
    CHECK_THROWS_AS(BasisSpec::laguerre(3).coordinate(-1.0), std::domain_error);
    CHECK_THROWS_AS(BasisSpec::charlier(3, 2.0).coordinate(1.5), std::domain_error);
    CHECK_THROWS_AS(BasisSpec::kravchuk(3, 5, 0.5).coordinate(6.0), std::domain_error);
}

TEST_CASE("ground-state values")
{
    CHECK(basis_value(BasisSpec::hermite(1), 0, 0.0) == doctest::Approx(std::pow(std::numbers::pi, -0.25)).epsilon(1e-14));
    CHECK(basis_value(BasisSpec::laguerre(1), 0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    const auto row = basis_row(BasisSpec::hermite(1), 0.0);
    REQUIRE(row.size() == 1);
    CHECK(row[0] == doctest::Approx(0.751126).epsilon(1e-6));
}

TEST_CASE("Hermite k=3 against the explicit polynomial")
{
    const double x = 1.2;
    const double h3 = 8 * x * x * x - 12 * x;
    const double norm = std::sqrt(std::pow(2.0, 3) * 6.0 * std::sqrt(std::numbers::pi));
    const double expected = h3 * std::exp(-x * x / 2) / norm;
    CHECK(basis_value(BasisSpec::hermite(4), 3, x) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("Kravchuk row at N=2, p=0.5, x=1")
{
    const auto row = basis_row(BasisSpec::kravchuk(3, 2, 0.5), 1.0);
    REQUIRE(row.size() == 3);
    CHECK(row[0] * row[0] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("rows are deterministic")
{
    const auto spec = BasisSpec::charlier(8, 3.5);
    CHECK(basis_row(spec, 4.0) == basis_row(spec, 4.0));
}

TEST_CASE("ground states match the reference laws")
{
    const boost::math::normal_distribution<> normal(0.0, 1.0);
    const auto h = BasisSpec::hermite(1);
    for (double x = -6.0; x <= 6.0; x += 0.37)
        CHECK(std::abs(ground_density(h, x) - boost::math::pdf(normal, x)) <= 1e-12);

    const boost::math::normal_distribution<> shifted(2.0, 3.0);
    const auto hs = BasisSpec::hermite(1, 2.0, 3.0);
    for (double x = -8.0; x <= 12.0; x += 0.53)
        CHECK(std::abs(ground_density(hs, x) - boost::math::pdf(shifted, x)) <= 1e-12);

    const boost::math::exponential_distribution<> expo(1.0);
    const auto l = BasisSpec::laguerre(1);
    for (double x = 0.0; x <= 30.0; x += 0.41)
        CHECK(std::abs(ground_density(l, x) - boost::math::pdf(expo, x)) <= 1e-12);

    const boost::math::binomial_distribution<> binom(20, 0.3);
    const auto k = BasisSpec::kravchuk(1, 20, 0.3);
    for (int x = 0; x <= 20; ++x)
        CHECK(std::abs(ground_density(k, x) - boost::math::pdf(binom, x)) <= 1e-12);

    const boost::math::poisson_distribution<> pois(4.5);
    const auto c = BasisSpec::charlier(1, 4.5);
    for (int x = 0; x <= 40; ++x)
        CHECK(std::abs(ground_density(c, x) - boost::math::pdf(pois, x)) <= 1e-12);
}

TEST_CASE("Gram matrices are the identity")
{
    SUBCASE("Hermite s=6 on [-12, 12]")
    {
        const auto g = gram_check(BasisSpec::hermite(6), {SupportKind::RealLine, -12.0, 12.0});
        CHECK(identity_deviation(g) <= 1e-8);
    }
    SUBCASE("Kravchuk N=20 p=0.3 s=10")
    {
        CHECK(identity_deviation(gram_check(BasisSpec::kravchuk(10, 20, 0.3))) <= 1e-10);
    }
    SUBCASE("s=1 for every family")
    {
        for (const auto& spec : {BasisSpec::hermite(1), BasisSpec::laguerre(1), BasisSpec::kravchuk(1, 7, 0.4),
                                 BasisSpec::charlier(1, 2.0)}) {
            const auto g = gram_check(spec);
            REQUIRE(g.rows() == 1);
            CHECK(g(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
    SUBCASE("every family up to s=16")
    {
        for (std::size_t s : {2u, 5u, 12u, 16u}) {
            CHECK(identity_deviation(gram_check(BasisSpec::hermite(s, 1.0, 2.0))) <= 1e-8);
            CHECK(identity_deviation(gram_check(BasisSpec::laguerre(s, 3.0))) <= 1e-8);
            CHECK(identity_deviation(gram_check(BasisSpec::kravchuk(s, 100, 0.45))) <= 1e-10);
            CHECK(identity_deviation(gram_check(BasisSpec::charlier(s, 5.0))) <= 1e-10);
        }
    }
    SUBCASE("too small a domain is reported")
    {
        CHECK_THROWS_AS(gram_check(BasisSpec::hermite(6), {SupportKind::RealLine, -1.0, 1.0}), std::runtime_error);
    }
}

TEST_CASE("independent quadrature of a Hermite product")
{
    // tanh-sinh style quadrature over the whole line, unrelated to the library's panels
    boost::math::quadrature::sinh_sinh<double> integrator;
    const auto spec = BasisSpec::hermite(8);
    for (std::size_t i = 0; i < 8; i += 3)
        for (std::size_t j = 0; j < 8; j += 2) {
            const double v = integrator.integrate([&](double z) { return basis_value(spec, i, z) * basis_value(spec, j, z); });
            CHECK(std::abs(v - (i == j ? 1.0 : 0.0)) <= 1e-9);
        }
}

TEST_CASE("recurrence stays finite")
{
    const auto h = BasisSpec::hermite(60);
    for (double z = -10.0; z <= 10.0; z += 0.25)
        for (double v : basis_row(h, z))
            REQUIRE(std::isfinite(v));
    const auto l = BasisSpec::laguerre(60);
    for (double z = 0.0; z <= 200.0; z += 1.5)
        for (double v : basis_row(l, z))
            REQUIRE(std::isfinite(v));
    const auto k = BasisSpec::kravchuk(60, 200, 0.3);
    for (int x = 0; x <= 200; ++x)
        for (double v : basis_row(k, x))
            REQUIRE(std::isfinite(v));
    const auto c = BasisSpec::charlier(60, 20.0);
    for (int x = 0; x <= 100; ++x)
        for (double v : basis_row(c, x))
            REQUIRE(std::isfinite(v));
}

TEST_CASE("Hermite parity")
{
    const auto spec = BasisSpec::hermite(20);
    for (double z = 0.1; z < 8.0; z += 0.7) {
        const auto pos = basis_row(spec, z);
        const auto neg = basis_row(spec, -z);
        for (std::size_t k = 0; k < pos.size(); ++k)
            CHECK(neg[k] == doctest::Approx((k % 2 ? -1.0 : 1.0) * pos[k]).epsilon(1e-13).scale(1e-300));
    }
}

TEST_CASE("moment matching")
{
    const std::vector<double> sample{1.0, 2.0, 3.0, 4.0};
    const auto h = moment_matched(BasisFamily::Hermite, 3, sample);
    CHECK(h.shift == doctest::Approx(2.5));
    CHECK(h.scale == doctest::Approx(std::sqrt(1.25)));
    CHECK(moment_matched(BasisFamily::Laguerre, 3, sample).scale == doctest::Approx(2.5));
    CHECK(moment_matched(BasisFamily::Kravchuk, 3, sample, 10).success_p == doctest::Approx(0.25));
    CHECK(moment_matched(BasisFamily::Charlier, 3, sample).lambda == doctest::Approx(2.5));
}

TEST_CASE("density frame halves the spread")
{
    const auto h = density_frame(BasisSpec::hermite(4, 1.0, 2.0));
    CHECK(h.shift == 1.0);
    CHECK(h.scale == doctest::Approx(2.0 / std::sqrt(2.0)));
    CHECK(density_frame(BasisSpec::laguerre(4, 3.0)).scale == doctest::Approx(1.5));
    CHECK(density_frame(BasisSpec::charlier(4, 3.0)) == BasisSpec::charlier(4, 3.0));
}
