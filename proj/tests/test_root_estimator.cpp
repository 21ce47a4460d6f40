#include "rootdens/config.hpp"
#include "rootdens/root_estimator.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace rootdens;

namespace {

Sample normal_sample(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Sample s;
    for (std::size_t i = 0; i < n; ++i)
        s.points.push_back(g(rng));
    return s;
}

std::vector<Complex> random_unit(std::size_t s, std::uint64_t seed, bool complex = true)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<Complex> c(s);
    double norm = 0.0;
    for (auto& z : c) {
        z = {g(rng), complex ? g(rng) : 0.0};
        norm += std::norm(z);
    }
    for (auto& z : c)
        z /= std::sqrt(norm);
    return c;
}

/// Finite-difference gradient of ln L - n (|c|^2 - 1) over the real and
/// imaginary parts of c.
double lagrangian_gradient(const PsiCoefficients& c, const Sample& sample)
{
    const double h = 1e-6;
    const double n = static_cast<double>(sample.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < c.coeffs.size(); ++i)
        for (Complex dir : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
            auto lag = [&](double t) {
                PsiCoefficients p = c;
                p.coeffs[i] += t * dir;
                return log_likelihood(p, sample) - n * (p.norm_squared() - 1.0);
            };
            worst = std::max(worst, std::abs((lag(h) - lag(-h)) / (2 * h)));
        }
    return worst;
}

}  // namespace

TEST_CASE("psi_value examples")
{
    PsiCoefficients c = ground_state(BasisSpec::hermite(4));
    CHECK(std::abs(psi_value(c, 0.0) - std::pow(std::numbers::pi, -0.25)) <= 1e-14);
    c.coeffs = {0.0, 1.0, 0.0, 0.0};
    CHECK(std::abs(psi_value(c, 0.0)) <= 1e-15);

    c.coeffs = random_unit(4, 7);
    for (double x : {-1.3, 0.2, 2.5}) {
        const auto row = basis_row(c.basis, c.basis.coordinate(x));
        Complex direct = 0.0;
        for (std::size_t i = row.size(); i-- > 0;)
            direct += row[i] * c.coeffs[i];
        CHECK(std::abs(psi_value(c, x) - direct) <= 1e-14);
    }
}

TEST_CASE("ground-state densities")
{
    const auto h = ground_state(BasisSpec::hermite(3));
    for (double x = -5.0; x <= 5.0; x += 0.3)
        CHECK(std::abs(density(h, x) - std::exp(-x * x / 2) / std::sqrt(2 * std::numbers::pi)) <= 1e-12);
    const auto l = ground_state(BasisSpec::laguerre(3));
    for (double x = 0.0; x <= 20.0; x += 0.7)
        CHECK(std::abs(density(l, x) - std::exp(-x)) <= 1e-12);
}

TEST_CASE("a unit-norm psi gives a unit-mass density")
{
    boost::math::quadrature::sinh_sinh<double> line;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const PsiCoefficients c{BasisSpec::hermite(5, 0.4, 1.7), random_unit(5, seed)};
        CHECK(line.integrate([&](double x) { return density(c, x); }) == doctest::Approx(1.0).epsilon(1e-8));
    }
    boost::math::quadrature::exp_sinh<double> half;
    const PsiCoefficients l{BasisSpec::laguerre(5, 2.0), random_unit(5, 4)};
    CHECK(half.integrate([&](double x) { return density(l, x); }, 0.0, std::numeric_limits<double>::infinity())
          == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("phase does not change the density")
{
    const PsiCoefficients c{BasisSpec::hermite(6, 0.5, 1.2), random_unit(6, 11)};
    PsiCoefficients rotated = c;
    for (auto& z : rotated.coeffs)
        z *= std::polar(1.0, 1.234);
    for (int i = 0; i < 100; ++i) {
        const double x = -4.0 + 0.09 * i;
        CHECK(std::abs(density(c, x) - density(rotated, x)) <= 1e-12);
    }
}

TEST_CASE("likelihood map")
{
    SUBCASE("s=1 maps to one")
    {
        const auto r = likelihood_map(ground_state(BasisSpec::charlier(1, 2.0)),
                                      Sample{{0, 3, 1, 7}, SupportKind::NonNegIntegers});
        REQUIRE(r.size() == 1);
        CHECK(std::abs(r[0] - 1.0) <= 1e-15);
    }
    SUBCASE("ground state is nearly fixed for ground-state data")
    {
        const std::size_t n = 100000;
        const auto c = ground_state(BasisSpec::hermite(5));
        const auto r = likelihood_map(c, normal_sample(n, 5));
        double diff = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i)
            diff = std::max(diff, std::abs(r[i] - c.coeffs[i]));
        CHECK(diff <= 5.0 / std::sqrt(static_cast<double>(n)));
    }
    SUBCASE("psi node at a data point")
    {
        PsiCoefficients c = ground_state(BasisSpec::hermite(3));
        c.coeffs = {0.0, 1.0, 0.0};
        try {
            likelihood_map(c, Sample{{1.0, 0.0}, SupportKind::RealLine});
            FAIL("expected ZeroPsiAtDataPoint");
        } catch (const ZeroPsiAtDataPoint& e) {
            CHECK(e.point() == 0.0);
        }
    }
}

TEST_CASE("log-likelihood")
{
    const auto c = ground_state(BasisSpec::hermite(3));
    CHECK(log_likelihood(c, Sample{{0.0}, SupportKind::RealLine}) == doctest::Approx(-0.918939).epsilon(1e-6));
    const PsiCoefficients r{BasisSpec::hermite(4, 0.3, 1.1), random_unit(4, 3)};
    const double one = log_likelihood(r, Sample{{0.7}, SupportKind::RealLine});
    CHECK(log_likelihood(r, Sample{{0.7, 0.7}, SupportKind::RealLine}) == 2 * one);
}

TEST_CASE("fit on ground-state data")
{
    const auto result = fit(normal_sample(2000, 9), BasisSpec::hermite(4));
    CHECK(result.converged);
    CHECK(std::abs(result.psi.coeffs[0]) >= 0.99);
    CHECK(result.psi.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("s=1 converges at once")
{
    const auto result = fit(normal_sample(50, 1), BasisSpec::hermite(1));
    CHECK(result.converged);
    CHECK(result.iterations == 1);
    CHECK(result.psi.coeffs[0] == Complex(1.0, 0.0));
}

TEST_CASE("fit properties on the mixture benchmarks")
{
    for (const char* name : {"table1", "fig1_lower", "fig2_upper", "fig2_lower"}) {
        CAPTURE(name);
        const auto b = builtin_experiment(name);
        const TrialFits fits = fit_trial(b.config, 0);
        const FitResult& r = fits.root_fit;
        CHECK(r.converged);
        CHECK(r.residual <= b.config.fit.tol);
        CHECK(r.psi.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(lagrangian_gradient(r.psi, fits.sample) <= 1e-4);
        // real data, real basis, real start
        for (const auto& z : r.psi.coeffs)
            CHECK(z.imag() == 0.0);
        CHECK(r.log_likelihood >= log_likelihood(ground_state(r.psi.basis), fits.sample));
    }
}

TEST_CASE("likelihood never decreases along the iterates")
{
    for (const char* name : {"table1", "fig1_lower"}) {
        auto b = builtin_experiment(name);
        b.config.fit.alpha = 0.5;
        b.config.fit.record_trace = true;
        for (std::size_t t = 0; t < 5; ++t) {
            const auto r = fit_trial(b.config, t).root_fit;
            REQUIRE(r.trace.size() >= 2);
            for (std::size_t i = 1; i < r.trace.size(); ++i)
                CHECK(r.trace[i] >= r.trace[i - 1] - 1e-10);
        }
    }
}

TEST_CASE("complex start reaches a complex stationary point")
{
    const auto b = builtin_experiment("table2");
    const TrialFits fits = fit_trial(b.config, 0);
    CHECK(fits.root_fit.converged);
    CHECK(lagrangian_gradient(fits.root_fit.psi, fits.sample) <= 1e-4);
    double imag = 0.0;
    for (const auto& z : fits.root_fit.psi.coeffs)
        imag = std::max(imag, std::abs(z.imag()));
    CHECK(imag > 1e-3);
}

TEST_CASE("restarts keep the best likelihood")
{
    const auto b = builtin_experiment("table1");
    const TrialFits plain = fit_trial(b.config, 2);
    FitOptions opts = b.config.fit;
    opts.restarts = 4;
    opts.restart_seed = 17;
    const auto r = fit(plain.sample, plain.root_fit.psi.basis, opts);
    CHECK(r.log_likelihood >= plain.root_fit.log_likelihood - 1e-9);
}

TEST_CASE("option and input validation")
{
    const auto sample = normal_sample(10, 1);
    CHECK_THROWS_AS(fit(sample, BasisSpec::hermite(3), FitOptions{.alpha = 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit(sample, BasisSpec::hermite(3), FitOptions{.alpha = 1.5}), std::invalid_argument);
    CHECK_THROWS_AS(fit(sample, BasisSpec::hermite(3), FitOptions{.max_iters = 0}), std::invalid_argument);
    CHECK_THROWS_AS(fit(sample, BasisSpec::hermite(3), FitOptions{.tol = 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit(Sample{}, BasisSpec::hermite(3)), std::invalid_argument);
    CHECK_THROWS_AS(fit(sample, BasisSpec::laguerre(3)), std::invalid_argument);
    CHECK_THROWS_AS(fit(Sample{{1.5}, SupportKind::NonNegIntegers}, BasisSpec::charlier(2, 1.0)), std::invalid_argument);
}

TEST_CASE("fix_phase makes the largest coefficient real and positive")
{
    std::vector<Complex> c{{0.1, 0.2}, {-0.3, -0.9}, {0.05, 0.0}};
    fix_phase(c);
    CHECK(c[1].imag() == 0.0);
    CHECK(c[1].real() > 0.0);
}
