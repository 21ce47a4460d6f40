#include "rootdens/gauss_poly.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace rootdens {

namespace {

/// largest n for which the integer Hermite coefficients stay exact in double
constexpr int MAX_HALF_DEGREE = 20;

/// sampling and validation window
constexpr double WINDOW = 10.0;

double horner(std::span<const double> a, double x)
{
    double v = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it)
        v = v * x + *it;
    return v;
}

std::vector<double> derivative(std::span<const double> a)
{
    std::vector<double> d;
    for (std::size_t m = 1; m < a.size(); ++m)
        d.push_back(static_cast<double>(m) * a[m]);
    return d;
}

/// sum |a_m| |x|^m, the scale against which a rounding-level negative f is judged
double magnitude(std::span<const double> a, double x)
{
    double v = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it)
        v = v * std::abs(x) + std::abs(*it);
    return v;
}

/// Newton on f' to pull a numerically split double root back onto the real axis.
double polish_double_root(std::span<const double> a, double x)
{
    const std::vector<double> d1 = derivative(a);
    const std::vector<double> d2 = derivative(d1);
    for (int it = 0; it < 60; ++it) {
        const double den = horner(d2, x);
        if (den == 0.0)
            break;
        const double step = horner(d1, x) / den;
        x -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(x)))
            break;
    }
    return x;
}

/// rows: H_0..H_n, columns: monomial coefficients (ascending)
std::vector<std::vector<double>> hermite_table(int n)
{
    std::vector<std::vector<double>> h(static_cast<std::size_t>(n) + 1,
                                       std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
    h[0][0] = 1.0;
    if (n >= 1)
        h[1][1] = 2.0;
    for (int k = 1; k < n; ++k)
        for (int m = 0; m <= k + 1; ++m) {
            double v = (m > 0 ? 2.0 * h[k][m - 1] : 0.0) - 2.0 * k * h[k - 1][m];
            h[k + 1][m] = v;
        }
    return h;
}

}  // namespace

double gaussian_moment(int m)
{
    if (m < 0)
        throw std::invalid_argument("gaussian_moment: negative order");
    if (m % 2 == 1)
        return 0.0;
    return std::tgamma(0.5 * (m + 1));
}

double GaussPolyDensity::poly(double x) const { return horner(coeffs, x); }

double GaussPolyDensity::operator()(double x) const { return horner(coeffs, x) * std::exp(-x * x); }

double GaussPolyDensity::moment(int k) const
{
    double total = 0.0;
    for (std::size_t m = 0; m < coeffs.size(); ++m)
        total += coeffs[m] * gaussian_moment(static_cast<int>(m) + k);
    return total;
}

double GaussPolyDensity::cdf(double x) const
{
    // I_m(x) = int_{-inf}^x t^m e^{-t^2} dt via I_m = (m-1)/2 I_{m-2} - x^{m-1} e^{-x^2} / 2
    const double g = std::exp(-x * x);
    double i_prev = 0.5 * std::sqrt(std::numbers::pi) * std::erfc(-x);
    double i_cur = -0.5 * g;
    double total = coeffs[0] * i_prev;
    if (coeffs.size() > 1)
        total += coeffs[1] * i_cur;
    double power = 1.0;  // x^{m-1}
    for (std::size_t m = 2; m < coeffs.size(); ++m) {
        const double i_next = 0.5 * static_cast<double>(m - 1) * i_prev - 0.5 * power * x * g;
        power *= x;
        i_prev = i_cur;
        i_cur = i_next;
        total += coeffs[m] * i_cur;
    }
    return std::clamp(total, 0.0, 1.0);
}

std::vector<Complex> polynomial_roots(std::span<const double> ascending)
{
    if (ascending.empty() || ascending.back() == 0.0)
        throw std::invalid_argument("polynomial_roots: leading coefficient must be non-zero");
    const auto degree = static_cast<Eigen::Index>(ascending.size() - 1);
    if (degree == 0)
        return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (Eigen::Index i = 1; i < degree; ++i)
        companion(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < degree; ++i)
        companion(i, degree - 1) = -ascending[static_cast<std::size_t>(i)] / ascending.back();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("polynomial_roots: eigenvalue iteration failed");
    const Eigen::VectorXcd eig = solver.eigenvalues();
    return {eig.data(), eig.data() + eig.size()};
}

std::vector<double> square_modulus(std::span<const Complex> q)
{
    if (q.empty())
        throw std::invalid_argument("square_modulus: empty polynomial");
    std::vector<double> a(2 * q.size() - 1, 0.0);
    for (std::size_t j = 0; j < q.size(); ++j)
        for (std::size_t l = 0; l < q.size(); ++l)
            a[j + l] += (q[j] * std::conj(q[l])).real();
    return a;
}

std::vector<double> random_square_modulus(int n, std::uint64_t seed)
{
    if (n < 0)
        throw std::invalid_argument("random_square_modulus: negative degree");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    std::vector<Complex> q(static_cast<std::size_t>(n) + 1);
    for (auto& c : q) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        c = {re, im};
    }
    return square_modulus(q);
}

GaussPolyDensity validate_and_normalize(std::span<const double> poly_coeffs)
{
    if (poly_coeffs.empty())
        throw std::invalid_argument("polynomial has no coefficients");
    for (double a : poly_coeffs)
        if (!std::isfinite(a))
            throw std::invalid_argument("polynomial coefficient is not finite");
    const std::size_t degree = poly_coeffs.size() - 1;
    if (degree % 2 == 1)
        throw GaussPolyError(GaussPolyError::Kind::OddDegree,
                             "OddDegree: polynomial degree " + std::to_string(degree) + " is odd");
    if (!(poly_coeffs.back() > 0.0))
        throw GaussPolyError(GaussPolyError::Kind::NegativeLeadingCoeff,
                             "NegativeLeadingCoeff: leading coefficient must be positive");
    if (static_cast<int>(degree / 2) > MAX_HALF_DEGREE)
        throw GaussPolyError(GaussPolyError::Kind::DegreeTooLarge,
                             "polynomial degree above " + std::to_string(2 * MAX_HALF_DEGREE));

    std::vector<double> probes;
    constexpr int GRID = 4001;
    for (int i = 0; i < GRID; ++i)
        probes.push_back(-WINDOW + 2.0 * WINDOW * i / (GRID - 1));
    if (degree > 0) {
        for (const Complex& r : polynomial_roots(poly_coeffs))
            probes.push_back(r.real());
        const std::vector<double> d = derivative(poly_coeffs);
        if (d.back() != 0.0)
            for (const Complex& r : polynomial_roots(d))
                if (std::abs(r.imag()) <= 1e-7 * (1.0 + std::abs(r)))
                    probes.push_back(r.real());
    }
    double worst = 0.0;
    double witness = 0.0;
    bool negative = false;
    for (double x : probes) {
        const double f = horner(poly_coeffs, x);
        if (f < -1e-12 * magnitude(poly_coeffs, x) && (!negative || f < worst)) {
            negative = true;
            worst = f;
            witness = x;
        }
    }
    if (negative)
        throw GaussPolyError(GaussPolyError::Kind::DensityNegative,
                             "DensityNegative: f(" + std::to_string(witness) + ") = " + std::to_string(worst),
                             witness);

    GaussPolyDensity out;
    double z = 0.0;
    for (std::size_t m = 0; m < poly_coeffs.size(); ++m)
        z += poly_coeffs[m] * gaussian_moment(static_cast<int>(m));
    out.normalizer = z;
    out.coeffs.assign(poly_coeffs.begin(), poly_coeffs.end());
    for (double& a : out.coeffs)
        a /= z;
    return out;
}

PsiSelection poly_roots(const GaussPolyDensity& density)
{
    const std::span<const double> a = density.coeffs;
    std::vector<Complex> roots = polynomial_roots(a);
    for (Complex& r : roots)
        if (std::abs(r.imag()) <= 1e-6 * (1.0 + std::abs(r)))
            r = polish_double_root(a, r.real());

    std::vector<bool> used(roots.size(), false);
    PsiSelection sel;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i])
            continue;
        used[i] = true;
        const Complex target = std::conj(roots[i]);
        std::size_t partner = roots.size();
        double best = 0.0;
        for (std::size_t j = 0; j < roots.size(); ++j) {
            if (used[j])
                continue;
            const double dist = std::abs(roots[j] - target);
            if (partner == roots.size() || dist < best) {
                partner = j;
                best = dist;
            }
        }
        if (partner == roots.size() || best > 1e-8 * (1.0 + std::abs(roots[i])))
            throw GaussPolyError(GaussPolyError::Kind::PairingFailure,
                                 "PairingFailure: root " + std::to_string(roots[i].real()) + "+"
                                     + std::to_string(roots[i].imag()) + "i has no conjugate partner");
        used[partner] = true;
        Complex rep = 0.5 * (roots[i] + std::conj(roots[partner]));
        if (rep.imag() < 0.0)
            rep = std::conj(rep);
        sel.roots.push_back(rep);
    }
    std::sort(sel.roots.begin(), sel.roots.end(), [](const Complex& x, const Complex& y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    sel.mask.assign(sel.roots.size(), false);
    return sel;
}

PsiCoefficients build_psi(const GaussPolyDensity& density, const std::vector<bool>& mask)
{
    PsiSelection sel = poly_roots(density);
    if (mask.size() != sel.roots.size())
        throw std::invalid_argument("build_psi: mask length " + std::to_string(mask.size())
                                    + " differs from the number of root pairs "
                                    + std::to_string(sel.roots.size()));
    sel.mask = mask;
    return build_psi(density, sel);
}

PsiCoefficients build_psi(const GaussPolyDensity& density, const PsiSelection& selection)
{
    const int n = static_cast<int>(selection.roots.size());
    if (selection.mask.size() != selection.roots.size())
        throw std::invalid_argument("build_psi: mask length differs from the number of root pairs");
    if (n > MAX_HALF_DEGREE)
        throw GaussPolyError(GaussPolyError::Kind::DegreeTooLarge, "build_psi: too many root pairs");

    // prod_j (x - y_j), ascending monomial coefficients
    std::vector<Complex> mono{1.0};
    for (int j = 0; j < n; ++j) {
        const Complex y = selection.mask[static_cast<std::size_t>(j)]
            ? std::conj(selection.roots[static_cast<std::size_t>(j)])
            : selection.roots[static_cast<std::size_t>(j)];
        std::vector<Complex> next(mono.size() + 1, 0.0);
        for (std::size_t m = 0; m < mono.size(); ++m) {
            next[m + 1] += mono[m];
            next[m] -= y * mono[m];
        }
        mono = std::move(next);
    }

    // monomial -> Hermite polynomial coefficients, highest degree first
    const auto table = hermite_table(n);
    std::vector<Complex> herm(static_cast<std::size_t>(n) + 1, 0.0);
    for (int k = n; k >= 0; --k) {
        const auto uk = static_cast<std::size_t>(k);
        const Complex d = mono[uk] / table[uk][uk];
        herm[uk] = d;
        for (std::size_t m = 0; m <= uk; ++m)
            mono[m] -= d * table[uk][m];
    }

    const double lead = std::sqrt(density.coeffs.back());
    PsiCoefficients c;
    c.basis = BasisSpec::hermite(static_cast<std::size_t>(n) + 1, 0.0, 1.0 / std::numbers::sqrt2);
    c.coeffs.resize(herm.size());
    double log_norm = 0.25 * std::log(std::numbers::pi);  // log sqrt(2^k k! sqrt(pi))
    for (std::size_t k = 0; k < herm.size(); ++k) {
        if (k > 0)
            log_norm += 0.5 * std::log(2.0 * static_cast<double>(k));
        c.coeffs[k] = lead * herm[k] * std::exp(log_norm);
    }
    fix_phase(c.coeffs);
    return c;
}

double density_of_psi_check(const GaussPolyDensity& density, const PsiCoefficients& c)
{
    constexpr int GRID = 2001;
    double worst = 0.0;
    for (int i = 0; i < GRID; ++i) {
        const double x = -8.0 + 16.0 * i / (GRID - 1);
        worst = std::max(worst, std::abs(density(x) - rootdens::density(c, x)));
    }
    return worst;
}

std::vector<double> sample_gauss_poly(const GaussPolyDensity& density, std::size_t n_samples,
                                      std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double f_lo = density.cdf(-WINDOW);
    const double f_hi = density.cdf(WINDOW);
    std::vector<double> out;
    out.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double u = uniform(rng);
        if (u <= f_lo) {
            out.push_back(-WINDOW);
            continue;
        }
        if (u >= f_hi) {
            out.push_back(WINDOW);
            continue;
        }
        std::uintmax_t max_iter = 200;
        const auto bracket = boost::math::tools::toms748_solve(
            [&](double x) { return density.cdf(x) - u; }, -WINDOW, WINDOW, f_lo - u, f_hi - u,
            boost::math::tools::eps_tolerance<double>(50), max_iter);
        out.push_back(0.5 * (bracket.first + bracket.second));
    }
    return out;
}

}  // namespace rootdens
