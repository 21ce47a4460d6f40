#pragma once

// Densities of the form P(x) = f(x) exp(-x^2) / Z with f a non-negative
// polynomial of even degree 2n. Every such density factors as |psi(x)|^2
// with psi(x) = sqrt(a_2n / Z) exp(-x^2/2) prod_j (x - y_j), where y_j is one
// root of each conjugate pair of f; the 2^n choices give the same density.

#include "rootdens/root_estimator.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace rootdens {

class GaussPolyError : public std::invalid_argument {
public:
    enum class Kind { OddDegree, NegativeLeadingCoeff, DensityNegative, PairingFailure, DegreeTooLarge };

    GaussPolyError(Kind kind, const std::string& what, double witness = 0.0)
        : std::invalid_argument(what), kind_(kind), witness_(witness)
    {
    }
    Kind kind() const { return kind_; }
    /// for DensityNegative: a point where f(x) < 0
    double witness() const { return witness_; }

private:
    Kind kind_;
    double witness_;
};

struct GaussPolyDensity {
    /// a_0 ... a_2n (ascending), already divided by `normalizer`
    std::vector<double> coeffs;
    /// Z = integral of the caller's f(x) exp(-x^2)
    double normalizer = 1.0;

    std::size_t half_degree() const { return (coeffs.size() - 1) / 2; }
    double poly(double x) const;
    double operator()(double x) const;
    /// E[X^k]
    double moment(int k) const;
    double cdf(double x) const;
};

/// One representative z_j per conjugate pair (Im z_j >= 0) and a choice
/// mask: bit j set means y_j = conj(z_j).
struct PsiSelection {
    std::vector<Complex> roots;
    std::vector<bool> mask;
};

/// integral x^m exp(-x^2) dx over the real line
double gaussian_moment(int m);

/// Roots of sum_m a_m x^m by eigenvalues of the companion matrix.
std::vector<Complex> polynomial_roots(std::span<const double> ascending);

/// Coefficients (ascending) of |q(x)|^2 for real x.
std::vector<double> square_modulus(std::span<const Complex> q);

/// |q|^2 for a degree-n polynomial q with standard complex normal coefficients.
std::vector<double> random_square_modulus(int n, std::uint64_t seed);

GaussPolyDensity validate_and_normalize(std::span<const double> poly_coeffs);

PsiSelection poly_roots(const GaussPolyDensity& density);

/// Hermite expansion (s = n + 1, z = x) of the psi-function picked by `mask`.
PsiCoefficients build_psi(const GaussPolyDensity& density, const std::vector<bool>& mask);
PsiCoefficients build_psi(const GaussPolyDensity& density, const PsiSelection& selection);

/// max over a 2001-point grid on [-8, 8] of |P(x) - |psi(x)|^2|
double density_of_psi_check(const GaussPolyDensity& density, const PsiCoefficients& c);

/// Exact inverse-CDF sampling; deterministic in `seed`.
std::vector<double> sample_gauss_poly(const GaussPolyDensity& density, std::size_t n_samples,
                                      std::uint64_t seed);

}  // namespace rootdens
