#pragma once

// Orthonormal basis functions built from classical orthogonal polynomials:
// Chebyshev-Hermite functions on the real line, Laguerre functions on the
// half-line, and the discrete Kravchuk (binomial weight) and Charlier
// (Poisson weight) families. Every family is written as
//
//     phi_k(z) = sqrt(w(z)) * p_k(z)
//
// where w is the probability weight of the family's ground state and p_k are
// the polynomials orthonormal under w. The p_k are generated with their
// three-term (Jacobi) recurrence, carried with a running log-scale so that
// neither factorials nor the raw weight are ever formed explicitly.

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rootdens {

enum class BasisFamily { Hermite, Laguerre, Kravchuk, Charlier };

std::string_view to_string(BasisFamily family);
BasisFamily parse_family(std::string_view name);

enum class SupportKind { RealLine, HalfLine, FiniteLattice, NonNegIntegers };

inline bool is_discrete(SupportKind kind)
{
    return kind == SupportKind::FiniteLattice || kind == SupportKind::NonNegIntegers;
}

/// Integration / summation region in basis coordinates. For lattices the
/// bounds are the first and last integer point included.
struct SupportDomain {
    SupportKind kind = SupportKind::RealLine;
    double lower = 0.0;
    double upper = 0.0;

    void validate() const;
};

/// Which family, how many functions, and the family's shape parameters.
///
/// Continuous families act on standardized coordinates: Hermite uses
/// z = (x - shift) / (scale * sqrt(2)), so that the ground state density in
/// data units is Normal(shift, scale^2); Laguerre uses z = x / scale, so the
/// ground state is an exponential law with mean `scale`.
struct BasisSpec {
    BasisFamily family = BasisFamily::Hermite;
    std::size_t size = 1;
    double shift = 0.0;
    double scale = 1.0;
    int n_trials = 1;
    double success_p = 0.5;
    double lambda = 1.0;

    static BasisSpec hermite(std::size_t size, double shift = 0.0, double scale = 1.0);
    static BasisSpec laguerre(std::size_t size, double scale = 1.0);
    static BasisSpec kravchuk(std::size_t size, int n_trials, double success_p);
    static BasisSpec charlier(std::size_t size, double lambda);

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;

    bool discrete() const
    {
        return family == BasisFamily::Kravchuk || family == BasisFamily::Charlier;
    }
    SupportKind support() const;

    /// Data point -> basis coordinate. Throws std::domain_error outside the support.
    double coordinate(double x) const;
    /// dz/dx of the standardizing map; 1 for the discrete families.
    double jacobian() const;
};

bool operator==(const BasisSpec& a, const BasisSpec& b);

/// Shape parameters fitted by moment matching: Hermite shift/scale from the
/// sample mean and standard deviation, Laguerre scale from the mean,
/// Kravchuk p = mean / N, Charlier lambda = mean.
BasisSpec moment_matched(BasisFamily family, std::size_t size, std::span<const double> sample,
                         int n_trials = 0);

/// Frame for expanding a density itself (rather than its square root) in the
/// same family: phi_0 is then proportional to the ground-state density of
/// `root_frame`. Hermite halves the variance, Laguerre halves the mean, and the
/// discrete families are returned unchanged.
BasisSpec density_frame(const BasisSpec& root_frame);

/// phi_k(z) for a point z given in basis coordinates.
double basis_value(const BasisSpec& spec, std::size_t k, double z);

/// (phi_0(z), ..., phi_{s-1}(z)).
std::vector<double> basis_row(const BasisSpec& spec, double z);
void basis_row(const BasisSpec& spec, double z, std::span<double> out);

/// Region used by gram_check when no explicit domain is supplied. Wide
/// enough that the neglected tail of every phi_k^2, k < size, is below 1e-15.
SupportDomain default_domain(const BasisSpec& spec);

/// G[i][j] = integral (or lattice sum) of phi_i * phi_j over `domain`.
/// Throws std::runtime_error when a diagonal entry misses 1 by more than
/// 1e-6, which signals a truncation bound that is too small.
Eigen::MatrixXd gram_check(const BasisSpec& spec, const SupportDomain& domain);
Eigen::MatrixXd gram_check(const BasisSpec& spec);

/// max |G - I|.
double identity_deviation(const Eigen::MatrixXd& gram);

}  // namespace rootdens
