#include "rootdens/poly_bases.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rootdens {

namespace {

/// values are renormalized once they exceed this magnitude
constexpr double RESCALE_THRESHOLD = 1e150;
constexpr double RESCALE_FACTOR = 1e-150;
const double LOG_RESCALE = std::log(1e150);

/// Jacobi-matrix entries of the family: z p_n = a_{n+1} p_{n+1} + b_n p_n + a_n p_{n-1}
double jacobi_offdiag(const BasisSpec& spec, std::size_t n)
{
    const double dn = static_cast<double>(n);
    switch (spec.family) {
    case BasisFamily::Hermite:
        return std::sqrt(0.5 * dn);
    case BasisFamily::Laguerre:
        return -dn;
    case BasisFamily::Kravchuk: {
        const double q = 1.0 - spec.success_p;
        return std::sqrt(dn * (spec.n_trials - dn + 1.0) * spec.success_p * q);
    }
    case BasisFamily::Charlier:
        return std::sqrt(dn * spec.lambda);
    }
    return 0.0;
}

double jacobi_diag(const BasisSpec& spec, std::size_t n)
{
    const double dn = static_cast<double>(n);
    switch (spec.family) {
    case BasisFamily::Hermite:
        return 0.0;
    case BasisFamily::Laguerre:
        return 2.0 * dn + 1.0;
    case BasisFamily::Kravchuk:
        return spec.success_p * (spec.n_trials - dn) + dn * (1.0 - spec.success_p);
    case BasisFamily::Charlier:
        return dn + spec.lambda;
    }
    return 0.0;
}

/// log sqrt(w(z)) for the ground-state weight of the family
double log_sqrt_weight(const BasisSpec& spec, double z)
{
    switch (spec.family) {
    case BasisFamily::Hermite:
        return -0.5 * z * z - 0.25 * std::log(std::numbers::pi);
    case BasisFamily::Laguerre:
        return -0.5 * z;
    case BasisFamily::Kravchuk: {
        const double n = spec.n_trials;
        const double log_binom = std::lgamma(n + 1.0) - std::lgamma(z + 1.0) - std::lgamma(n - z + 1.0);
        return 0.5 * (log_binom + z * std::log(spec.success_p) + (n - z) * std::log1p(-spec.success_p));
    }
    case BasisFamily::Charlier:
        return 0.5 * (z * std::log(spec.lambda) - spec.lambda - std::lgamma(z + 1.0));
    }
    return 0.0;
}

bool is_integer(double z) { return std::floor(z) == z; }

void check_coordinate(const BasisSpec& spec, double z)
{
    if (!std::isfinite(z))
        throw std::domain_error("basis argument is not finite");
    switch (spec.family) {
    case BasisFamily::Hermite:
        return;
    case BasisFamily::Laguerre:
        if (z < 0.0)
            throw std::domain_error("Laguerre basis argument " + std::to_string(z) + " is negative");
        return;
    case BasisFamily::Kravchuk:
        if (!is_integer(z) || z < 0.0 || z > spec.n_trials)
            throw std::domain_error("Kravchuk basis argument " + std::to_string(z) + " is not in {0..N}");
        return;
    case BasisFamily::Charlier:
        if (!is_integer(z) || z < 0.0)
            throw std::domain_error("Charlier basis argument " + std::to_string(z) + " is not a non-negative integer");
        return;
    }
}

void fill_row(const BasisSpec& spec, double z, std::span<double> out)
{
    const double log_scale0 = log_sqrt_weight(spec, z);
    double log_scale = log_scale0;
    double prev = 0.0;
    double cur = 1.0;
    out[0] = std::exp(log_scale);
    for (std::size_t n = 0; n + 1 < out.size(); ++n) {
        double next = ((z - jacobi_diag(spec, n)) * cur - jacobi_offdiag(spec, n) * prev)
            / jacobi_offdiag(spec, n + 1);
        prev = cur;
        cur = next;
        if (std::abs(cur) > RESCALE_THRESHOLD) {
            cur *= RESCALE_FACTOR;
            prev *= RESCALE_FACTOR;
            log_scale += LOG_RESCALE;
        }
        out[n + 1] = cur * std::exp(log_scale);
    }
}

}  // namespace

std::string_view to_string(BasisFamily family)
{
    switch (family) {
    case BasisFamily::Hermite:
        return "hermite";
    case BasisFamily::Laguerre:
        return "laguerre";
    case BasisFamily::Kravchuk:
        return "kravchuk";
    case BasisFamily::Charlier:
        return "charlier";
    }
    return "unknown";
}

BasisFamily parse_family(std::string_view name)
{
    for (auto f : {BasisFamily::Hermite, BasisFamily::Laguerre, BasisFamily::Kravchuk, BasisFamily::Charlier})
        if (to_string(f) == name)
            return f;
    throw std::invalid_argument("unknown basis family '" + std::string(name) + "'");
}

void SupportDomain::validate() const
{
    if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper))
        throw std::invalid_argument("support domain bounds must be finite and ordered");
    if (is_discrete(kind) && (!is_integer(lower) || !is_integer(upper) || lower < 0.0))
        throw std::invalid_argument("lattice bounds must be non-negative integers");
    if (kind == SupportKind::HalfLine && lower < 0.0)
        throw std::invalid_argument("half-line domain cannot extend below zero");
}

BasisSpec BasisSpec::hermite(std::size_t size, double shift, double scale)
{
    BasisSpec spec;
    spec.family = BasisFamily::Hermite;
    spec.size = size;
    spec.shift = shift;
    spec.scale = scale;
    spec.validate();
    return spec;
}

BasisSpec BasisSpec::laguerre(std::size_t size, double scale)
{
    BasisSpec spec;
    spec.family = BasisFamily::Laguerre;
    spec.size = size;
    spec.scale = scale;
    spec.validate();
    return spec;
}

BasisSpec BasisSpec::kravchuk(std::size_t size, int n_trials, double success_p)
{
    BasisSpec spec;
    spec.family = BasisFamily::Kravchuk;
    spec.size = size;
    spec.n_trials = n_trials;
    spec.success_p = success_p;
    spec.validate();
    return spec;
}

BasisSpec BasisSpec::charlier(std::size_t size, double lambda)
{
    BasisSpec spec;
    spec.family = BasisFamily::Charlier;
    spec.size = size;
    spec.lambda = lambda;
    spec.validate();
    return spec;
}

void BasisSpec::validate() const
{
    if (size < 1)
        throw std::invalid_argument("basis size must be at least 1");
    switch (family) {
    case BasisFamily::Hermite:
        if (!std::isfinite(shift))
            throw std::invalid_argument("Hermite shift must be finite");
        [[fallthrough]];
    case BasisFamily::Laguerre:
        if (!(scale > 0.0) || !std::isfinite(scale))
            throw std::invalid_argument("basis scale must be positive");
        break;
    case BasisFamily::Kravchuk:
        if (n_trials < 1)
            throw std::invalid_argument("Kravchuk N must be positive");
        if (!(success_p > 0.0 && success_p < 1.0))
            throw std::invalid_argument("Kravchuk p must lie in (0,1)");
        if (size > static_cast<std::size_t>(n_trials) + 1)
            throw std::invalid_argument("Kravchuk basis has at most N+1 functions");
        break;
    case BasisFamily::Charlier:
        if (!(lambda > 0.0) || !std::isfinite(lambda))
            throw std::invalid_argument("Charlier lambda must be positive");
        break;
    }
}

SupportKind BasisSpec::support() const
{
    switch (family) {
    case BasisFamily::Hermite:
        return SupportKind::RealLine;
    case BasisFamily::Laguerre:
        return SupportKind::HalfLine;
    case BasisFamily::Kravchuk:
        return SupportKind::FiniteLattice;
    case BasisFamily::Charlier:
        return SupportKind::NonNegIntegers;
    }
    return SupportKind::RealLine;
}

double BasisSpec::coordinate(double x) const
{
    double z = x;
    if (family == BasisFamily::Hermite)
        z = (x - shift) / (scale * std::numbers::sqrt2);
    else if (family == BasisFamily::Laguerre)
        z = x / scale;
    check_coordinate(*this, z);
    return z;
}

double BasisSpec::jacobian() const
{
    if (family == BasisFamily::Hermite)
        return 1.0 / (scale * std::numbers::sqrt2);
    if (family == BasisFamily::Laguerre)
        return 1.0 / scale;
    return 1.0;
}

bool operator==(const BasisSpec& a, const BasisSpec& b)
{
    if (a.family != b.family || a.size != b.size)
        return false;
    switch (a.family) {
    case BasisFamily::Hermite:
        return a.shift == b.shift && a.scale == b.scale;
    case BasisFamily::Laguerre:
        return a.scale == b.scale;
    case BasisFamily::Kravchuk:
        return a.n_trials == b.n_trials && a.success_p == b.success_p;
    case BasisFamily::Charlier:
        return a.lambda == b.lambda;
    }
    return false;
}

BasisSpec moment_matched(BasisFamily family, std::size_t size, std::span<const double> sample,
                         int n_trials)
{
    if (sample.empty())
        throw std::invalid_argument("moment matching needs a non-empty sample");
    const double n = static_cast<double>(sample.size());
    const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / n;
    switch (family) {
    case BasisFamily::Hermite: {
        double ss = 0.0;
        for (double x : sample)
            ss += (x - mean) * (x - mean);
        const double sd = std::sqrt(ss / n);
        if (!(sd > 0.0))
            throw std::invalid_argument("sample has zero spread; cannot standardize");
        return BasisSpec::hermite(size, mean, sd);
    }
    case BasisFamily::Laguerre:
        if (!(mean > 0.0))
            throw std::invalid_argument("sample mean must be positive for a Laguerre basis");
        return BasisSpec::laguerre(size, mean);
    case BasisFamily::Kravchuk:
        return BasisSpec::kravchuk(size, n_trials, mean / n_trials);
    case BasisFamily::Charlier:
        if (!(mean > 0.0))
            throw std::invalid_argument("sample mean must be positive for a Charlier basis");
        return BasisSpec::charlier(size, mean);
    }
    throw std::invalid_argument("unknown basis family");
}

double basis_value(const BasisSpec& spec, std::size_t k, double z)
{
    if (k >= spec.size)
        throw std::out_of_range("basis order " + std::to_string(k) + " out of range for size "
                                + std::to_string(spec.size));
    check_coordinate(spec, z);
    std::vector<double> row(k + 1);
    fill_row(spec, z, row);
    return row[k];
}

std::vector<double> basis_row(const BasisSpec& spec, double z)
{
    std::vector<double> row(spec.size);
    basis_row(spec, z, row);
    return row;
}

void basis_row(const BasisSpec& spec, double z, std::span<double> out)
{
    if (out.size() != spec.size)
        throw std::invalid_argument("basis_row: output span has wrong length");
    check_coordinate(spec, z);
    fill_row(spec, z, out);
}

SupportDomain default_domain(const BasisSpec& spec)
{
    const double s = static_cast<double>(spec.size);
    switch (spec.family) {
    case BasisFamily::Hermite: {
        const double half = std::max(12.0, std::sqrt(2.0 * s + 1.0) + 10.0);
        return {SupportKind::RealLine, -half, half};
    }
    case BasisFamily::Laguerre:
        return {SupportKind::HalfLine, 0.0, 4.0 * s + 80.0};
    case BasisFamily::Kravchuk:
        return {SupportKind::FiniteLattice, 0.0, static_cast<double>(spec.n_trials)};
    case BasisFamily::Charlier:
        return {SupportKind::NonNegIntegers, 0.0,
                std::ceil(spec.lambda + 40.0 * std::sqrt(spec.lambda) + 10.0 * s + 40.0)};
    }
    return {};
}

Eigen::MatrixXd gram_check(const BasisSpec& spec, const SupportDomain& domain)
{
    spec.validate();
    domain.validate();
    if (domain.kind != spec.support())
        throw std::invalid_argument("support domain does not match the basis family");

    const auto s = static_cast<Eigen::Index>(spec.size);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(s, s);
    Eigen::VectorXd row(s);
    auto accumulate = [&](double z, double weight) {
        fill_row(spec, z, std::span<double>(row.data(), spec.size));
        gram.noalias() += weight * row * row.transpose();
    };

    if (is_discrete(domain.kind)) {
        for (double z = domain.lower; z <= domain.upper; z += 1.0)
            accumulate(z, 1.0);
    } else {
        using Rule = boost::math::quadrature::gauss<double, 20>;
        const auto& nodes = Rule::abscissa();
        const auto& weights = Rule::weights();
        const auto panels = static_cast<std::size_t>(std::ceil((domain.upper - domain.lower) / 0.25));
        const double width = (domain.upper - domain.lower) / static_cast<double>(panels);
        for (std::size_t p = 0; p < panels; ++p) {
            const double mid = domain.lower + width * (static_cast<double>(p) + 0.5);
            const double half = 0.5 * width;
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                accumulate(mid - half * nodes[i], half * weights[i]);
                accumulate(mid + half * nodes[i], half * weights[i]);
            }
        }
    }

    if (!gram.allFinite())
        throw std::runtime_error("gram_check: non-finite quadrature result");
    const double diag_error = (gram.diagonal().array() - 1.0).abs().maxCoeff();
    if (diag_error > 1e-6)
        throw std::runtime_error("gram_check: truncation bound too small (diagonal off by "
                                 + std::to_string(diag_error) + ")");
    return gram;
}

Eigen::MatrixXd gram_check(const BasisSpec& spec) { return gram_check(spec, default_domain(spec)); }

double identity_deviation(const Eigen::MatrixXd& gram)
{
    return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

BasisSpec density_frame(const BasisSpec& root_frame)
{
    BasisSpec out = root_frame;
    if (out.family == BasisFamily::Hermite)
        out.scale /= std::numbers::sqrt2;
    else if (out.family == BasisFamily::Laguerre)
        out.scale /= 2.0;
    return out;
}

}  // namespace rootdens
