#include "rootdens/baselines.hpp"
#include "rootdens/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace rootdens {

namespace {

/// linear-interpolation sample quantile (type 7) of sorted data
double quantile(const std::vector<double>& sorted, double q)
{
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double raw_projection(const ProjectionEstimate& est, double z)
{
    const std::vector<double> row = basis_row(est.basis, z);
    double total = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i)
        total += est.coeffs[i] * row[i];
    return total;
}

}  // namespace

double silverman_bandwidth(std::span<const double> sample)
{
    if (sample.size() < 2)
        throw std::invalid_argument("bandwidth selection needs at least two points");
    const double n = static_cast<double>(sample.size());
    const double mean = std::accumulate(sample.begin(), sample.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : sample)
        ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));

    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
    const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    if (!(spread > 0.0))
        throw std::invalid_argument("sample has zero spread; bandwidth undefined");
    return 1.06 * spread * std::pow(n, -0.2);
}

KernelEstimate kernel_fit(std::span<const double> sample, std::optional<double> bandwidth)
{
    if (sample.empty())
        throw std::invalid_argument("kernel_fit: empty sample");
    KernelEstimate est;
    est.sample.assign(sample.begin(), sample.end());
    est.bandwidth = bandwidth ? *bandwidth : silverman_bandwidth(sample);
    if (!(est.bandwidth > 0.0) || !std::isfinite(est.bandwidth))
        throw std::invalid_argument("kernel bandwidth must be positive");
    return est;
}

double kernel_density(const KernelEstimate& est, double x)
{
    const double inv_h = 1.0 / est.bandwidth;
    double total = 0.0;
    for (double xk : est.sample) {
        const double u = (x - xk) * inv_h;
        total += std::exp(-0.5 * u * u);
    }
    return total * inv_h / (static_cast<double>(est.sample.size()) * std::sqrt(2.0 * std::numbers::pi));
}

ProjectionEstimate projection_fit(const Sample& sample, const BasisSpec& basis)
{
    sample.validate();
    basis.validate();
    ProjectionEstimate est{basis, std::vector<double>(basis.size, 0.0), std::nullopt};
    std::vector<double> row(basis.size);
    for (double x : sample.points) {
        basis_row(basis, basis.coordinate(x), row);
        for (std::size_t i = 0; i < row.size(); ++i)
            est.coeffs[i] += row[i];
    }
    for (double& b : est.coeffs)
        b /= static_cast<double>(sample.size());
    return est;
}

double projection_density(const ProjectionEstimate& est, double x)
{
    const double p = raw_projection(est, est.basis.coordinate(x)) * est.basis.jacobian();
    if (est.clip_norm)
        return std::max(p, 0.0) / *est.clip_norm;
    return p;
}

ProjectionEstimate clip_and_renormalize(ProjectionEstimate est)
{
    est.clip_norm.reset();
    const SupportDomain dom = default_domain(est.basis);
    double mass = 0.0;
    if (est.basis.discrete()) {
        for (double z = dom.lower; z <= dom.upper; z += 1.0)
            mass += std::max(raw_projection(est, z), 0.0);
    } else {
        const auto panels = static_cast<std::size_t>(std::ceil((dom.upper - dom.lower) / 0.25));
        mass = integrate_fixed([&](double z) { return std::max(raw_projection(est, z), 0.0); },
                               dom.lower, dom.upper, panels);
    }
    if (!(mass > 0.0))
        throw std::runtime_error("projection estimate has no positive mass to renormalize");
    est.clip_norm = mass;
    return est;
}

FrequencyEstimate frequency_fit(std::span<const double> sample)
{
    if (sample.empty())
        throw std::invalid_argument("frequency_fit: empty sample");
    FrequencyEstimate est;
    const double w = 1.0 / static_cast<double>(sample.size());
    for (double x : sample) {
        if (std::floor(x) != x)
            throw std::invalid_argument("frequency_fit: sample is not integer-valued");
        est.pmf[static_cast<long>(x)] += w;
    }
    return est;
}

double frequency_pmf(const FrequencyEstimate& est, double x)
{
    if (std::floor(x) != x)
        return 0.0;
    const auto it = est.pmf.find(static_cast<long>(x));
    return it == est.pmf.end() ? 0.0 : it->second;
}

PsiCoefficients zero_order_fit(const Sample& sample, BasisFamily family, int n_trials)
{
    sample.validate();
    return ground_state(moment_matched(family, 1, sample.points, n_trials));
}

}  // namespace rootdens
