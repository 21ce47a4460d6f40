#include "rootdens/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

namespace rootdens {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_weights(const std::vector<double>& w, std::size_t components)
{
    if (w.empty() || w.size() != components)
        throw std::invalid_argument("mixture weights do not match the number of components");
    for (double x : w)
        if (!(x > 0.0))
            throw std::invalid_argument("mixture weights must be positive");
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("mixture weights must sum to 1");
}

double normal_pdf(double x, double mu, double sigma)
{
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

double chisq_pdf(double x, int df)
{
    const double k = 0.5 * df;
    if (x == 0.0)
        return df == 2 ? 0.5 : (df == 1 ? INFINITY : 0.0);
    return std::exp((k - 1.0) * std::log(x) - 0.5 * x - k * std::log(2.0) - std::lgamma(k));
}

double binomial_pmf(double x, int n, double p)
{
    if (x > n)
        return 0.0;
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(x + 1.0) - std::lgamma(n - x + 1.0)
                    + x * std::log(p) + (n - x) * std::log1p(-p));
}

double poisson_pmf(double x, double lambda)
{
    return std::exp(x * std::log(lambda) - lambda - std::lgamma(x + 1.0));
}

void check_point(SupportKind kind, double x)
{
    if (!std::isfinite(x))
        throw std::domain_error("density argument is not finite");
    if (kind == SupportKind::HalfLine && x < 0.0)
        throw std::domain_error("point " + std::to_string(x) + " is outside the half-line support");
    if (is_discrete(kind) && (x < 0.0 || std::floor(x) != x))
        throw std::domain_error("point " + std::to_string(x) + " is not a non-negative integer");
}

}  // namespace

GaussPolyTruth GaussPolyTruth::from_poly(std::vector<double> poly)
{
    GaussPolyDensity d = validate_and_normalize(poly);
    return {std::move(poly), std::move(d)};
}

TrueDistribution::TrueDistribution(Variant v) : variant_(std::move(v))
{
    std::visit(Overloaded{
                   [](const NormalMixture& m) {
                       check_weights(m.weights, m.means.size());
                       if (m.sigmas.size() != m.means.size())
                           throw std::invalid_argument("normal mixture: sigmas/means length mismatch");
                       for (double s : m.sigmas)
                           if (!(s > 0.0))
                               throw std::invalid_argument("normal mixture: sigma must be positive");
                   },
                   [](const ExpChiSqMixture& m) {
                       check_weights(m.weights, 2);
                       if (!(m.exp_mean > 0.0) || m.chisq_df < 1)
                           throw std::invalid_argument("exp/chi-squared mixture: invalid parameters");
                   },
                   [](const BinomialMixture& m) {
                       check_weights(m.weights, m.trials.size());
                       if (m.probs.size() != m.trials.size())
                           throw std::invalid_argument("binomial mixture: probs/trials length mismatch");
                       for (std::size_t i = 0; i < m.trials.size(); ++i)
                           if (m.trials[i] < 1 || !(m.probs[i] > 0.0 && m.probs[i] < 1.0))
                               throw std::invalid_argument("binomial mixture: invalid component");
                   },
                   [](const PoissonMixture& m) {
                       check_weights(m.weights, m.lambdas.size());
                       for (double l : m.lambdas)
                           if (!(l > 0.0))
                               throw std::invalid_argument("poisson mixture: lambda must be positive");
                   },
                   [](const GaussPolyTruth& g) {
                       if (g.density.coeffs.empty())
                           throw std::invalid_argument("gauss-poly truth without coefficients");
                   },
               },
               variant_);
}

SupportKind TrueDistribution::support() const
{
    return std::visit(Overloaded{
                          [](const NormalMixture&) { return SupportKind::RealLine; },
                          [](const ExpChiSqMixture&) { return SupportKind::HalfLine; },
                          [](const BinomialMixture&) { return SupportKind::FiniteLattice; },
                          [](const PoissonMixture&) { return SupportKind::NonNegIntegers; },
                          [](const GaussPolyTruth&) { return SupportKind::RealLine; },
                      },
                      variant_);
}

int TrueDistribution::lattice_max() const
{
    if (const auto* b = std::get_if<BinomialMixture>(&variant_)) {
        int n = 0;
        for (int t : b->trials)
            n = std::max(n, t);
        return n;
    }
    throw std::logic_error("lattice_max: distribution has no finite lattice");
}

double TrueDistribution::pdf(double x) const
{
    check_point(support(), x);
    return std::visit(Overloaded{
                          [x](const NormalMixture& m) {
                              double p = 0.0;
                              for (std::size_t i = 0; i < m.weights.size(); ++i)
                                  p += m.weights[i] * normal_pdf(x, m.means[i], m.sigmas[i]);
                              return p;
                          },
                          [x](const ExpChiSqMixture& m) {
                              return m.weights[0] * std::exp(-x / m.exp_mean) / m.exp_mean
                                  + m.weights[1] * chisq_pdf(x, m.chisq_df);
                          },
                          [x](const BinomialMixture& m) {
                              double p = 0.0;
                              for (std::size_t i = 0; i < m.weights.size(); ++i)
                                  p += m.weights[i] * binomial_pmf(x, m.trials[i], m.probs[i]);
                              return p;
                          },
                          [x](const PoissonMixture& m) {
                              double p = 0.0;
                              for (std::size_t i = 0; i < m.weights.size(); ++i)
                                  p += m.weights[i] * poisson_pmf(x, m.lambdas[i]);
                              return p;
                          },
                          [x](const GaussPolyTruth& g) { return g.density(x); },
                      },
                      variant_);
}

double TrueDistribution::mean() const
{
    return std::visit(Overloaded{
                          [](const NormalMixture& m) {
                              double v = 0.0;
                              for (std::size_t i = 0; i < m.weights.size(); ++i)
                                  v += m.weights[i] * m.means[i];
                              return v;
                          },
                          [](const ExpChiSqMixture& m) {
                              return m.weights[0] * m.exp_mean + m.weights[1] * m.chisq_df;
                          },
                          [](const BinomialMixture& m) {
                              double v = 0.0;
                              for (std::size_t i = 0; i < m.weights.size(); ++i)
                                  v += m.weights[i] * m.trials[i] * m.probs[i];
                              return v;
                          },
                          [](const PoissonMixture& m) {
                              double v = 0.0;
                              for (std::size_t i = 0; i < m.weights.size(); ++i)
                                  v += m.weights[i] * m.lambdas[i];
                              return v;
                          },
                          [](const GaussPolyTruth& g) { return g.density.moment(1); },
                      },
                      variant_);
}

double TrueDistribution::variance() const
{
    const double second = std::visit(
        Overloaded{
            [](const NormalMixture& m) {
                double v = 0.0;
                for (std::size_t i = 0; i < m.weights.size(); ++i)
                    v += m.weights[i] * (m.sigmas[i] * m.sigmas[i] + m.means[i] * m.means[i]);
                return v;
            },
            [](const ExpChiSqMixture& m) {
                const double k = m.chisq_df;
                return m.weights[0] * 2.0 * m.exp_mean * m.exp_mean + m.weights[1] * (2.0 * k + k * k);
            },
            [](const BinomialMixture& m) {
                double v = 0.0;
                for (std::size_t i = 0; i < m.weights.size(); ++i) {
                    const double mu = m.trials[i] * m.probs[i];
                    v += m.weights[i] * (mu * (1.0 - m.probs[i]) + mu * mu);
                }
                return v;
            },
            [](const PoissonMixture& m) {
                double v = 0.0;
                for (std::size_t i = 0; i < m.weights.size(); ++i)
                    v += m.weights[i] * (m.lambdas[i] + m.lambdas[i] * m.lambdas[i]);
                return v;
            },
            [](const GaussPolyTruth& g) { return g.density.moment(2); },
        },
        variant_);
    const double mu = mean();
    return second - mu * mu;
}

std::string TrueDistribution::kind_name() const
{
    return std::visit(Overloaded{
                          [](const NormalMixture&) { return std::string("normal_mixture"); },
                          [](const ExpChiSqMixture&) { return std::string("exp_chisq_mixture"); },
                          [](const BinomialMixture&) { return std::string("binomial_mixture"); },
                          [](const PoissonMixture&) { return std::string("poisson_mixture"); },
                          [](const GaussPolyTruth&) { return std::string("gauss_poly"); },
                      },
                      variant_);
}

double true_pdf(const TrueDistribution& dist, double x) { return dist.pdf(x); }

std::vector<double> draw(const TrueDistribution& dist, std::size_t n, std::uint64_t seed)
{
    if (const auto* g = std::get_if<GaussPolyTruth>(&dist.variant()))
        return sample_gauss_poly(g->density, n, seed);

    std::mt19937_64 rng(seed);
    std::vector<double> out;
    out.reserve(n);
    std::visit(Overloaded{
                   [&](const NormalMixture& m) {
                       std::discrete_distribution<std::size_t> pick(m.weights.begin(), m.weights.end());
                       std::normal_distribution<double> gauss;
                       for (std::size_t i = 0; i < n; ++i) {
                           const std::size_t c = pick(rng);
                           out.push_back(m.means[c] + m.sigmas[c] * gauss(rng));
                       }
                   },
                   [&](const ExpChiSqMixture& m) {
                       std::discrete_distribution<std::size_t> pick(m.weights.begin(), m.weights.end());
                       std::uniform_real_distribution<double> uniform(0.0, 1.0);
                       std::gamma_distribution<double> chisq(0.5 * m.chisq_df, 2.0);
                       for (std::size_t i = 0; i < n; ++i) {
                           if (pick(rng) == 0)
                               out.push_back(-m.exp_mean * std::log1p(-uniform(rng)));
                           else
                               out.push_back(chisq(rng));
                       }
                   },
                   [&](const BinomialMixture& m) {
                       std::discrete_distribution<std::size_t> pick(m.weights.begin(), m.weights.end());
                       for (std::size_t i = 0; i < n; ++i) {
                           const std::size_t c = pick(rng);
                           std::binomial_distribution<int> binom(m.trials[c], m.probs[c]);
                           out.push_back(binom(rng));
                       }
                   },
                   [&](const PoissonMixture& m) {
                       std::discrete_distribution<std::size_t> pick(m.weights.begin(), m.weights.end());
                       for (std::size_t i = 0; i < n; ++i) {
                           const std::size_t c = pick(rng);
                           std::poisson_distribution<int> poisson(m.lambdas[c]);
                           out.push_back(poisson(rng));
                       }
                   },
                   [](const GaussPolyTruth&) {},
               },
               dist.variant());
    return out;
}

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t trial_seed(const std::string& experiment, std::uint64_t base_seed, std::uint64_t trial)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char ch : experiment) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return mix64(h ^ mix64(base_seed ^ mix64(trial)));
}

}  // namespace rootdens
