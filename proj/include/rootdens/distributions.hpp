#pragma once

#include "rootdens/gauss_poly.hpp"
#include "rootdens/poly_bases.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace rootdens {

struct NormalMixture {
    std::vector<double> weights;
    std::vector<double> means;
    std::vector<double> sigmas;
};

/// w_0 * Exponential(mean) + w_1 * ChiSquared(df)
struct ExpChiSqMixture {
    std::vector<double> weights;
    double exp_mean = 1.0;
    int chisq_df = 1;
};

struct BinomialMixture {
    std::vector<double> weights;
    std::vector<int> trials;
    std::vector<double> probs;
};

struct PoissonMixture {
    std::vector<double> weights;
    std::vector<double> lambdas;
};

struct GaussPolyTruth {
    /// f as supplied (ascending), before normalization
    std::vector<double> poly;
    GaussPolyDensity density;

    static GaussPolyTruth from_poly(std::vector<double> poly);
};

/// Reference distribution with closed-form density/pmf and an exact sampler.
class TrueDistribution {
public:
    using Variant = std::variant<NormalMixture, ExpChiSqMixture, BinomialMixture, PoissonMixture, GaussPolyTruth>;

    explicit TrueDistribution(Variant v);

    const Variant& variant() const { return variant_; }
    SupportKind support() const;
    /// Largest lattice point for FiniteLattice supports.
    int lattice_max() const;

    double pdf(double x) const;
    double mean() const;
    double variance() const;
    /// Short human-readable name of the variant.
    std::string kind_name() const;

private:
    Variant variant_;
};

double true_pdf(const TrueDistribution& dist, double x);

/// Exact sampling; deterministic in `seed`.
std::vector<double> draw(const TrueDistribution& dist, std::size_t n, std::uint64_t seed);

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);
/// Seed of trial `trial` in experiment `experiment`.
std::uint64_t trial_seed(const std::string& experiment, std::uint64_t base_seed, std::uint64_t trial);

}  // namespace rootdens
