#pragma once

// Competitor estimators: the Rosenblatt-Parzen Gaussian kernel estimator,
// the Chentsov projection (orthogonal series) estimator of the density
// itself, and the trivial discrete baselines (empirical frequencies and the
// moment-matched zero-order law of a basis).

#include "rootdens/root_estimator.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace rootdens {

struct KernelEstimate {
    std::vector<double> sample;
    double bandwidth = 1.0;
};

/// 1.06 * min(sd, IQR / 1.34) * n^(-1/5); falls back to sd when the IQR is zero.
double silverman_bandwidth(std::span<const double> sample);

/// Throws std::invalid_argument for a zero-spread sample when `bandwidth` is empty.
KernelEstimate kernel_fit(std::span<const double> sample, std::optional<double> bandwidth = {});

double kernel_density(const KernelEstimate& est, double x);

struct ProjectionEstimate {
    BasisSpec basis;
    std::vector<double> coeffs;
    /// Set by clip_and_renormalize: density becomes max(p, 0) / clip_norm.
    std::optional<double> clip_norm;
};

/// b_i = (1/n) sum_k phi_i(z_k).
ProjectionEstimate projection_fit(const Sample& sample, const BasisSpec& basis);

/// sum_i b_i phi_i(z(x)) times the Jacobian; may be negative unless clipped.
double projection_density(const ProjectionEstimate& est, double x);

/// Variant that clips negative values and rescales to unit mass (quadrature
/// over the basis default domain, or the lattice sum for discrete bases).
ProjectionEstimate clip_and_renormalize(ProjectionEstimate est);

struct FrequencyEstimate {
    std::map<long, double> pmf;
};

FrequencyEstimate frequency_fit(std::span<const double> sample);
double frequency_pmf(const FrequencyEstimate& est, double x);

/// Ground state of the moment-matched basis: Normal, Exponential, Binomial(N, mean/N)
/// or Poisson(mean) depending on `family`.
PsiCoefficients zero_order_fit(const Sample& sample, BasisFamily family, int n_trials = 0);

}  // namespace rootdens
