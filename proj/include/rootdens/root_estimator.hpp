#pragma once

// Root density estimator: the density is modelled as p(x) = |psi(x)|^2 with
// psi(x) = sum_i c_i phi_i(x) expanded in an orthonormal basis, and the
// coefficients are fitted by maximum likelihood under sum |c_i|^2 = 1.
//
// The likelihood equation is quasi-linear,
//
//     c_i = (1/n) sum_k conj(phi_i(x_k)) / conj(psi(x_k)),
//
// and is solved by relaxed fixed-point iteration started from the ground state.

#include "rootdens/poly_bases.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace rootdens {

using Complex = std::complex<double>;

/// Unit-norm coefficient vector of a psi-function in a given basis.
struct PsiCoefficients {
    BasisSpec basis;
    std::vector<Complex> coeffs;

    double norm_squared() const;
};

/// (1, 0, ..., 0) in `basis`.
PsiCoefficients ground_state(const BasisSpec& basis);

/// Rotates the global phase so the largest-magnitude coefficient is real and >= 0.
void fix_phase(std::vector<Complex>& coeffs);

/// Observed data points together with the kind of support they live on.
struct Sample {
    std::vector<double> points;
    SupportKind kind = SupportKind::RealLine;

    std::size_t size() const { return points.size(); }
    /// n >= 1, finite values, integer values for discrete kinds.
    void validate() const;
};

struct FitOptions {
    double alpha = 0.7;
    int max_iters = 2000;
    double tol = 1e-9;
    double guard_eps = 1e-12;
    /// Imaginary offset added to every higher coefficient of the start vector.
    /// Zero keeps the real ground-state start; a real start never leaves the
    /// real subspace, so complex-valued psi-functions need a non-zero value.
    double complex_start = 0.0;
    /// Extra fits from randomly perturbed starts; the best likelihood wins.
    int restarts = 0;
    std::uint64_t restart_seed = 0;
    /// Keep the log-likelihood of every iterate in FitResult::trace.
    bool record_trace = false;

    void validate() const;
};

struct FitResult {
    PsiCoefficients psi;
    int iterations = 0;
    bool converged = false;
    /// max |R(c) - c| at the returned coefficients
    double residual = 0.0;
    double log_likelihood = 0.0;
    std::vector<double> trace;
};

/// A sample point falls on a node of the current psi iterate.
class ZeroPsiAtDataPoint : public std::runtime_error {
public:
    explicit ZeroPsiAtDataPoint(double x);
    double point() const { return point_; }

private:
    double point_;
};

/// psi(x) = sum c_i phi_i(z(x)); x is in data units.
Complex psi_value(const PsiCoefficients& c, double x);

/// |psi(x)|^2 times the Jacobian of the standardizing map.
double density(const PsiCoefficients& c, double x);

/// Right-hand side of the likelihood equation evaluated at c.
std::vector<Complex> likelihood_map(const PsiCoefficients& c, const Sample& sample,
                                    double guard_eps = 1e-12);

double log_likelihood(const PsiCoefficients& c, const Sample& sample);

FitResult fit(const Sample& sample, const BasisSpec& basis, const FitOptions& opts = {});

}  // namespace rootdens
