#include "rootdens/root_estimator.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>

namespace rootdens {

namespace {

/// Basis rows at every sample point plus the sample itself, in the form the
/// fixed-point iteration consumes.
struct Design {
    Eigen::MatrixXd rows;  // n x s
    std::vector<double> points;
    double log_jacobian = 0.0;
};

Design make_design(const Sample& sample, const BasisSpec& basis)
{
    Design d;
    d.rows.resize(static_cast<Eigen::Index>(sample.size()), static_cast<Eigen::Index>(basis.size));
    std::vector<double> row(basis.size);
    for (std::size_t k = 0; k < sample.size(); ++k) {
        basis_row(basis, basis.coordinate(sample.points[k]), row);
        for (std::size_t j = 0; j < basis.size; ++j)
            d.rows(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = row[j];
    }
    d.points = sample.points;
    d.log_jacobian = std::log(basis.jacobian());
    return d;
}

/// Coefficients split into real and imaginary parts.
struct SplitCoeffs {
    Eigen::VectorXd re;
    Eigen::VectorXd im;
};

SplitCoeffs split(const std::vector<Complex>& c)
{
    SplitCoeffs out{Eigen::VectorXd(static_cast<Eigen::Index>(c.size())),
                    Eigen::VectorXd(static_cast<Eigen::Index>(c.size()))};
    for (std::size_t i = 0; i < c.size(); ++i) {
        out.re[static_cast<Eigen::Index>(i)] = c[i].real();
        out.im[static_cast<Eigen::Index>(i)] = c[i].imag();
    }
    return out;
}

std::vector<Complex> join(const Eigen::VectorXd& re, const Eigen::VectorXd& im)
{
    std::vector<Complex> c(static_cast<std::size_t>(re.size()));
    for (Eigen::Index i = 0; i < re.size(); ++i)
        c[static_cast<std::size_t>(i)] = {re[i], im[i]};
    return c;
}

/// One evaluation of the likelihood map; also returns ln L as a by-product.
struct MapValue {
    SplitCoeffs r;
    double log_likelihood = 0.0;
};

MapValue evaluate_map(const Design& d, const SplitCoeffs& c, double guard_eps)
{
    const Eigen::VectorXd psi_re = d.rows * c.re;
    const Eigen::VectorXd psi_im = d.rows * c.im;
    const Eigen::Index n = psi_re.size();
    Eigen::VectorXd w_re(n);
    Eigen::VectorXd w_im(n);
    double log_l = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double mod2 = psi_re[k] * psi_re[k] + psi_im[k] * psi_im[k];
        if (!(std::sqrt(mod2) >= guard_eps))
            throw ZeroPsiAtDataPoint(d.points[static_cast<std::size_t>(k)]);
        // 1 / conj(psi) = psi / |psi|^2
        w_re[k] = psi_re[k] / mod2;
        w_im[k] = psi_im[k] / mod2;
        log_l += std::log(mod2);
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    MapValue out;
    out.r.re = inv_n * (d.rows.transpose() * w_re);
    out.r.im = inv_n * (d.rows.transpose() * w_im);
    out.log_likelihood = log_l + static_cast<double>(n) * d.log_jacobian;
    return out;
}

void normalize(SplitCoeffs& c)
{
    const double norm = std::sqrt(c.re.squaredNorm() + c.im.squaredNorm());
    c.re /= norm;
    c.im /= norm;
}

double max_abs_diff(const SplitCoeffs& a, const SplitCoeffs& b)
{
    double m = 0.0;
    for (Eigen::Index i = 0; i < a.re.size(); ++i)
        m = std::max(m, std::hypot(a.re[i] - b.re[i], a.im[i] - b.im[i]));
    return m;
}

/// Trial evaluation that treats a psi node at a data point as an infinitely
/// bad step rather than an error.
std::optional<MapValue> try_map(const Design& d, const SplitCoeffs& c, double guard_eps)
{
    try {
        return evaluate_map(d, c, guard_eps);
    } catch (const ZeroPsiAtDataPoint&) {
        return std::nullopt;
    }
}

/// Stacks (re, im), or only re when the fit stays in the real subspace.
Eigen::VectorXd stack(const SplitCoeffs& c, bool complex)
{
    if (!complex)
        return c.re;
    Eigen::VectorXd u(2 * c.re.size());
    u << c.re, c.im;
    return u;
}

SplitCoeffs unstack(const Eigen::VectorXd& u, bool complex)
{
    const Eigen::Index s = complex ? u.size() / 2 : u.size();
    if (!complex)
        return {u, Eigen::VectorXd::Zero(s)};
    return {u.head(s), u.tail(s)};
}

/// Damped Newton step on the unit sphere in the real coordinates u of c.
///
/// With q_k = |psi(x_k)|^2 = u' B_k u the log-likelihood is sum ln q_k; its
/// gradient is 2n R(c) and its Euclidean Hessian is
/// sum (2 B_k / q_k - 4 (B_k u)(B_k u)' / q_k^2). The step lives in the tangent
/// space orthogonal to u (and to the global phase direction for complex c).
class NewtonStep {
public:
    NewtonStep(const Design& d, const SplitCoeffs& c, const MapValue& m, bool complex)
    {
        const Eigen::Index s = c.re.size();
        const auto n = static_cast<double>(d.rows.rows());
        const Eigen::VectorXd psi_re = d.rows * c.re;
        const Eigen::VectorXd psi_im = d.rows * c.im;
        const Eigen::ArrayXd q = psi_re.array().square() + psi_im.array().square();

        const Eigen::MatrixXd block = d.rows.transpose() * (2.0 / q).matrix().asDiagonal() * d.rows;
        const Eigen::ArrayXd w = 2.0 / q;
        const Eigen::Index dim = complex ? 2 * s : s;
        Eigen::MatrixXd cross(d.rows.rows(), dim);
        cross.leftCols(s) = d.rows.array().colwise() * (psi_re.array() * w);
        if (complex)
            cross.rightCols(s) = d.rows.array().colwise() * (psi_im.array() * w);

        Eigen::MatrixXd hess = -cross.transpose() * cross;
        hess.topLeftCorner(s, s) += block;
        if (complex)
            hess.bottomRightCorner(s, s) += block;
        // Curvature of the sphere: the multiplier of |u|^2 = 1 is n.
        hess.diagonal().array() -= 2.0 * n;

        u_ = stack(c, complex);
        Eigen::VectorXd grad = 2.0 * n * stack(m.r, complex);

        // Orthonormal basis of the tangent space.
        Eigen::MatrixXd fixed(dim, complex ? 2 : 1);
        fixed.col(0) = u_;
        if (complex) {
            Eigen::VectorXd phase(dim);
            phase << -c.im, c.re;
            fixed.col(1) = phase;
        }
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(fixed);
        const Eigen::MatrixXd full = qr.householderQ();
        tangent_ = full.rightCols(dim - fixed.cols());

        const Eigen::MatrixXd reduced = tangent_.transpose() * hess * tangent_;
        gradient_ = tangent_.transpose() * grad;
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced);
        // Work with the negated Hessian, positive definite at a maximum.
        curvature_ = -eig.eigenvalues();
        vectors_ = eig.eigenvectors();
        scale_ = curvature_.cwiseAbs().maxCoeff() + 1.0;
    }

    /// Point reached with Levenberg damping `mu` (relative to the Hessian scale).
    Eigen::VectorXd candidate(double mu) const
    {
        const double shift = std::max(0.0, -curvature_.minCoeff()) * (1.0 + 1e-9) + mu * scale_;
        Eigen::VectorXd coef = vectors_.transpose() * gradient_;
        for (Eigen::Index i = 0; i < coef.size(); ++i) {
            const double denom = curvature_[i] + shift;
            coef[i] = denom > 0.0 ? coef[i] / denom : 0.0;
        }
        Eigen::VectorXd next = u_ + tangent_ * (vectors_ * coef);
        return next / next.norm();
    }

    Eigen::Index dimension() const { return gradient_.size(); }

private:
    Eigen::VectorXd u_;
    Eigen::MatrixXd tangent_;
    Eigen::VectorXd gradient_;
    Eigen::VectorXd curvature_;
    Eigen::MatrixXd vectors_;
    double scale_ = 1.0;
};

// Each iteration first tries a damped Newton step and falls back to the
// relaxed fixed-point update c <- normalize((1 - alpha) c + alpha R(c)). A
// step is only taken when it does not lower the likelihood: the Newton damping
// grows after a rejected step and the relaxation factor is halved until the
// relaxed step is acceptable. Far from the optimum the relaxed update does the
// work; near it the Newton step gives fast local convergence, which the plain
// relaxed update lacks when some |psi(x_k)| are small.
FitResult iterate(const Design& d, const BasisSpec& basis, SplitCoeffs c, const FitOptions& opts)
{
    constexpr double min_alpha = 1e-14;
    constexpr double max_damping = 1e8;
    const bool complex = c.im.cwiseAbs().maxCoeff() > 0.0;

    FitResult result;
    normalize(c);
    MapValue m = evaluate_map(d, c, opts.guard_eps);
    if (opts.record_trace)
        result.trace.push_back(m.log_likelihood);
    double damping = 0.0;
    for (int it = 1; it <= opts.max_iters; ++it) {
        result.iterations = it;
        if (max_abs_diff(m.r, c) <= opts.tol)
            break;
        // Allowance for rounding in a sum of n logarithms.
        const double slack = 1e-14 * (1.0 + std::abs(m.log_likelihood));
        auto acceptable = [&](const std::optional<MapValue>& trial) {
            return trial && trial->log_likelihood >= m.log_likelihood - slack;
        };

        bool accepted = false;
        if (basis.size > 1 && damping <= max_damping) {
            const NewtonStep newton(d, c, m, complex);
            SplitCoeffs next = unstack(newton.candidate(damping), complex);
            auto trial = try_map(d, next, opts.guard_eps);
            if (acceptable(trial)) {
                c = std::move(next);
                m = std::move(*trial);
                accepted = true;
                damping = damping < 1e-6 ? 0.0 : damping / 4.0;
            } else {
                damping = std::max(1e-4, damping * 8.0);
            }
        }
        for (double alpha = opts.alpha; !accepted && alpha >= min_alpha; alpha *= 0.5) {
            SplitCoeffs next{(1.0 - alpha) * c.re + alpha * m.r.re, (1.0 - alpha) * c.im + alpha * m.r.im};
            normalize(next);
            auto trial = try_map(d, next, opts.guard_eps);
            if (acceptable(trial)) {
                c = std::move(next);
                m = std::move(*trial);
                accepted = true;
            }
        }
        if (!accepted)
            break;
        if (opts.record_trace)
            result.trace.push_back(m.log_likelihood);
    }

    result.residual = max_abs_diff(m.r, c);
    result.converged = result.residual <= opts.tol;
    result.log_likelihood = m.log_likelihood;
    result.psi.basis = basis;
    result.psi.coeffs = join(c.re, c.im);
    fix_phase(result.psi.coeffs);
    return result;
}

}  // namespace

double PsiCoefficients::norm_squared() const
{
    double total = 0.0;
    for (const auto& c : coeffs)
        total += std::norm(c);
    return total;
}

PsiCoefficients ground_state(const BasisSpec& basis)
{
    basis.validate();
    PsiCoefficients c{basis, std::vector<Complex>(basis.size)};
    c.coeffs[0] = 1.0;
    return c;
}

void fix_phase(std::vector<Complex>& coeffs)
{
    if (coeffs.empty())
        return;
    const auto largest = std::max_element(coeffs.begin(), coeffs.end(),
        [](const Complex& a, const Complex& b) { return std::abs(a) < std::abs(b); });
    const double mag = std::abs(*largest);
    if (mag == 0.0)
        return;
    const Complex rotation = std::conj(*largest) / mag;
    for (auto& c : coeffs)
        c *= rotation;
    *largest = mag;
}

void Sample::validate() const
{
    if (points.empty())
        throw std::invalid_argument("sample is empty");
    for (std::size_t k = 0; k < points.size(); ++k) {
        const double x = points[k];
        if (!std::isfinite(x))
            throw std::invalid_argument("sample point " + std::to_string(k) + " is not finite");
        if (is_discrete(kind) && (std::floor(x) != x || x < 0.0))
            throw std::invalid_argument("sample point " + std::to_string(k)
                                        + " is not a non-negative integer");
        if (kind == SupportKind::HalfLine && x < 0.0)
            throw std::invalid_argument("sample point " + std::to_string(k) + " is negative");
    }
}

void FitOptions::validate() const
{
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("relaxation alpha must lie in (0,1]");
    if (max_iters < 1)
        throw std::invalid_argument("max_iters must be positive");
    if (!(tol > 0.0))
        throw std::invalid_argument("tol must be positive");
    if (!(guard_eps > 0.0))
        throw std::invalid_argument("guard_eps must be positive");
    if (restarts < 0)
        throw std::invalid_argument("restarts must be non-negative");
}

ZeroPsiAtDataPoint::ZeroPsiAtDataPoint(double x)
    : std::runtime_error("ZeroPsiAtDataPoint: psi vanishes at data point x = " + std::to_string(x)),
      point_(x)
{
}

Complex psi_value(const PsiCoefficients& c, double x)
{
    const std::vector<double> row = basis_row(c.basis, c.basis.coordinate(x));
    Complex total = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i)
        total += c.coeffs[i] * row[i];
    return total;
}

double density(const PsiCoefficients& c, double x)
{
    return std::norm(psi_value(c, x)) * c.basis.jacobian();
}

std::vector<Complex> likelihood_map(const PsiCoefficients& c, const Sample& sample, double guard_eps)
{
    sample.validate();
    const Design d = make_design(sample, c.basis);
    const MapValue m = evaluate_map(d, split(c.coeffs), guard_eps);
    return join(m.r.re, m.r.im);
}

double log_likelihood(const PsiCoefficients& c, const Sample& sample)
{
    double total = 0.0;
    for (double x : sample.points) {
        const double p = density(c, x);
        if (!(p > 0.0))
            throw std::domain_error("non-positive density at data point x = " + std::to_string(x));
        total += std::log(p);
    }
    return total;
}

FitResult fit(const Sample& sample, const BasisSpec& basis, const FitOptions& opts)
{
    sample.validate();
    basis.validate();
    opts.validate();
    if (sample.kind != basis.support())
        throw std::invalid_argument("sample support does not match the basis family");

    const Design d = make_design(sample, basis);
    const auto s = static_cast<Eigen::Index>(basis.size);

    SplitCoeffs start{Eigen::VectorXd::Zero(s), Eigen::VectorXd::Zero(s)};
    start.re[0] = 1.0;
    for (Eigen::Index i = 1; i < s; ++i)
        start.im[i] = opts.complex_start;
    FitResult best = iterate(d, basis, start, opts);

    std::mt19937_64 rng(opts.restart_seed);
    std::normal_distribution<double> gauss(0.0, 0.5);
    for (int r = 0; r < opts.restarts; ++r) {
        SplitCoeffs perturbed = start;
        for (Eigen::Index i = 1; i < s; ++i) {
            perturbed.re[i] += gauss(rng);
            if (opts.complex_start != 0.0)
                perturbed.im[i] += gauss(rng);
        }
        FitResult candidate = iterate(d, basis, perturbed, opts);
        if (candidate.log_likelihood > best.log_likelihood)
            best = std::move(candidate);
    }
    return best;
}

}  // namespace rootdens
