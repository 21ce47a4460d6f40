#include "rootdens/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <stdexcept>

namespace rootdens {

double integrate_fixed(const std::function<double(double)>& f, double lower, double upper,
                       std::size_t panels)
{
    using Rule = boost::math::quadrature::gauss<double, 20>;
    if (panels == 0)
        throw std::invalid_argument("integrate_fixed: zero panels");
    const double width = (upper - lower) / static_cast<double>(panels);
    double total = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double a = lower + width * static_cast<double>(p);
        const double b = (p + 1 == panels) ? upper : a + width;
        total += Rule::integrate(f, a, b);
    }
    if (!std::isfinite(total))
        throw std::runtime_error("integrate_fixed: non-finite result");
    return total;
}

double integrate_adaptive(const std::function<double(double)>& f, double lower, double upper,
                          std::size_t panels, double tolerance)
{
    using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
    if (panels == 0)
        throw std::invalid_argument("integrate_adaptive: zero panels");
    const double width = (upper - lower) / static_cast<double>(panels);
    double total = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double a = lower + width * static_cast<double>(p);
        const double b = (p + 1 == panels) ? upper : a + width;
        total += Rule::integrate(f, a, b, 12, tolerance);
    }
    if (!std::isfinite(total))
        throw std::runtime_error("integrate_adaptive: non-finite result");
    return total;
}

}  // namespace rootdens
