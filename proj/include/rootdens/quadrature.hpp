#pragma once

#include <cstddef>
#include <functional>

namespace rootdens {

/// Composite 20-point Gauss-Legendre rule on [lower, upper] split into
/// `panels` equal sub-intervals.
double integrate_fixed(const std::function<double(double)>& f, double lower, double upper,
                       std::size_t panels);

/// Adaptive Gauss-Kronrod (31 nodes) applied independently on each of
/// `panels` equal sub-intervals; `tolerance` is relative per panel.
double integrate_adaptive(const std::function<double(double)>& f, double lower, double upper,
                          std::size_t panels, double tolerance = 1e-11);

}  // namespace rootdens
