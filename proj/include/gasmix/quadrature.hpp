#ifndef GASMIX_QUADRATURE_HPP
#define GASMIX_QUADRATURE_HPP

#include <functional>

namespace gasmix {

/// Adaptive Simpson integration of f over [a, b]. Subdivision stops once the
/// local Richardson error estimate is below max(abs_tol, rel_tol*|I|) scaled
/// by the interval share.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1.0, double rel_tol = 1e-10, int max_depth = 60);

} // namespace gasmix

#endif
