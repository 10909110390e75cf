#pragma once

#include <functional>

namespace solitonforge {

// Globally adaptive Gauss-Kronrod 7-15 quadrature of f over [a, b].
// Stops when the accumulated error estimate drops below
// max(abs_tol, rel_tol * |integral|); throws AccuracyError (carrying the
// best estimate in the message) if max_intervals subdivisions are not
// enough. a == b returns exactly 0.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, double abs_tol = 1e-300,
                 int max_intervals = 4000);

} // namespace solitonforge
