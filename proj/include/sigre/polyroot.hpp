#pragma once

#include <vector>

namespace sigre {

// power-basis polynomials c[0] + c[1] x + ... ; degree stays small (<= 12)

double poly_eval(const std::vector<double>& c, double x);

std::vector<double> poly_derivative(const std::vector<double>& c);

// all real roots in [a, b], ascending and deduped.  Isolation by recursing on
// critical points, then sign-change bisection on each monotone piece; critical
// points where |p| is below the noise floor count as (tangency) roots.
std::vector<double> poly_roots_in(const std::vector<double>& c, double a, double b);

}  // namespace sigre
