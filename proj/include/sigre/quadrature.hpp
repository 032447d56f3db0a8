#pragma once

#include <functional>
#include <vector>

namespace sigre {

// Gauss-Legendre rule on [-1,1]; nodes ascending.  Cached per order.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int order);

// Values of Legendre P_0..P_{kmax} at x by the three-term recurrence.
std::vector<double> legendre_values(int kmax, double x);

// Degree-(q-1) interpolant through samples at the q GL nodes of [a,b], exposed
// through its antiderivative: F(x) = integral_a^x f.  Exact when f is a
// polynomial of degree <= q-1 on [a,b].
class CellAntiderivative {
public:
    CellAntiderivative(double a, double b, const std::vector<double>& node_values);
    double operator()(double x) const;  // integral from a to x
    double full() const { return (*this)(b_); }

private:
    double a_, b_;
    std::vector<double> coef_;  // Legendre coefficients of f
};

// integral_a^b f by the q-point rule.
double gl_integrate(const std::function<double(double)>& f, double a, double b, int q);

// Subdivision of [a,b] such that for every listed integrand the q-point value
// over each cell matches the two-half refinement within tol (absolute).  Seeds
// are mandatory cell boundaries (segment times).
std::vector<double> adaptive_cells(const std::vector<std::function<double(double)>>& fs,
                                   const std::vector<double>& seeds, int q, double tol,
                                   int max_depth);

}  // namespace sigre
