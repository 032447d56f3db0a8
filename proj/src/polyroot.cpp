#include "sigre/polyroot.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sigre {

double poly_eval(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
    if (c.size() <= 1) return {};
    std::vector<double> d(c.size() - 1);
    for (size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
    return d;
}

namespace {

int effective_degree(const std::vector<double>& c, double floor_mag) {
    for (size_t i = c.size(); i-- > 0;)
        if (std::abs(c[i]) > floor_mag) return static_cast<int>(i);
    return -1;  // numerically zero polynomial
}

double bisect(const std::vector<double>& c, double lo, double hi, double flo) {
    // flo and f(hi) have opposite signs
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = poly_eval(c, mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> poly_roots_in(const std::vector<double>& c, double a, double b) {
    if (!(a <= b)) return {};
    if (c.size() > 13) throw std::invalid_argument("poly_roots_in: degree too large");

    const double m = std::max({std::abs(a), std::abs(b), 1.0});
    double scale = 0.0, mk = 1.0;
    for (double ck : c) {
        scale += std::abs(ck) * mk;
        mk *= m;
    }
    const double ftol = 1e-11 * scale;
    const double xtol = 1e-13 * std::max(b - a, 1e-30);

    const int deg = effective_degree(c, scale * 1e-15);
    if (deg <= 0) return {};
    if (deg == 1) {
        double r = -c[0] / c[1];
        if (r >= a - xtol && r <= b + xtol) return {std::clamp(r, a, b)};
        return {};
    }

    std::vector<double> trimmed(c.begin(), c.begin() + deg + 1);
    std::vector<double> crit = poly_roots_in(poly_derivative(trimmed), a, b);

    std::vector<double> pts;
    pts.push_back(a);
    for (double r : crit)
        if (r > a + xtol && r < b - xtol) pts.push_back(r);
    pts.push_back(b);

    std::vector<double> roots;
    std::vector<double> fv(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) fv[i] = poly_eval(trimmed, pts[i]);
    for (size_t i = 0; i < pts.size(); ++i) {
        if (std::abs(fv[i]) <= ftol) {
            roots.push_back(pts[i]);
            continue;
        }
        if (i + 1 < pts.size() && std::abs(fv[i + 1]) > ftol && (fv[i] > 0) != (fv[i + 1] > 0))
            roots.push_back(bisect(trimmed, pts[i], pts[i + 1], fv[i]));
    }

    std::sort(roots.begin(), roots.end());
    std::vector<double> out;
    for (double r : roots)
        if (out.empty() || r - out.back() > xtol) out.push_back(r);
    return out;
}

}  // namespace sigre
